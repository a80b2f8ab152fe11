import mpmath as mp
import pytest

import oracles as o


def test_trivial_exact_values_match_frozen():
    v = o.exact_trivial_values()
    frozen = dict(r1=o.R1_I_MINUS_I, r2=o.R2_I_MINUS_I, m1=o.M22_1, m2=o.M22_2,
                  ll1=o.LAMBDA_L_1, lr1=o.LAMBDA_R_1, ll2=o.LAMBDA_L_2)
    for k, ref in frozen.items():
        assert v[k] == pytest.approx(ref, abs=1e-15), k


def test_example_triple_closed_forms_match_frozen():
    v = o.example_triple_values()
    assert complex(v["U"]) == pytest.approx(o.EX_U, abs=1e-15)
    assert float(v["s0"]) == pytest.approx(o.EX_S0, abs=1e-14)
    assert float(v["nu"]) == pytest.approx(0.0, abs=1e-30)
    assert complex(v["s1"]) == pytest.approx(o.EX_S1, abs=1e-14)
    assert complex(v["s2"]) == pytest.approx(o.EX_S2, abs=1e-14)
    assert complex(v["phi_minus_i"]) == pytest.approx(o.EX_PHI_MINUS_I, abs=1e-14)


def test_szego_constant():
    assert float(-mp.pi * mp.log(mp.pi)) == pytest.approx(o.SZEGO_CONST, abs=1e-15)
