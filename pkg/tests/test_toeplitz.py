import numpy as np
import pytest
from conftest import random_triples
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as o
from dirac_toeplitz import dirac, gbdt
from dirac_toeplitz import numkernel as nk
from dirac_toeplitz import toeplitz as tp
from dirac_toeplitz.errors import InsufficientMoments, LambdaAtHalfI, LambdaMinusI, LambdaZero, ValidationError


def test_moment_data_validation():
    with pytest.raises(ValidationError):
        tp.MomentData.build([[1j]], [[[2.0]]])
    m = tp.MomentData.build([[0.0]], [[[2.0]], [[1 + 1j]]])
    assert m.block(1) == pytest.approx(np.array([[1 - 1j]]))
    assert m.truncate(0).K == 0


def test_assemble_trivial_n2():
    t = tp.assemble(tp.trivial_moments(1, 2), 2)
    assert np.allclose(t.S, 2 * np.eye(2))
    assert np.allclose(t.A, [[0.5j, 0], [1j, 0.5j]])
    assert np.allclose(t.Phi1, 1) and np.allclose(t.Phi2, 1)
    assert t.displacement_residual() == 0.0
    assert tp.assemble(tp.trivial_moments(1, 1), 1).displacement_residual() == 0.0


def test_assemble_example_n2(example):
    t = tp.assemble(gbdt.gbdt_moments(example, 1), 2)
    assert np.allclose(t.S, [[o.EX_S0, o.EX_S1], [o.EX_S1, o.EX_S0]], atol=1e-14)
    assert tp.positivity_check(t).positive


def test_block_convention():
    s = [np.array([[3.0]]), np.array([[1 + 2j]]), np.array([[0.5j]])]
    S = tp.block_toeplitz(tp.MomentData.build([[0.0]], s), 3)
    # block (i, k) holds s_{k-i}; below the diagonal k < i gives s_{-(i-k)}
    assert S[1, 0] == s[1][0, 0] and S[2, 0] == s[2][0, 0]
    assert S[0, 1] == np.conj(s[1][0, 0])


def test_insufficient_moments():
    with pytest.raises(InsufficientMoments):
        tp.assemble(tp.trivial_moments(1, 2), 4)


def test_positivity_examples(example):
    assert tp.positivity_check(tp.assemble(tp.trivial_moments(2, 5), 6)).min_pivot == pytest.approx(2.0)
    assert tp.positivity_check(tp.assemble(gbdt.gbdt_moments(example, 31), 32)).positive
    bad = tp.MomentData.build([[0.0]], [[[2.0]], [[3.0]]])
    v = tp.positivity_check(tp.assemble(bad, 2))
    assert not v.positive and v.failed_index == 1


def test_transfer_examples():
    t = tp.assemble(tp.trivial_moments(1, 0), 1)
    assert np.allclose(tp.transfer_function(t, -1j), o.TRANSFER_N1_MINUS_I, atol=1e-15)
    assert np.linalg.norm(tp.transfer_function(t, 1e8) - np.eye(2)) < 1e-7
    with pytest.raises(LambdaAtHalfI):
        tp.transfer_function(t, 0.5j)


def test_fundamental_from_moments_trivial():
    t = tp.assemble(tp.trivial_moments(1, 0), 1)
    assert np.allclose(tp.fundamental_from_moments(t, 2j), np.diag([0.5, 1.5]), atol=1e-15)
    assert np.allclose(tp.fundamental_from_moments(t, 3j), np.diag([2 / 3, 4 / 3]), atol=1e-15)
    with pytest.raises(LambdaZero):
        tp.fundamental_from_moments(t, 0)
    with pytest.raises(LambdaMinusI):
        tp.fundamental_from_moments(t, -1j)


def test_commuting_square(example, rng):
    for t in [example] + random_triples(5):
        pot = gbdt.gbdt_iterate(t, 12).potential
        m = gbdt.gbdt_moments(t, 12)
        for N in (1, 5, 12):
            sys_ = tp.assemble(m, N)
            for lam in rng.standard_normal(2) * 2 + 1j * rng.uniform(1.5, 4, 2):
                W = dirac.fundamental_solution(pot, lam, N)[N]
                assert nk.rel_residual(tp.fundamental_from_moments(sys_, lam), W) <= 1e-8


def test_frak_a_at_zero():
    t = tp.assemble(gbdt.gbdt_moments(random_triples(1)[0], 5), 6)
    assert np.allclose(tp.frak_A(t, 0), np.eye(2))


def test_cross_relation_trivial():
    t = tp.assemble(tp.trivial_moments(1, 0), 1)
    assert tp.frak_A_cross_residual(t, 2j) <= 1e-10


def _systems():
    out = [tp.assemble(tp.trivial_moments(p, 7), 8) for p in (1, 2)]
    for t in random_triples(5):
        out.append(tp.assemble(gbdt.gbdt_moments(t, 9), 10))
    return out


SYSTEMS = _systems()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, len(SYSTEMS) - 1),
       st.complex_numbers(min_magnitude=0.2, max_magnitude=8, allow_nan=False, allow_infinity=False))
def test_structure_identities(i, z):
    t = SYSTEMS[i]
    assert t.displacement_residual() <= 1e-10
    if abs(z - 0.5j) > 0.05 and abs(np.conj(z) - 0.5j) > 0.05:
        assert tp.transfer_j_residual(t, z, normalized=True) <= 1e-12
        # the plain residual is eps * ||w(z)|| ||w(conj z)||; check it where that product is moderate
        scale = np.linalg.norm(tp.transfer_function(t, z)) * np.linalg.norm(tp.transfer_function(t, np.conj(z)))
        if scale <= 1e4:
            assert tp.transfer_j_residual(t, z) <= 1e-9
    if min(abs(1 + 0.5j * z), abs(1 - 0.5j * z)) > 0.05:
        assert tp.frak_A_j_unitarity(t, z, normalized=True) <= 1e-12
        # away from the discs |z -+ 2i| < 2 the resolvent is bounded and the plain residual applies
        if min(abs(z - 2j), abs(z + 2j)) >= 2:
            assert tp.frak_A_j_unitarity(t, z) <= 1e-9
    lam = 2 / z
    if abs(lam + 1j) > 0.1 and abs(np.conj(lam) + 1j) > 0.1 and abs(1 + 0.5j * z) > 0.05:
        assert tp.frak_A_cross_residual(t, lam) <= 1e-8


def test_semiseparable_trivial_short_circuit(trivial):
    gen = gbdt.semiseparable_generators(trivial)
    x = np.arange(5, dtype=complex)
    assert np.allclose(tp.semiseparable_matvec(gen, np.zeros((1, 1)), 2 * np.eye(1), 5, x), 2 * x)


def test_semiseparable_first_column(example):
    m = gbdt.gbdt_moments(example, 7)
    S = tp.block_toeplitz(m, 8)
    e1 = np.zeros(8, dtype=complex)
    e1[0] = 1
    y = tp.semiseparable_matvec(gbdt.semiseparable_generators(example), m.nu, m.s[0], 8, e1)
    assert np.allclose(y, S[:, 0], atol=1e-14)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 4), st.integers(1, 64), st.integers(0, 2**32 - 1))
def test_semiseparable_matches_dense(i, N, seed):
    t = random_triples(5)[i]
    m = gbdt.gbdt_moments(t, N)
    r = np.random.default_rng(seed)
    x = r.standard_normal(N * t.p) + 1j * r.standard_normal(N * t.p)
    dense = tp.block_toeplitz(m, N) @ x
    fast = tp.semiseparable_matvec(gbdt.semiseparable_generators(t), m.nu, m.s[0], N, x)
    assert np.linalg.norm(fast - dense) <= 1e-10 * np.linalg.norm(dense)


def test_nu_changes_potential(example):
    # two moment sets differing only in nu: the recovered C_0 differ
    from dirac_toeplitz.inverse import recover_potential

    m = gbdt.gbdt_moments(example, 4)
    m2 = tp.MomentData(p=1, nu=m.nu + 0.3, s=m.s)
    a = recover_potential(m, 4).potential
    b = recover_potential(m2, 4).potential
    assert max(np.linalg.norm(x - y) for x, y in zip(a.C, b.C)) > 1e-3
