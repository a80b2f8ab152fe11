import csv
import json

import numpy as np
import pytest

import oracles as o
from dirac_toeplitz import cli, dirac, gbdt, io
from dirac_toeplitz.errors import FormatError


@pytest.fixture
def files(tmp_path, example, trivial):
    io.save_triple(tmp_path / "ex.json", example)
    io.save_triple(tmp_path / "triv.json", trivial)
    return tmp_path


def run(*args):
    return cli.main([str(a) for a in args])


def test_round_trip_formats(tmp_path, example):
    pot = gbdt.gbdt_iterate(example, 3).potential
    io.save_potential(tmp_path / "p.json", pot)
    back = io.load_potential(tmp_path / "p.json")
    assert all(np.array_equal(a, b) for a, b in zip(pot.C, back.C))
    m = gbdt.gbdt_moments(example, 4)
    io.save_moments(tmp_path / "m.json", m)
    mb = io.load_moments(tmp_path / "m.json")
    assert all(np.array_equal(a, b) for a, b in zip(m.s, mb.s))
    io.save_triple(tmp_path / "t.json", example)
    tb = io.load_triple(tmp_path / "t.json")
    assert np.array_equal(tb.A, example.A)


def test_complex_encoding():
    assert io.encode_matrix([[1 + 2j]]) == [[[1.0, 2.0]]]
    with pytest.raises(FormatError):
        io.decode_matrix([[1.0, 2.0]])


def test_missing_field(tmp_path):
    (tmp_path / "m.json").write_text(json.dumps({"p": 1, "s": []}))
    with pytest.raises(FormatError, match="nu"):
        io.load_moments(tmp_path / "m.json")


def test_generate_trivial(files, capsys):
    assert run("generate", "-i", files / "triv.json", "--N", 8, "--K", 8, "-o", files / "t") == 0
    pot = io.load_potential(files / "t_potential.json")
    assert len(pot) == 8 and all(np.allclose(c, np.eye(2)) for c in pot.C)
    m = io.load_moments(files / "t_moments.json")
    assert np.allclose(m.s[0], 2) and np.allclose(m.nu, 0) and all(np.allclose(s, 0) for s in m.s[1:])
    assert "identity residual" in capsys.readouterr().out


def test_generate_example(files):
    assert run("generate", "-i", files / "ex.json", "--N", 8, "--K", 8, "-o", files / "e") == 0
    m = io.load_moments(files / "e_moments.json")
    assert m.s[0][0, 0] == pytest.approx(o.EX_S0) and m.s[2][0, 0] == pytest.approx(o.EX_S2)
    pot = io.load_potential(files / "e_potential.json")
    assert np.allclose(pot.C, gbdt.gbdt_iterate(gbdt.example_triple(), 7).C)


def test_malformed_json_exit_3(tmp_path, capsys):
    (tmp_path / "bad.json").write_text('{"n": 1,\n  "p": }')
    assert run("generate", "-i", tmp_path / "bad.json", "--N", 2, "--K", 2, "-o", tmp_path / "x") == 3
    assert "line 2" in capsys.readouterr().err


def test_invalid_triple_exit_1(tmp_path):
    (tmp_path / "t.json").write_text(json.dumps(
        {"n": 1, "p": 1, "A": [[[1, 0]]], "S0": [[[1, 0]]], "theta1": [[[1, 0]]], "theta2": [[[0, 0]]]}))
    assert run("generate", "-i", tmp_path / "t.json", "--N", 2, "--K", 2, "-o", tmp_path / "x") == 1


def test_verify(files, capsys):
    run("generate", "-i", files / "triv.json", "--N", 4, "--K", 4, "-o", files / "t")
    assert run("verify", "-i", files / "t_moments.json") == 0
    run("generate", "-i", files / "ex.json", "--N", 2, "--K", 32, "-o", files / "e")
    capsys.readouterr()
    assert run("verify", "-i", files / "e_moments.json", "--N", 32, "-o", files / "spectrum.csv") == 0
    res = float(capsys.readouterr().out.split("displacement residual")[1].split()[0])
    assert res <= 1e-10
    header, rows = io.read_csv(files / "spectrum.csv")
    assert header == list(io.SPECTRUM_COLUMNS) and len(rows) == 32
    bad = io.MomentData.build([[0]], [[[2]], [[3]]])
    io.save_moments(files / "bad.json", bad)
    assert run("verify", "-i", files / "bad.json") == 1


def test_inverse(files, capsys):
    run("generate", "-i", files / "triv.json", "--N", 4, "--K", 4, "-o", files / "t")
    assert run("inverse", "-i", files / "t_moments.json", "--N", 4, "-o", files / "rec.json") == 0
    assert all(np.allclose(c, np.eye(2), atol=1e-12) for c in io.load_potential(files / "rec.json").C)
    run("generate", "-i", files / "ex.json", "--N", 21, "--K", 20, "-o", files / "e")
    assert run("inverse", "-i", files / "e_moments.json", "--N", 20, "-o", files / "rec.json") == 0
    a = io.load_potential(files / "rec.json").C
    b = io.load_potential(files / "e_potential.json").C
    assert max(np.linalg.norm(x - y) / np.linalg.norm(y) for x, y in zip(a, b)) <= 1e-6
    bad = io.MomentData.build([[0]], [[[2]], [[3]], [[0]]])
    io.save_moments(files / "bad.json", bad)
    capsys.readouterr()
    assert run("inverse", "-i", files / "bad.json", "--N", 2) == 1
    assert "failure at step 1" in capsys.readouterr().out


def test_inverse_probes_flag(files):
    run("generate", "-i", files / "ex.json", "--N", 2, "--K", 6, "-o", files / "e")
    assert run("inverse", "-i", files / "e_moments.json", "--probes", "0,2", "0,3") == 0
    assert run("inverse", "-i", files / "e_moments.json", "--probes", "0,2", "0,2") == 3


def test_cd_check(files, tmp_path):
    io.save_potential(tmp_path / "triv.json", dirac.trivial_potential(1, 5))
    assert run("cd-check", "-i", tmp_path / "triv.json", "--trials", 20) == 0
    io.save_potential(tmp_path / "hyp.json", dirac.validate_potential([dirac.hyperbolic(0.7), dirac.hyperbolic(-0.3)]))
    assert run("cd-check", "-i", tmp_path / "hyp.json", "--seed", 4) == 0
    run("generate", "-i", files / "ex.json", "--N", 21, "--K", 2, "-o", files / "e")
    assert run("cd-check", "-i", files / "e_potential.json", "--N", 20) == 0


def test_kernel_sweep_trivial(files):
    run("generate", "-i", files / "triv.json", "--N", 2, "--K", 4, "-o", files / "t")
    out = files / "k.csv"
    assert run("kernel-sweep", "-i", files / "t_moments.json", "--zeta", "0,1", "--kmax", 3, "-o", out,
               "--disk-output", files / "d.csv") == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    m22 = [float(r["re"]) for r in rows if r["block"] == "M22"]
    assert m22[0] == pytest.approx(o.M22_1) and m22[1] == pytest.approx(o.M22_2)
    assert [int(r["k"]) for r in rows] == sorted(int(r["k"]) for r in rows)
    header, drows = io.read_csv(files / "d.csv")
    assert float(drows[0][3]) == pytest.approx(0.5) and float(drows[1][3]) == pytest.approx(o.LAMBDA_L_2)


def test_kernel_sweep_triple_target(files, capsys):
    out = files / "k.csv"
    assert run("kernel-sweep", "-i", files / "triv.json", "--zeta", "0,1", "--kmax", 10, "-o", out) == 0
    with open(out) as fh:
        rows = [r for r in csv.DictReader(fh) if r["k"] == "10"]
    for r in rows:
        assert float(r["target_re"]) == pytest.approx(0.5)
        assert abs(complex(float(r["re"]), float(r["im"])) - 0.5) <= 1e-6


def test_kernel_sweep_proximity_warning(files, capsys):
    run("generate", "-i", files / "triv.json", "--N", 2, "--K", 4, "-o", files / "t")
    with pytest.warns(Warning, match="2i"):
        assert run("kernel-sweep", "-i", files / "t_moments.json", "--zeta", "0,2.05", "--kmax", 2,
                   "-o", files / "k.csv") == 0


def test_factorize(files, capsys):
    assert run("factorize", "-i", files / "ex.json", "--grid", 1024, "-o", files / "f.json") == 0
    dump = json.loads((files / "f.json").read_text())
    assert dump["M"] == 1024 and len(dump["theta"]) == len(dump["logW"]) == len(dump["G_boundary"]) == 1024


def test_bench(tmp_path):
    out = tmp_path / "b.csv"
    assert run("bench", "--Ns", 64, 256, "--reps", 2, "-o", out) == 0
    header, rows = io.read_csv(out)
    assert header == list(io.BENCH_COLUMNS) and len(rows) == 2
    assert all(float(r[6]) <= 1e-9 for r in rows)
    assert run("bench", "--n", 2, "--p", 2, "--Ns", 32, "--reps", 1) == 0


def test_bench_trivial_generators_short_circuit():
    from dirac_toeplitz import toeplitz as tp

    gen = gbdt.semiseparable_generators(gbdt.trivial_triple())
    x = np.ones(16, dtype=complex)
    assert np.allclose(tp.semiseparable_matvec(gen, np.zeros((1, 1)), 2 * np.eye(1), 16, x), 2)


@pytest.mark.parametrize("argv", [
    ["verify", "--tol", "bogus=1"],
    ["verify", "--tol", "cd=5"],
    ["verify", "--N", "-1"],
    ["bench", "--grid", "7"],
    ["verify", "--zeta", "a,b"],
])
def test_config_rejections(argv, files):
    if "-i" not in argv and argv[0] == "verify":
        argv = argv + ["-i", str(files / "ex.json")]
    with pytest.raises(SystemExit) as exc:
        code = cli.main(argv)
        raise SystemExit(code)
    assert exc.value.code == 3


def test_missing_input_file(tmp_path):
    assert run("verify", "-i", tmp_path / "nope.json") == 3


def test_help_documents_columns(capsys):
    with pytest.raises(SystemExit):
        cli.main(["kernel-sweep", "--help"])
    out = capsys.readouterr().out
    assert "target_re" in out and "trace_lambda_l" in out
