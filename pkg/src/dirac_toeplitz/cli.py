"""Command-line front end: generate, verify, inverse, cd-check, kernel-sweep, factorize, bench.

Exit codes: 0 success, 1 validation failure, 2 numerical failure, 3 I/O or parse error.
"""

import argparse
import sys
import timeit
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import io
from .dirac import DEFAULT_PROBES
from .errors import DiracToeplitzError, FormatError, NumericalError, ProximityWarning, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

# name -> (default, lower, upper)
TOLERANCES = {
    "identity": (1e-10, 0.0, 1e-2),
    "junit": (1e-10, 0.0, 1e-2),
    "displacement": (1e-10, 0.0, 1e-2),
    "cd": (1e-9, 0.0, 1e-2),
    "roundtrip": (1e-6, 0.0, 1.0),
    "agreement": (1e-9, 0.0, 1e-2),
    "factor": (1e-6, 0.0, 1e-1),
}
MAX_ORDER = 1 << 16
MAX_GRID = 1 << 20

KERNEL_HELP = """CSV columns: k, zeta_re, zeta_im, xi_re, xi_im, block, re, im and, for p = 1
with a triple as source, target_re, target_im.  One row per entry of
M(k, zeta, conj xi) for k = 1..kmax; rows sorted by k then block."""
BENCH_HELP = "CSV columns: " + ", ".join(io.BENCH_COLUMNS) + "."
SPECTRUM_HELP = "CSV columns: " + ", ".join(io.SPECTRUM_COLUMNS) + "."
DISK_HELP = "CSV columns: " + ", ".join(io.DISK_COLUMNS) + "."


class ConfigError(DiracToeplitzError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def parse_complex(text):
    """``"a,b"`` -> ``a + bi``; a single number is taken as real."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"cannot parse {text!r} as 'a,b'")


def parse_tol(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"tolerance {name!r} is not a number") from exc


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    output: str | None = None
    N: int | None = None
    K: int | None = None
    kmax: int | None = None
    grid: int | None = None
    zeta: complex | None = None
    xi: complex | None = None
    probes: tuple = DEFAULT_PROBES
    seed: int = 0
    threads: int = 1
    tol: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("N", "K", "kmax"):
            v = getattr(self, name)
            if v is not None and not 0 <= v <= MAX_ORDER:
                raise ConfigError(f"--{name} must lie in [0, {MAX_ORDER}]")
        if self.grid is not None and not (8 <= self.grid <= MAX_GRID and self.grid % 2 == 0):
            raise ConfigError(f"--grid must be an even integer in [8, {MAX_GRID}]")
        if self.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if self.seed < 0:
            raise ConfigError("--seed must be >= 0")
        if len(self.probes) != 2 or any(z == 0 for z in self.probes) or self.probes[0] == self.probes[1]:
            raise ConfigError("--probes needs two distinct nonzero points")
        tol = {}
        for name, value in self.tol.items():
            if name not in TOLERANCES:
                raise ConfigError(f"unknown tolerance {name!r}; known: {', '.join(sorted(TOLERANCES))}")
            _, lo, hi = TOLERANCES[name]
            if not lo <= value <= hi:
                raise ConfigError(f"tolerance {name}={value} outside [{lo}, {hi}]")
            tol[name] = value
        self.tol = tol

    def tolerance(self, name):
        return self.tol.get(name, TOLERANCES[name][0])

    def apply_threads(self):
        import numba

        # the TBB layer is not needed and warns on old installs
        numba.config.THREADING_LAYER = "workqueue"
        numba.set_num_threads(min(self.threads, numba.config.NUMBA_NUM_THREADS))


def _require(cfg, name):
    v = getattr(cfg, name)
    if v is None or v == []:
        raise ConfigError(f"{cfg.command} requires --{name if name != 'inputs' else 'input'}")
    return v


def _out(msg=""):
    print(msg, flush=True)


def cmd_generate(cfg):
    """Triple -> potential and moments files at ``<output>_potential.json``, ``<output>_moments.json``."""
    from .gbdt import gbdt_iterate, gbdt_moments

    t = io.load_triple(_require(cfg, "inputs")[0])
    N, K = _require(cfg, "N"), _require(cfg, "K")
    prefix = _require(cfg, "output")
    if N < 1:
        raise ConfigError("--N must be >= 1")
    it = gbdt_iterate(t, N - 1)
    pot = it.potential
    m = gbdt_moments(t, K)
    io.save_potential(f"{prefix}_potential.json", pot)
    io.save_moments(f"{prefix}_moments.json", m)
    _out(f"identity residual      {t.identity_residual():.3e}")
    _out(f"max C j C - j residual {max(pot.junit_residuals()):.3e}")
    _out(f"wrote {prefix}_potential.json ({N} blocks) and {prefix}_moments.json (K={K})")
    return EXIT_OK


def cmd_verify(cfg):
    from .toeplitz import assemble, positivity_check

    m = io.load_moments(_require(cfg, "inputs")[0])
    N = cfg.N if cfg.N is not None else m.K + 1
    t = assemble(m, N)
    verdict = positivity_check(t)
    res = t.displacement_residual()
    tol = cfg.tolerance("displacement")
    _out(f"N={N} p={m.p}")
    if verdict.positive:
        _out(f"positivity             pass (min pivot {verdict.min_pivot:.3e})")
    else:
        _out(f"positivity             FAIL (pivot index {verdict.failed_index})")
    _out(f"displacement residual  {res:.3e} ({'pass' if res <= tol else 'FAIL'}, tol {tol:g})")
    if cfg.output:
        io.write_csv(cfg.output, io.SPECTRUM_COLUMNS, io.spectrum_rows(m, [N]))
    if not verdict.positive:
        _out("failure: S(N) is not positive definite")
        return EXIT_VALIDATION
    if res > tol:
        _out("failure: displacement identity")
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_inverse(cfg):
    from .inverse import recover_potential

    m = io.load_moments(_require(cfg, "inputs")[0])
    N = cfg.N if cfg.N is not None else m.K
    rep = recover_potential(m, N, cfg.probes)
    _out(f"probes {', '.join(str(z) for z in rep.probes)}")
    _out(f"{'k':>4} {'probe spread':>14} {'CjC-j':>12}")
    for k, (a, b) in enumerate(zip(rep.lambda_residuals, rep.junit_residuals)):
        _out(f"{k:>4} {a:>14.3e} {b:>12.3e}")
    if rep.potential is not None and cfg.output:
        io.save_potential(cfg.output, rep.potential)
        _out(f"wrote {cfg.output} ({len(rep.potential)} blocks)")
    if not rep.complete:
        _out(f"failure at step {rep.stopped_at}: {rep.diagnostic}")
        return EXIT_VALIDATION
    worst = max(rep.lambda_residuals, default=0.0)
    tol = cfg.tolerance("roundtrip")
    if worst > tol:
        _out(f"failure: probe spread {worst:.3e} exceeds {tol:g}")
        return EXIT_NUMERICAL
    return EXIT_OK


def random_pairs(rng, trials):
    """Pairs ``(lam, mu)`` with moduli in ``[0.5, 3]``, kept away from ``lam mu = -1`` and ``lam = mu``."""
    out = []
    while len(out) < trials:
        r = rng.uniform(0.5, 3.0, 2)
        a = rng.uniform(0, 2 * np.pi, 2)
        lam, mu = r * np.exp(1j * a)
        if abs(1 + lam * mu) > 0.1 and abs(lam - mu) > 0.1:
            out.append((complex(lam), complex(mu)))
    return out


def cmd_cd_check(cfg):
    from .kernels import cd_residual

    pot = io.load_potential(_require(cfg, "inputs")[0])
    N = cfg.N if cfg.N is not None else len(pot) - 1
    if not 0 <= N < len(pot):
        raise ConfigError(f"--N must lie in [0, {len(pot) - 1}]")
    rng = np.random.default_rng(cfg.seed)
    res = [cd_residual(pot, lam, mu, N) for lam, mu in random_pairs(rng, cfg.trials)]
    worst = max(res)
    tol = cfg.tolerance("cd")
    _out(f"trials {cfg.trials} seed {cfg.seed} N {N}: max residual {worst:.3e} (tol {tol:g})")
    return EXIT_OK if worst <= tol else EXIT_VALIDATION


def _source(path):
    """A triple or a moments file, recognised by its fields."""
    obj = io.read_json(path)
    if isinstance(obj, dict) and "theta1" in obj:
        return io.triple_from_json(obj, str(path)), None
    return None, io.moments_from_json(obj, str(path))


def cmd_kernel_sweep(cfg):
    from .gbdt import gbdt_moments, gbdt_omega
    from .kernels import eval_M, weyl_disk
    from .szego import asymptotic_target, outer_factor_scalar
    from .toeplitz import assemble

    triple, m = _source(_require(cfg, "inputs")[0])
    kmax = _require(cfg, "kmax")
    zeta = cfg.zeta if cfg.zeta is not None else 1j
    xi = cfg.xi if cfg.xi is not None else zeta
    if triple is not None:
        m = gbdt_moments(triple, kmax)
    elif m.K < kmax - 1:
        raise ConfigError(f"moments file holds K={m.K}; --kmax {kmax} needs K >= {kmax - 1}")
    target = None
    if triple is not None and triple.p == 1:
        G = outer_factor_scalar(
            lambda s: np.imag(gbdt_omega(triple, s)) / np.pi, cfg.grid or 4096, tol=cfg.tolerance("factor")
        )
        target = asymptotic_target(lambda z: gbdt_omega(triple, z), G, zeta, xi)
    rows, disks = [], []
    for k in range(1, kmax + 1):
        t = assemble(m, k)
        kp = eval_M(t, zeta, np.conj(xi), check=False)
        for r in io.kernel_rows(kp, m.p):
            if target is not None:
                v = target.reshape(-1)[("M11", "M12", "M21", "M22").index(r[5])]
                r = r + (float(v.real), float(v.imag))
            rows.append(r)
        if cfg.disk_output:
            disks.append(weyl_disk(t, zeta))
    header = io.KERNEL_COLUMNS + (("target_re", "target_im") if target is not None else ())
    io.write_csv(_require(cfg, "output"), header, rows)
    if cfg.disk_output:
        io.write_csv(cfg.disk_output, io.DISK_COLUMNS, io.disk_rows(disks))
    last = [r for r in rows if r[0] == kmax]
    _out(f"wrote {len(rows)} rows for k = 1..{kmax}")
    if target is not None:
        M = np.array([complex(r[6], r[7]) for r in last]).reshape(2, 2)
        _out(f"||M(kmax) - target|| = {np.linalg.norm(M - target):.3e}")
    return EXIT_OK


def cmd_factorize(cfg):
    from .gbdt import gbdt_omega
    from .szego import outer_factor_scalar, szego_integral

    t = io.load_triple(_require(cfg, "inputs")[0])
    if t.p != 1:
        raise ValidationError("factorization is implemented for p = 1 only")
    M = cfg.grid or 4096

    def density(s):
        return np.imag(gbdt_omega(t, s)) / np.pi

    value = szego_integral(density, M)
    G = outer_factor_scalar(density, M, tol=cfg.tolerance("factor"))
    _out(f"Szego integral {value:.12f}")
    _out(f"boundary check max | |G|^2 - density | / density = {G.boundary_error:.3e}")
    if cfg.output:
        io.write_json(cfg.output, G.to_json())
    return EXIT_OK


def bench_generators(n, p, seed):
    from .gbdt import example_triple, random_triple, semiseparable_generators

    t = example_triple() if (n, p) == (1, 1) else random_triple(np.random.default_rng(seed), n, p)
    return t, semiseparable_generators(t)


def bench_rows(n, p, Ns, reps, seed=0, tol=1e-9):
    """Dense versus semiseparable ``S(N) x``; raises if the two disagree beyond ``tol``."""
    from .gbdt import gbdt_moments
    from .toeplitz import block_toeplitz, semiseparable_matvec

    t, gen = bench_generators(n, p, seed)
    m = gbdt_moments(t, max(Ns))
    rng = np.random.default_rng(seed)
    rows = []
    for N in Ns:
        S = block_toeplitz(m, N)
        x = rng.standard_normal(N * p) + 1j * rng.standard_normal(N * p)
        dense = S @ x
        fast = semiseparable_matvec(gen, m.nu, m.s[0], N, x)
        diff = float(np.linalg.norm(fast - dense) / max(np.linalg.norm(dense), 1e-300))
        if diff > tol:
            raise NumericalError(f"semiseparable and dense products differ by {diff:.3e} at N={N}")
        td = min(timeit.repeat(lambda: S @ x, number=1, repeat=reps))
        ts = min(timeit.repeat(lambda: semiseparable_matvec(gen, m.nu, m.s[0], N, x), number=1, repeat=reps))
        rows.append((N, n, p, td, ts, td / ts, diff))
    return rows


def cmd_bench(cfg):
    Ns = cfg.Ns or [256, 1024, 4096]
    rows = bench_rows(cfg.n, cfg.p, Ns, cfg.reps, cfg.seed, cfg.tolerance("agreement"))
    for r in rows:
        _out(f"N={r[0]:>6} dense {r[3]:.3e}s semiseparable {r[4]:.3e}s speedup {r[5]:.1f}x")
    if cfg.output:
        io.write_csv(cfg.output, io.BENCH_COLUMNS, rows)
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "inverse": cmd_inverse,
    "cd-check": cmd_cd_check,
    "kernel-sweep": cmd_kernel_sweep,
    "factorize": cmd_factorize,
    "bench": cmd_bench,
}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("-i", "--input", action="append", default=[], help="input file (JSON)")
    common.add_argument("-o", "--output", help="output file or prefix")
    common.add_argument("--N", type=int)
    common.add_argument("--K", type=int)
    common.add_argument("--kmax", type=int)
    common.add_argument("--grid", type=int, metavar="M", help="factorization grid size")
    common.add_argument("--zeta", type=parse_complex, metavar="a,b")
    common.add_argument("--xi", type=parse_complex, metavar="a,b")
    common.add_argument("--probes", type=parse_complex, nargs=2, metavar="a,b")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--tol", type=parse_tol, action="append", default=[], metavar="name=value",
                        help="override a tolerance; names: " + ", ".join(sorted(TOLERANCES)))

    ap = _Parser(prog="dirac-toeplitz", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("generate", parents=[common], help="triple -> potential and moments files")
    sub.add_parser("verify", parents=[common], help="positivity and displacement check of a moments file",
                   epilog="With -o the spectrum of S(N) is written. " + SPECTRUM_HELP)
    sub.add_parser("inverse", parents=[common], help="moments -> potential")
    p = sub.add_parser("cd-check", parents=[common], help="Christoffel-Darboux identity on random pairs")
    p.add_argument("--trials", type=int, default=100)
    p = sub.add_parser("kernel-sweep", parents=[common], help="kernel values M(k, zeta, conj xi) as CSV",
                       epilog=KERNEL_HELP + " " + DISK_HELP.replace("CSV", "--disk-output"),
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--disk-output", help="also write Weyl disk radii per order")
    sub.add_parser("factorize", parents=[common], help="outer factor of the spectral density (p = 1)")
    p = sub.add_parser("bench", parents=[common], help="dense vs semiseparable matvec timings",
                       epilog=BENCH_HELP)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--Ns", type=int, nargs="+", metavar="N")
    p.add_argument("--reps", type=int, default=5)
    return ap


def config_from_args(ns):
    cfg = RunConfig(
        command=ns.command,
        inputs=ns.input,
        output=ns.output,
        N=ns.N,
        K=ns.K,
        kmax=ns.kmax,
        grid=ns.grid,
        zeta=ns.zeta,
        xi=ns.xi,
        probes=tuple(ns.probes) if ns.probes else DEFAULT_PROBES,
        seed=ns.seed,
        threads=ns.threads,
        tol=dict(ns.tol),
    )
    for extra in ("trials", "disk_output", "n", "p", "Ns", "reps"):
        setattr(cfg, extra, getattr(ns, extra, None))
    if cfg.command == "cd-check" and cfg.trials < 1:
        raise ConfigError("--trials must be >= 1")
    if cfg.command == "bench":
        if cfg.n < 1 or cfg.p < 1 or cfg.reps < 1 or (cfg.Ns and min(cfg.Ns) < 1):
            raise ConfigError("--n, --p, --reps and --Ns must be positive")
    return cfg


def main(argv=None):
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        cfg.apply_threads()
        with warnings.catch_warnings():
            warnings.simplefilter("always", ProximityWarning)
            return COMMANDS[cfg.command](cfg)
    except (ConfigError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
