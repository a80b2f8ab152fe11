"""JSON and CSV formats.

Complex scalars are ``[re, im]`` pairs in JSON and two columns in CSV.
Matrices are arrays of rows.
"""

import csv
import json

import numpy as np

from .dirac import Potential, validate_potential
from .errors import FormatError
from .gbdt import validate_triple
from .toeplitz import MomentData


def encode_matrix(m):
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(obj, what="matrix"):
    try:
        a = np.asarray(obj, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what}: entries must be [re, im] pairs") from exc
    if a.ndim != 3 or a.shape[2] != 2:
        raise FormatError(f"{what}: expected rows of [re, im] pairs, got array of shape {a.shape}")
    return a[..., 0] + 1j * a[..., 1]


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from exc


def write_json(path, obj):
    try:
        with open(path, "w") as fh:
            json.dump(obj, fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from exc


def _field(obj, key, path):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"{path}: missing field {key!r}")
    return obj[key]


def potential_to_json(pot):
    return {"p": pot.p, "C": [encode_matrix(c) for c in pot.C]}


def potential_from_json(obj, path="<potential>"):
    p = int(_field(obj, "p", path))
    C = [decode_matrix(c, f"{path}: C[{k}]") for k, c in enumerate(_field(obj, "C", path))]
    for k, c in enumerate(C):
        if c.shape != (2 * p, 2 * p):
            raise FormatError(f"{path}: C[{k}] has shape {c.shape}, expected {(2 * p, 2 * p)}")
    return validate_potential(C)


def moments_to_json(m):
    return {"p": m.p, "nu": encode_matrix(m.nu), "s": [encode_matrix(b) for b in m.s]}


def moments_from_json(obj, path="<moments>"):
    p = int(_field(obj, "p", path))
    nu = decode_matrix(_field(obj, "nu", path), f"{path}: nu")
    s = [decode_matrix(b, f"{path}: s[{k}]") for k, b in enumerate(_field(obj, "s", path))]
    if not s:
        raise FormatError(f"{path}: s must contain at least s_0")
    for name, b in [("nu", nu)] + [(f"s[{k}]", b) for k, b in enumerate(s)]:
        if b.shape != (p, p):
            raise FormatError(f"{path}: {name} has shape {b.shape}, expected {(p, p)}")
    return MomentData.build(nu, s)


def triple_to_json(t):
    return {
        "n": t.n,
        "p": t.p,
        "A": encode_matrix(t.A),
        "S0": encode_matrix(t.S0),
        "theta1": encode_matrix(t.theta1),
        "theta2": encode_matrix(t.theta2),
    }


def triple_from_json(obj, path="<triple>"):
    n = int(_field(obj, "n", path))
    p = int(_field(obj, "p", path))
    mats = {k: decode_matrix(_field(obj, k, path), f"{path}: {k}") for k in ("A", "S0", "theta1", "theta2")}
    for k, shape in (("A", (n, n)), ("S0", (n, n)), ("theta1", (n, p)), ("theta2", (n, p))):
        if mats[k].shape != shape:
            raise FormatError(f"{path}: {k} has shape {mats[k].shape}, expected {shape}")
    return validate_triple(mats["A"], mats["S0"], mats["theta1"], mats["theta2"])


def load_potential(path):
    return potential_from_json(read_json(path), str(path))


def load_moments(path):
    return moments_from_json(read_json(path), str(path))


def load_triple(path):
    return triple_from_json(read_json(path), str(path))


def save_potential(path, pot):
    if not isinstance(pot, Potential):
        pot = validate_potential(pot)
    write_json(path, potential_to_json(pot))


def save_moments(path, m):
    write_json(path, moments_to_json(m))


def save_triple(path, t):
    write_json(path, triple_to_json(t))


def write_csv(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for r in rows:
                w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from exc


def read_csv(path):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from exc
    return rows[0], rows[1:]


SPECTRUM_COLUMNS = ("N", "index", "eigenvalue")
KERNEL_COLUMNS = ("k", "zeta_re", "zeta_im", "xi_re", "xi_im", "block", "re", "im")
DISK_COLUMNS = ("N", "zeta_re", "zeta_im", "trace_lambda_l", "trace_lambda_r")
CONVERGENCE_COLUMNS = ("k", "error", "trace_lambda_l", "radius_error")
BENCH_COLUMNS = ("N", "n", "p", "dense_seconds", "semiseparable_seconds", "speedup", "max_rel_diff")


def spectrum_rows(m, Ns):
    from .toeplitz import block_toeplitz

    for N in Ns:
        ev = np.linalg.eigvalsh(block_toeplitz(m, N))
        for i, v in enumerate(ev):
            yield N, i, float(v)


def kernel_rows(point, p):
    """Rows ``(k, zeta, xi, block, re, im)`` for every entry of the four ``p x p`` blocks."""
    names = ("M11", "M12", "M21", "M22")
    for b, name in enumerate(names):
        blk = point.block(b // 2, b % 2)
        for (r, c), v in np.ndenumerate(blk):
            label = name if p == 1 else f"{name}[{r},{c}]"
            yield (
                point.k,
                float(point.zeta.real), float(point.zeta.imag),
                float(point.xi.real), float(point.xi.imag),
                label, float(v.real), float(v.imag),
            )


def disk_rows(disks):
    for d in disks:
        yield (
            d.N, float(d.zeta.real), float(d.zeta.imag),
            float(np.trace(d.Lambda_l).real), float(np.trace(d.Lambda_r).real),
        )


def convergence_rows(report):
    for r in report:
        yield r.k, r.error, r.trace_lambda_l, r.radius_error
