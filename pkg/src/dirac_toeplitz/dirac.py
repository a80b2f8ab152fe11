"""Self-adjoint discrete Dirac systems.

The system is ``y_{k+1} = (I - (i/lam) j C_k) y_k`` with ``C_k > 0`` and
``C_k j C_k = j``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import numkernel as nk
from .errors import (
    JUnitarityBroken,
    LambdaAtSingularity,
    LambdaNotInLowerHalfPlane,
    LambdaZero,
    NotHermitian,
    NotPD,
    NotPositiveDefinite,
    ShapeError,
)

TOL_JUNIT = 1e-10
DEFAULT_PROBES = (6j, 10j)


@dataclass(frozen=True)
class SignatureConstants:
    """The fixed ``2p x 2p`` matrices ``j``, ``J`` and ``K``."""

    p: int
    j: np.ndarray
    J: np.ndarray
    K: np.ndarray


@lru_cache(maxsize=32)
def signature(p):
    eye = np.eye(p, dtype=np.complex128)
    zero = np.zeros((p, p), dtype=np.complex128)
    j = np.block([[eye, zero], [zero, -eye]])
    J = np.block([[zero, eye], [eye, zero]])
    K = np.block([[eye, -eye], [eye, eye]]) / np.sqrt(2.0)
    for m in (j, J, K):
        m.setflags(write=False)
    return SignatureConstants(p=p, j=j, J=J, K=K)


@dataclass(frozen=True)
class Potential:
    """Validated potential ``C_0 .. C_{N-1}``."""

    p: int
    C: tuple

    def __len__(self):
        return len(self.C)

    def __getitem__(self, k):
        return self.C[k]

    def junit_residuals(self):
        j = signature(self.p).j
        return [j_residual(c, j) for c in self.C]


def j_residual(C, j):
    return nk.rel_residual(C @ j @ C, j)


def validate_potential(C, *, tol_junit=TOL_JUNIT, tol_herm=nk.TOL_HERM):
    """Check ``C_k > 0`` and ``C_k j C_k = j`` for every block.

    Raises :class:`NotPD` or :class:`JUnitarityBroken` naming the first bad index.
    """
    mats = [nk.cmatrix(c) for c in C]
    if not mats:
        raise ShapeError("potential must contain at least one matrix")
    size = mats[0].shape[0]
    if size % 2 or any(m.shape != (size, size) for m in mats):
        raise ShapeError("every C_k must be square of the same even size 2p")
    p = size // 2
    j = signature(p).j
    for k, m in enumerate(mats):
        try:
            nk.cholesky_pd(m, tol_herm=tol_herm)
        except (NotHermitian, NotPositiveDefinite) as exc:
            raise NotPD(k) from exc
        res = j_residual(m, j)
        if res > tol_junit:
            raise JUnitarityBroken(k, res)
    return Potential(p=p, C=tuple(mats))


def step_matrix(C, lam, j):
    return np.eye(C.shape[0], dtype=np.complex128) - (1j / lam) * (j @ C)


def fundamental_solution(pot, lam, N=None):
    """Return ``[W_0(lam), ..., W_N(lam)]`` with ``W_0 = I``."""
    lam = complex(lam)
    if lam == 0:
        raise LambdaZero()
    if N is None:
        N = len(pot)
    if N > len(pot):
        raise ValueError(f"N={N} exceeds potential length {len(pot)}")
    j = signature(pot.p).j
    W = [np.eye(2 * pot.p, dtype=np.complex128)]
    for k in range(N):
        W.append(step_matrix(pot.C[k], lam, j) @ W[-1])
    return W


def det_law(lam, k, p):
    """Closed form ``((lam^2 + 1) / lam^2)^(k p)`` of ``det W_k(lam)``."""
    lam = complex(lam)
    return ((lam * lam + 1) / (lam * lam)) ** (k * p)


def extract_potential_step(W_k, W_next, lam):
    """Invert one step of the recursion: ``C_k = -i lam j (I - W_next W_k^{-1})``."""
    lam = complex(lam)
    if lam == 0 or abs(lam - 1j) < 1e-14 or abs(lam + 1j) < 1e-14:
        raise LambdaAtSingularity(lam)
    W_k = nk.cmatrix(W_k)
    W_next = nk.cmatrix(W_next)
    p = W_k.shape[0] // 2
    j = signature(p).j
    step = nk.right_divide(W_next, W_k)
    C = -1j * lam * (j @ (np.eye(2 * p) - step))
    return C


@dataclass(frozen=True)
class WeylSeries:
    partial_sums: list
    traces: np.ndarray
    saturation_ratio: float


def weyl_series_partial_sums(pot, phi, lam, K):
    """Partial sums of the weighted series that defines the Weyl function.

    ``phi`` is a callable returning a ``p x p`` matrix.  The saturation ratio
    is ``(trace of the last term) / (trace of the last partial sum)``; values
    near zero suggest the series is levelling off.  It is a diagnostic only.
    """
    lam = complex(lam)
    if not lam.imag < 0:
        raise LambdaNotInLowerHalfPlane(lam)
    if K >= len(pot):
        raise ValueError(f"K={K} needs C_0..C_{K}; potential has {len(pot)} blocks")
    p = pot.p
    sig = signature(p)
    f = nk.cmatrix(phi(lam), shape=(p, p))
    eye = np.eye(p)
    left = np.hstack([1j * nk.conj_transpose(f), eye])
    right = np.vstack([-1j * f, eye])
    q = abs(lam * lam) / (abs(lam * lam) + 1)
    W = fundamental_solution(pot, lam, K)
    total = np.zeros((p, p), dtype=np.complex128)
    sums, traces = [], []
    last = 0.0
    for k in range(K + 1):
        term = left @ sig.K @ nk.conj_transpose(W[k]) @ pot.C[k] @ W[k] @ nk.conj_transpose(sig.K) @ right
        term = (q ** k) * nk.hermitian_part(term)
        total = total + term
        sums.append(total.copy())
        traces.append(np.trace(total).real)
        last = np.trace(term).real
    ratio = last / traces[-1] if traces[-1] else 0.0
    return WeylSeries(partial_sums=sums, traces=np.array(traces), saturation_ratio=float(ratio))


def c3_residual(pot, lam, mu, k):
    """Residual of the one-step relation for ``W_k(conj mu)^* j W_k(lam)``.

    ``W_{k+1}(mu~)^* j W_{k+1}(lam) = W_k(mu~)^* (j / c + i (lam - mu)/(lam mu) C_k) W_k(lam)``
    with ``c = lam mu / (1 + lam mu)`` and ``mu~ = conj(mu)``.
    """
    lam, mu = complex(lam), complex(mu)
    j = signature(pot.p).j
    Wl = fundamental_solution(pot, lam, k + 1)
    Wm = fundamental_solution(pot, np.conj(mu), k + 1)
    c = lam * mu / (1 + lam * mu)
    lhs = nk.conj_transpose(Wm[k + 1]) @ j @ Wl[k + 1]
    rhs = nk.conj_transpose(Wm[k]) @ (j / c + 1j * (lam - mu) / (lam * mu) * pot.C[k]) @ Wl[k]
    return nk.rel_residual(lhs, rhs)


def hyperbolic(r, p=1):
    """``[[cosh r, sinh r], [sinh r, cosh r]]`` blockwise; satisfies ``H j H = j``."""
    eye = np.eye(p)
    return np.block([[np.cosh(r) * eye, np.sinh(r) * eye], [np.sinh(r) * eye, np.cosh(r) * eye]]).astype(np.complex128)


def random_potential(rng, p, N, scale=0.5):
    """``C_k = exp(X_k)`` with ``X_k = [[0, B], [B^*, 0]]``; ``X j = -j X`` gives ``C j C = j``."""
    import scipy.linalg as sla

    Cs = []
    for _ in range(N):
        B = scale * (rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))) / np.sqrt(2 * p)
        zero = np.zeros((p, p))
        X = np.block([[zero, B], [nk.conj_transpose(B), zero]])
        Cs.append(nk.hermitian_part(sla.expm(X)))
    return validate_potential(Cs)


def trivial_potential(p, N):
    return Potential(p=p, C=tuple(np.eye(2 * p, dtype=np.complex128) for _ in range(N)))


__all__ = [
    "DEFAULT_PROBES",
    "Potential",
    "SignatureConstants",
    "c3_residual",
    "det_law",
    "extract_potential_step",
    "fundamental_solution",
    "hyperbolic",
    "random_potential",
    "signature",
    "trivial_potential",
    "validate_potential",
    "weyl_series_partial_sums",
]
