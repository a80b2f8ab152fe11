"""Block Toeplitz side of the correspondence.

Block convention: ``S(N)`` block ``(i, k)`` holds ``s_{k-i}`` for
``i, k = 1..N`` and ``s_k = s_{-k}^*`` for ``k > 0``.  Moment sequences are
stored as ``s[0] = s_0, s[k] = s_{-k}``.
"""

from dataclasses import dataclass
from functools import cached_property

import numba
import numpy as np
import scipy.linalg as sla

from . import numkernel as nk
from .dirac import signature
from .errors import (
    InsufficientMoments,
    LambdaAtHalfI,
    LambdaMinusI,
    LambdaZero,
    NotHermitian,
    NotPositiveDefinite,
    ResolventSingular,
    ValidationError,
)

TOL_DISPLACEMENT = 1e-10
TOL_RESOLVENT = 1e-13


@dataclass(frozen=True)
class MomentData:
    p: int
    nu: np.ndarray
    s: tuple

    def __post_init__(self):
        if nk.hermitian_residual(self.nu) > nk.TOL_HERM:
            raise ValidationError("nu must be Hermitian")
        if nk.hermitian_residual(self.s[0]) > nk.TOL_HERM:
            raise ValidationError("s_0 must be Hermitian")

    @classmethod
    def build(cls, nu, s):
        s = tuple(nk.cmatrix(b) for b in s)
        p = s[0].shape[0]
        nu = nk.cmatrix(nu, shape=(p, p))
        for b in s:
            if b.shape != (p, p):
                raise ValidationError(f"moment block has shape {b.shape}, expected {(p, p)}")
        return cls(p=p, nu=nu, s=s)

    @property
    def K(self):
        """Largest available index k of ``s_{-k}``."""
        return len(self.s) - 1

    def block(self, k):
        """``s_k`` for any integer ``k`` with ``|k| <= K``."""
        if k <= 0:
            return self.s[-k]
        return nk.conj_transpose(self.s[k])

    def truncate(self, K):
        return MomentData(p=self.p, nu=self.nu, s=self.s[: K + 1])


def trivial_moments(p, K):
    eye = np.eye(p, dtype=np.complex128)
    zero = np.zeros((p, p), dtype=np.complex128)
    return MomentData(p=p, nu=zero, s=(2 * eye,) + (zero,) * K)


def block_toeplitz(m, N):
    p = m.p
    # blocks s_{-(N-1)} .. s_0 .. s_{N-1}, indexed by k - i + N - 1
    lower = np.stack(m.s[:N][::-1])
    upper = np.conj(np.transpose(np.stack(m.s[1:N]), (0, 2, 1))) if N > 1 else np.empty((0, p, p))
    diag = np.concatenate([lower, upper])
    idx = np.arange(N)[None, :] - np.arange(N)[:, None] + N - 1
    return diag[idx].transpose(0, 2, 1, 3).reshape(N * p, N * p).astype(np.complex128)


def structure_matrix(N, p):
    """``A(N)``: ``(i/2) I`` on the block diagonal, ``i I`` below, zero above."""
    a = np.tril(np.full((N, N), 1j), -1) + 0.5j * np.eye(N)
    return np.kron(a, np.eye(p)).astype(np.complex128)


@dataclass(frozen=True)
class ToeplitzSystem:
    N: int
    p: int
    S: np.ndarray
    A: np.ndarray
    Phi1: np.ndarray
    Phi2: np.ndarray
    nu: np.ndarray

    @property
    def Pi(self):
        return np.hstack([self.Phi1, self.Phi2])

    @cached_property
    def chol(self):
        """Cholesky certificate of ``S``; raises if ``S`` is not positive definite."""
        return nk.cholesky_pd(self.S)

    def displacement_residual(self):
        J = signature(self.p).J
        Pi = self.Pi
        lhs = self.A @ self.S - self.S @ nk.conj_transpose(self.A)
        rhs = 1j * Pi @ J @ nk.conj_transpose(Pi)
        return nk.rel_residual(lhs, rhs, scale=np.linalg.norm(self.S))

    def shifted_solve(self, mu, rhs):
        """``(I + mu A)^{-1} rhs``; the matrix is lower triangular."""
        mu = complex(mu)
        d = 1 + 0.5j * mu
        if abs(d) < TOL_RESOLVENT:
            raise ResolventSingular(mu)
        M = np.eye(self.N * self.p) + mu * self.A
        return sla.solve_triangular(M, rhs, lower=True)

    def kernel_core(self, zeta, xi, left, right):
        """``left^* (I + zeta A^*)^{-1} S^{-1} (I + xi A)^{-1} right``."""
        y = self.chol.solve(self.shifted_solve(xi, right))
        x = self.shifted_solve(np.conj(zeta), left)
        return nk.conj_transpose(x) @ y


def assemble(m, N):
    """Build ``S(N)``, ``A(N)``, ``Phi_1``, ``Phi_2`` from moments."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if m.K < N - 1:
        raise InsufficientMoments(N - 1, m.K)
    p = m.p
    eye = np.eye(p, dtype=np.complex128)
    S = block_toeplitz(m, N)
    A = structure_matrix(N, p)
    Phi1 = np.tile(eye, (N, 1))
    partial = np.cumsum(np.stack(m.s[:N]), axis=0) - 0.5 * m.s[0]
    Phi2 = partial.reshape(N * p, p) + 1j * Phi1 @ m.nu
    return ToeplitzSystem(N=N, p=p, S=S, A=A, Phi1=Phi1, Phi2=Phi2, nu=m.nu)


@dataclass(frozen=True)
class PositivityVerdict:
    positive: bool
    min_pivot: float
    failed_index: int | None = None


def positivity_check(t):
    try:
        h = nk.cholesky_pd(t.S)
    except NotPositiveDefinite as exc:
        return PositivityVerdict(False, 0.0, exc.index)
    except NotHermitian:
        return PositivityVerdict(False, 0.0, None)
    return PositivityVerdict(True, h.min_pivot)


def transfer_function(t, lam):
    """``w_A(N, lam) = I - i J Pi^* S^{-1} (A - lam I)^{-1} Pi``."""
    lam = complex(lam)
    if abs(lam - 0.5j) < TOL_RESOLVENT:
        raise LambdaAtHalfI()
    J = signature(t.p).J
    Pi = t.Pi
    M = t.A - lam * np.eye(t.N * t.p)
    r = sla.solve_triangular(M, Pi, lower=True)
    return np.eye(2 * t.p) - 1j * J @ nk.conj_transpose(Pi) @ t.chol.solve(r)


def cayley_power(lam, N):
    """``lam^{-N} (lam + i)^N`` evaluated as ``exp(N log((lam + i)/lam))``."""
    return np.exp(N * np.log((lam + 1j) / lam))


def fundamental_from_moments(t, lam):
    """``W_N(lam) = lam^{-N} (lam + i)^N K^* w_A(N, -lam/2) K``."""
    lam = complex(lam)
    if lam == 0:
        raise LambdaZero()
    if abs(lam + 1j) < TOL_RESOLVENT:
        raise LambdaMinusI()
    K = signature(t.p).K
    w = transfer_function(t, -lam / 2)
    return cayley_power(lam, t.N) * (nk.conj_transpose(K) @ w @ K)


def frak_A(t, zeta):
    """``j (I + i zeta J Pi^* (I + zeta A^*)^{-1} S^{-1} Pi) j``."""
    zeta = complex(zeta)
    sig = signature(t.p)
    Pi = t.Pi
    x = t.shifted_solve(np.conj(zeta), Pi)
    inner = nk.conj_transpose(x) @ t.chol.solve(Pi)
    return sig.j @ (np.eye(2 * t.p) + 1j * zeta * sig.J @ inner) @ sig.j


def frak_A_j_unitarity(t, zeta, *, normalized=False):
    """Max residual of ``A(z) J A(conj z)^* = J = A(conj z)^* J A(z)``.

    Relative to ``||J||`` by default.  With ``normalized`` the scale is
    ``||A(z)|| ||A(conj z)||``, the size of the rounding error of the product;
    this is the meaningful measure inside ``|z -+ 2i| < 2``, where the
    resolvent of ``A^*`` grows geometrically with ``N``.
    """
    J = signature(t.p).J
    a = frak_A(t, zeta)
    b = frak_A(t, np.conj(zeta))
    scale = np.linalg.norm(J)
    if normalized:
        scale = max(scale, np.linalg.norm(a) * np.linalg.norm(b))
    r1 = nk.rel_residual(a @ J @ nk.conj_transpose(b), J, scale=scale)
    r2 = nk.rel_residual(nk.conj_transpose(b) @ J @ a, J, scale=scale)
    return max(r1, r2)


def frak_A_cross_residual(t, lam):
    """Residual of ``K W_N(conj lam)^* = ((lam - i)/lam)^N j J A_N(2/lam) J j K``."""
    lam = complex(lam)
    sig = signature(t.p)
    W = fundamental_from_moments(t, np.conj(lam))
    lhs = sig.K @ nk.conj_transpose(W)
    pref = np.exp(t.N * np.log((lam - 1j) / lam))
    rhs = pref * sig.j @ sig.J @ frak_A(t, 2 / lam) @ sig.J @ sig.j @ sig.K
    return nk.rel_residual(lhs, rhs)


def transfer_j_residual(t, lam, *, normalized=False):
    """Residual of ``w_A(N, conj lam)^* J w_A(N, lam) = J``.

    Relative to ``||J||`` by default.  With ``normalized`` the scale is
    ``||w(lam)|| ||w(conj lam)||``, which matters near the spectrum of ``A``
    where the resolvent of the Jordan-like ``A`` grows like ``dist^{-N}``.
    """
    J = signature(t.p).J
    w1 = transfer_function(t, lam)
    w2 = transfer_function(t, np.conj(lam))
    scale = np.linalg.norm(J)
    if normalized:
        scale = max(scale, np.linalg.norm(w1) * np.linalg.norm(w2))
    return nk.rel_residual(nk.conj_transpose(w2) @ J @ w1, J, scale=scale)


@numba.njit(cache=True)
def _semisep_sweeps(F, U, G, s0, x):
    N, p = x.shape
    n = U.shape[0]
    y = np.zeros((N, p), dtype=np.complex128)
    for i in range(N):
        for a in range(p):
            acc = 0j
            for b in range(p):
                acc += s0[a, b] * x[i, b]
            y[i, a] = acc
    # s_{k-i} = F U^{i-k-1} G for k < i
    h = np.zeros(n, dtype=np.complex128)
    hn = np.zeros(n, dtype=np.complex128)
    for i in range(N):
        for a in range(p):
            acc = 0j
            for c in range(n):
                acc += F[a, c] * h[c]
            y[i, a] += acc
        for c in range(n):
            acc = 0j
            for d in range(n):
                acc += U[c, d] * h[d]
            for b in range(p):
                acc += G[c, b] * x[i, b]
            hn[c] = acc
        for c in range(n):
            h[c] = hn[c]
    # s_{k-i} = G^* (U^*)^{k-i-1} F^* for k > i
    g = np.zeros(n, dtype=np.complex128)
    for i in range(N - 1, -1, -1):
        for a in range(p):
            acc = 0j
            for c in range(n):
                acc += np.conj(G[c, a]) * g[c]
            y[i, a] += acc
        for c in range(n):
            acc = 0j
            for d in range(n):
                acc += np.conj(U[d, c]) * g[d]
            for b in range(p):
                acc += np.conj(F[b, c]) * x[i, b]
            hn[c] = acc
        for c in range(n):
            g[c] = hn[c]
    return y


def semiseparable_matvec(gen, nu, s0, N, x):
    """``S(N) x`` in ``O(N (n^2 + n p + p^2))`` from generators ``(F, U, G)``.

    ``nu`` does not enter ``S(N)``; it is accepted so callers can pass a full
    moment description.
    """
    F, U, G = (np.ascontiguousarray(nk.cmatrix(m)) for m in gen)
    s0 = np.ascontiguousarray(nk.cmatrix(s0))
    p = s0.shape[0]
    xv = np.ascontiguousarray(np.asarray(x, dtype=np.complex128).reshape(N, p))
    if not np.any(F):
        return (xv @ s0.T).reshape(-1)
    return _semisep_sweeps(F, U, G, s0, xv).reshape(-1)
