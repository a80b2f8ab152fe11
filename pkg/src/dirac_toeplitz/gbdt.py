"""Explicit Dirac systems generated from admissible triples.

A triple ``{A, S0, Pi0 = [theta1 theta2]}`` with ``A S0 - S0 A^* = i Pi0 j Pi0^*``,
``det A != 0`` and ``S0 > 0`` determines a potential through a Darboux-type
recursion, a rational Weyl function and closed-form Toeplitz moments.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from . import numkernel as nk
from .dirac import signature, validate_potential
from .errors import (
    CayleySingular,
    IdentityResidualTooLarge,
    LambdaInSpectrum,
    NotHermitian,
    NotPositiveDefinite,
    NumericalError,
    S0NotPD,
    ShapeError,
    Singular,
    SingularA,
)
from .toeplitz import MomentData

TOL_IDENTITY = 1e-10
TOL_SPECTRUM = 1e-12


@dataclass(frozen=True)
class AdmissibleTriple:
    n: int
    p: int
    A: np.ndarray
    S0: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray

    @property
    def Pi0(self):
        return np.hstack([self.theta1, self.theta2])

    @cached_property
    def S0_pd(self):
        return nk.cholesky_pd(self.S0)

    def identity_residual(self):
        j = signature(self.p).j
        Pi0 = self.Pi0
        lhs = self.A @ self.S0 - self.S0 @ nk.conj_transpose(self.A)
        rhs = 1j * Pi0 @ j @ nk.conj_transpose(Pi0)
        scale = max(np.linalg.norm(self.A) * np.linalg.norm(self.S0), 1e-300)
        return nk.rel_residual(lhs, rhs, scale=scale)

    @cached_property
    def rational(self):
        return RationalWeyl.from_triple(self)


def validate_triple(A, S0, theta1, theta2, *, tol=TOL_IDENTITY):
    A = nk.cmatrix(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ShapeError("A must be square")
    S0 = nk.cmatrix(S0, shape=(n, n))
    theta1 = nk.cmatrix(theta1)
    p = theta1.shape[1]
    if theta1.shape != (n, p):
        raise ShapeError(f"theta1 must be {n} x p, got {theta1.shape}")
    theta2 = nk.cmatrix(theta2, shape=(n, p))
    t = AdmissibleTriple(n=n, p=p, A=A, S0=S0, theta1=theta1, theta2=theta2)
    res = t.identity_residual()
    if res > tol:
        raise IdentityResidualTooLarge(res)
    try:
        nk.lu(A)
    except Singular as exc:
        raise SingularA() from exc
    try:
        t.S0_pd
    except (NotHermitian, NotPositiveDefinite) as exc:
        raise S0NotPD() from exc
    return t


def trivial_triple(p=1, n=1):
    eye = np.eye(n, dtype=np.complex128)
    zero = np.zeros((n, p), dtype=np.complex128)
    return validate_triple(eye, eye, zero, zero)


def example_triple():
    """The ``n = p = 1`` triple ``A = i, S0 = 1, theta1 = sqrt 3, theta2 = 1``."""
    return validate_triple([[1j]], [[1.0]], [[np.sqrt(3.0)]], [[1.0]])


def random_triple(rng, n, p, *, eps=0.5, max_tries=100, margin=1e-2):
    """Draw an admissible triple with ``sigma(A~)`` strictly inside ``C_+``.

    ``S0 = M M^* + eps I``; ``A = H S0^{-1} + (i/2) Pi0 j Pi0^* S0^{-1}`` with
    ``H`` Hermitian, which satisfies the identity by construction.
    """
    j = signature(p).j

    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    for _ in range(max_tries):
        M = cplx(n, n) / np.sqrt(2 * n)
        S0 = M @ nk.conj_transpose(M) + eps * np.eye(n)
        S0 = nk.hermitian_part(S0)
        Pi0 = cplx(n, 2 * p) / np.sqrt(2)
        H = nk.hermitian_part(cplx(n, n))
        S0inv = np.linalg.inv(S0)
        A = (H + 0.5j * Pi0 @ j @ nk.conj_transpose(Pi0)) @ S0inv
        if np.min(np.abs(np.linalg.eigvals(A))) < 0.3:
            continue
        t = validate_triple(A, S0, Pi0[:, :p], Pi0[:, p:])
        ev = np.linalg.eigvals(t.rational.At)
        if np.min(ev.imag) < margin or np.min(np.abs(ev - 1j)) < 0.05:
            continue
        return t
    raise RuntimeError("could not draw an admissible triple")  # pragma: no cover


@dataclass(frozen=True)
class GbdtIterates:
    Pi: list
    S: list
    C: list

    @property
    def potential(self):
        return validate_potential(self.C)


def _normalized_step(B, x, j):
    """One step in coordinates scaled by the running Cholesky factor ``L_k``.

    With ``B = L_k^{-1} A^{-1} L_k`` and ``x = L_k^{-1} Pi_k`` the update
    ``S_{k+1} = L_k (I + B B^* + y y^*) L_k^*`` (``y = B x``) is factored as
    ``L_k M M^* L_k^*`` by a QR of a matrix whose Gram is ``>= I``, so ``M``
    stays well conditioned however large ``S_k`` grows.
    """
    n = B.shape[0]
    y = B @ x
    Z = np.hstack([np.eye(n), B, y])
    R = sla.qr(nk.conj_transpose(Z), mode="r")[0][:n]
    d = np.diag(R)
    if np.min(np.abs(d)) == 0:
        raise NumericalError("S_k lost positive definiteness")
    M = nk.conj_transpose((np.conj(d / np.abs(d))[:, None]) * R)
    x_next = sla.solve_triangular(M, x + 1j * y @ j, lower=True)
    B_next = sla.solve_triangular(M, B @ M, lower=True)
    return M, B_next, x_next


def gbdt_iterate(t, N):
    """Run the recursion; returns ``Pi_k, S_k`` for ``k = 0..N+1`` and ``C_k`` for ``k = 0..N``.

    ``Pi_k^* S_k^{-1} Pi_k`` is evaluated as ``x_k^* x_k`` with
    ``x_k = L_k^{-1} Pi_k`` carried directly in normalized coordinates
    (:func:`_normalized_step`), so the differences forming ``C_k`` do not
    inherit the condition number of ``S_k``.
    """
    A_lu = nk.lu(t.A)
    j = signature(t.p).j
    L = t.S0_pd.factor
    B = sla.solve_triangular(L, sla.lu_solve(A_lu, L), lower=True)
    x = sla.solve_triangular(L, t.Pi0, lower=True)
    Pis, Ls, xs = [t.Pi0.copy()], [L], [x]
    for _ in range(N + 1):
        Pi = Pis[-1]
        Pis.append(Pi + 1j * sla.lu_solve(A_lu, Pi @ j))
        M, B, x = _normalized_step(B, x, j)
        Ls.append(Ls[-1] @ M)
        xs.append(x)
    eye = np.eye(2 * t.p)
    gram = [nk.conj_transpose(x) @ x for x in xs]
    Cs = [nk.hermitian_part(eye + gram[k] - gram[k + 1]) for k in range(N + 1)]
    validate_potential(Cs)
    Ss = [L @ nk.conj_transpose(L) for L in Ls]
    return GbdtIterates(Pi=Pis, S=Ss, C=Cs)


@dataclass(frozen=True)
class RationalWeyl:
    """``A~ = A + i theta2 (theta2 - theta1)^* S0^{-1}`` together with the triple data."""

    At: np.ndarray
    triple: AdmissibleTriple

    @classmethod
    def from_triple(cls, t):
        S0inv = t.S0_pd.solve(np.eye(t.n))
        At = t.A + 1j * t.theta2 @ nk.conj_transpose(t.theta2 - t.theta1) @ S0inv
        return cls(At=At, triple=t)

    @cached_property
    def left(self):
        """``theta1^* S0^{-1}``, the row factor shared by every closed form."""
        t = self.triple
        return nk.conj_transpose(self.triple.S0_pd.solve(t.theta1))

    def e12_residual(self):
        t = self.triple
        d = t.theta1 - t.theta2
        lhs = self.At @ t.S0 - t.S0 @ nk.conj_transpose(self.At)
        rhs = 1j * d @ nk.conj_transpose(d)
        scale = max(np.linalg.norm(self.At) * np.linalg.norm(t.S0), 1e-300)
        return nk.rel_residual(lhs, rhs, scale=scale)

    def spectrum(self):
        return np.linalg.eigvals(self.At)

    def resolvent_term(self, lam):
        """``theta1^* S0^{-1} (A~ - lam I)^{-1} theta2``."""
        t = self.triple
        M = self.At - complex(lam) * np.eye(t.n)
        try:
            return self.left @ nk.solve(M, t.theta2, tol=TOL_SPECTRUM)
        except Singular as exc:
            raise LambdaInSpectrum(lam) from exc

    @cached_property
    def cayley(self):
        n = self.triple.n
        return nk.right_divide(self.At - 1j * np.eye(n), self.At + 1j * np.eye(n))


def gbdt_weyl(t, lam):
    """``phi(lam) = -i (I + 2 i theta1^* S0^{-1} (A~ - lam I)^{-1} theta2)``."""
    r = t.rational.resolvent_term(lam)
    return -1j * (np.eye(t.p) + 2j * r)


def gbdt_weyl_unsimplified(t, lam):
    """The same Weyl function through the linear-fractional form in ``A^x = A + i theta2 theta2^* S0^{-1}``."""
    lam = complex(lam)
    S0inv = t.S0_pd.solve(np.eye(t.n))
    Ax = t.A + 1j * t.theta2 @ nk.conj_transpose(t.theta2) @ S0inv
    left = nk.conj_transpose(t.theta1) @ S0inv
    small = -1j * left @ nk.solve(Ax - lam * np.eye(t.n), t.theta2)
    eye = np.eye(t.p)
    return -1j * nk.right_divide(eye - small, eye + small)


def gbdt_omega(t, zeta):
    """``omega(zeta) = -phi(2/zeta)`` written so that ``zeta = 0`` is allowed."""
    zeta = complex(zeta)
    rw = t.rational
    M = zeta * rw.At - 2 * np.eye(t.n)
    r = zeta * (rw.left @ nk.solve(M, t.theta2, tol=TOL_SPECTRUM))
    return 1j * (np.eye(t.p) + 2j * r)


def gbdt_moments(t, K):
    """Closed-form ``nu``, ``s_0`` and ``s_{-k}`` (``1 <= k <= K``)."""
    rw = t.rational
    eye_n = np.eye(t.n)
    F = 2j * rw.left @ nk.solve(rw.At + 1j * eye_n, eye_n)
    alpha0 = np.eye(t.p) + F @ t.theta2
    nu = nk.im_part(alpha0)
    s0 = 2 * nk.re_part(alpha0)
    U = rw.cayley
    v = (U - eye_n) @ t.theta2
    s = [s0]
    for _ in range(K):
        s.append(F @ v)
        v = U @ v
    return MomentData(p=t.p, nu=nu, s=tuple(s))


def semiseparable_generators(t, *, tol=1e-10):
    """``(F, U, G)`` with ``s_{-k} = F U^{k-1} G`` for ``k >= 1``."""
    rw = t.rational
    U = rw.cayley
    if np.min(np.abs(rw.spectrum() - 1j)) < tol or np.min(np.abs(np.linalg.eigvals(U))) < tol:
        raise CayleySingular()
    eye_n = np.eye(t.n)
    F = 2j * rw.left @ nk.solve(rw.At + 1j * eye_n, eye_n)
    G = (U - eye_n) @ t.theta2
    return F, U, G
