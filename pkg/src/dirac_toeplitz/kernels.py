"""Christoffel-Darboux identity, reproducing-kernel analogs and Weyl disks.

Convention: ``eval_M(t, zeta, xi)`` is ``A_k(zeta) J A_k(conj xi)^*`` with
``k = t.N``.  The large-``k`` limit is written for ``M(k, zeta, conj xi)``, so
callers comparing with :func:`dirac_toeplitz.szego.asymptotic_target` pass
``conj(xi)`` here.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .dirac import fundamental_solution, signature
from .errors import (
    DegeneratePair,
    EqualArguments,
    LambdaZero,
    NotInUpperHalfPlane,
    ProximityWarning,
)
from .toeplitz import assemble, frak_A

TOL_DEGENERATE = 1e-14
EXCLUDED_POINT = 2j
PROXIMITY_RADIUS = 0.1


def c_factor(lam, mu):
    lam, mu = complex(lam), complex(mu)
    d = 1 + lam * mu
    if abs(d) < TOL_DEGENERATE:
        raise DegeneratePair(lam, mu)
    return lam * mu / d


def q_weight(lam):
    a = abs(complex(lam)) ** 2
    return a / (a + 1)


def cd_sides(pot, lam, mu, N):
    """Both sides of the Christoffel-Darboux identity summed up to ``N``."""
    lam, mu = complex(lam), complex(mu)
    if lam == 0 or mu == 0:
        raise LambdaZero()
    if lam == mu:
        raise EqualArguments()
    c = c_factor(lam, mu)
    j = signature(pot.p).j
    Wl = fundamental_solution(pot, lam, N + 1)
    Wm = fundamental_solution(pot, np.conj(mu), N + 1)
    lhs = sum(c ** k * nk.conj_transpose(Wm[k]) @ pot.C[k] @ Wl[k] for k in range(N + 1))
    rhs = 1j * (1 + lam * mu) / (mu - lam) * (
        c ** (N + 1) * nk.conj_transpose(Wm[N + 1]) @ j @ Wl[N + 1] - j
    )
    return lhs, rhs


def cd_residual(pot, lam, mu, N):
    lhs, rhs = cd_sides(pot, lam, mu, N)
    scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs))
    return nk.rel_residual(lhs, rhs, scale=scale)


def eval_R(t, lam, mu):
    """``Phi_1^* (I + lam A^*)^{-1} S^{-1} (I + mu A)^{-1} Phi_1``."""
    return t.kernel_core(lam, mu, t.Phi1, t.Phi1)


@dataclass(frozen=True)
class KernelPoint:
    k: int
    zeta: complex
    xi: complex
    M: np.ndarray
    product_residual: float
    block_residual: float

    def block(self, a, b):
        p = self.M.shape[0] // 2
        return self.M[a * p:(a + 1) * p, b * p:(b + 1) * p]

    @property
    def M11(self):
        return self.block(0, 0)

    @property
    def M12(self):
        return self.block(0, 1)

    @property
    def M21(self):
        return self.block(1, 0)

    @property
    def M22(self):
        return self.block(1, 1)


def _warn_if_near_excluded(*args):
    for z in args:
        if abs(complex(z) - EXCLUDED_POINT) < PROXIMITY_RADIUS:
            warnings.warn(f"argument {z} is within {PROXIMITY_RADIUS} of 2i", ProximityWarning, stacklevel=3)


def eval_M(t, zeta, xi, *, check=True):
    """Kernel ``M(k, zeta, xi)`` for ``k = t.N`` through the resolvent formula.

    With ``check`` the value is compared with the product form
    ``A_k(zeta) J A_k(conj xi)^*`` and ``M_22`` with ``i (xi - zeta) R_k(zeta, xi)``.
    """
    zeta, xi = complex(zeta), complex(xi)
    _warn_if_near_excluded(zeta, xi)
    sig = signature(t.p)
    core = t.kernel_core(zeta, xi, t.Pi, t.Pi)
    M = sig.J + 1j * (xi - zeta) * sig.J @ sig.j @ core @ sig.j @ sig.J
    prod_res = block_res = float("nan")
    if check:
        prod = frak_A(t, zeta) @ sig.J @ nk.conj_transpose(frak_A(t, np.conj(xi)))
        prod_res = nk.rel_residual(M, prod, scale=max(np.linalg.norm(M), 1.0))
        p = t.p
        r22 = 1j * (xi - zeta) * eval_R(t, zeta, xi)
        block_res = nk.rel_residual(M[p:, p:], r22, scale=max(np.linalg.norm(r22), 1.0))
    return KernelPoint(k=t.N, zeta=zeta, xi=xi, M=M, product_residual=prod_res, block_residual=block_res)


@dataclass(frozen=True)
class WeylDisk:
    N: int
    zeta: complex
    Lambda_l: np.ndarray
    Lambda_r: np.ndarray
    center: np.ndarray
    F: np.ndarray

    def block(self, a, b):
        p = self.Lambda_l.shape[0]
        return self.F[a * p:(a + 1) * p, b * p:(b + 1) * p]

    def contraction(self, omega):
        """``u = Lambda_l^{-1} (omega - center) Lambda_r^{-1}``; ``omega`` is inside iff ``||u|| <= 1``."""
        d = nk.cmatrix(omega) - self.center
        u = nk.solve(self.Lambda_l, d)
        return nk.right_divide(u, self.Lambda_r)

    def membership(self, omega):
        return nk.spectral_norm(self.contraction(omega))

    def point(self, u):
        """Disk point ``Lambda_l u Lambda_r + center`` for a contraction ``u``."""
        return self.Lambda_l @ nk.cmatrix(u) @ self.Lambda_r + self.center


def weyl_disk(t, zeta):
    """Radii and center of the Weyl disk of order ``t.N`` at ``zeta``.

    Radii follow from ``R_N``:
    ``Lambda_l^2 = i (zeta - conj zeta)^{-1} R_N(conj zeta, zeta)^{-1}`` and
    ``Lambda_r^2 = i (zeta - conj zeta)^{-1} R_N(zeta, conj zeta)^{-1}``.
    The center is ``i Lambda_l^2 F_12`` with ``F = J A_N(conj zeta) J A_N(conj zeta)^* J``.
    """
    zeta = complex(zeta)
    if not zeta.imag > 0:
        raise NotInUpperHalfPlane(zeta)
    _warn_if_near_excluded(zeta)
    p = t.p
    J = signature(p).J
    zb = np.conj(zeta)
    a = frak_A(t, zb)
    F = J @ a @ J @ nk.conj_transpose(a) @ J
    c = 1j / (zeta - zb)
    R_left = eval_R(t, zb, zeta)
    R_right = eval_R(t, zeta, zb)
    L2 = nk.hermitian_part(c * nk.inverse(R_left))
    R2 = nk.hermitian_part(c * nk.inverse(R_right))
    Ll = nk.principal_sqrt_pd(L2)
    Lr = nk.principal_sqrt_pd(R2)
    center = 1j * L2 @ F[:p, p:]
    return WeylDisk(N=t.N, zeta=zeta, Lambda_l=Ll, Lambda_r=Lr, center=center, F=F)


def disk_block_residuals(disk, t):
    """Residuals of ``-F_11 = i (conj z - z) R_N(conj z, z)`` and of ``Lambda_r^2 = F_22 - F_21 F_11^{-1} F_12``."""
    z = disk.zeta
    zb = np.conj(z)
    F11 = disk.block(0, 0)
    F12 = disk.block(0, 1)
    F21 = disk.block(1, 0)
    F22 = disk.block(1, 1)
    r1 = nk.rel_residual(-F11, 1j * (zb - z) * eval_R(t, zb, z))
    schur = F22 - F21 @ nk.solve(F11, F12)
    r2 = nk.rel_residual(schur, disk.Lambda_r @ disk.Lambda_r)
    return r1, r2


def disk_sequence(m, zeta, N_max):
    return [weyl_disk(assemble(m, N), zeta) for N in range(1, N_max + 1)]
