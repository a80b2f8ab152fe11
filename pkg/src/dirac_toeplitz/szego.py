"""Spectral side: Herglotz function, boundary density, outer factor, limits.

Everything on the real line is transplanted to the unit circle through
``t(theta) = -cot(theta/2)`` (equivalently ``z = (t - i)/(t + i)``), for which
``dt / (1 + t^2) = dtheta / 2``.  Grids are midpoint grids
``theta_m = 2 pi (m + 1/2) / M`` so ``t = +-inf`` is never sampled.
"""

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .errors import (
    DensityNotPositive,
    GridTooCoarse,
    QuadratureDivergence,
    QuadratureNotConverged,
    RealPole,
    ValidationError,
)
from .kernels import eval_M, weyl_disk
from .toeplitz import assemble, structure_matrix

DIVERGENCE_FLOOR = -1e6
TOL_FACTOR = 1e-6
TOL_QUADRATURE = 1e-8
BETA_PROBE = 1e6


def omega_from_phi(phi):
    """``omega(zeta) = -phi(2/zeta)``; Herglotz in ``C_+`` when ``phi`` is Herglotz in ``C_-``."""

    def omega(zeta):
        zeta = complex(zeta)
        if zeta == 0:
            raise ValueError("omega_from_phi cannot evaluate at zeta = 0; use a closed form")
        return -np.atleast_2d(phi(2 / zeta))

    return omega


def herglotz_defect(omega, zetas):
    """Most negative eigenvalue of ``Im omega`` over the sample points."""
    worst = np.inf
    for z in zetas:
        w = np.linalg.eigvalsh(nk.im_part(np.atleast_2d(omega(z))))
        worst = min(worst, float(w.min()))
    return worst


def boundary_density(omega, t):
    """``tau'(t) = Im omega(t) / pi`` for ``omega`` analytic across the real line."""
    try:
        w = np.atleast_2d(np.asarray(omega(float(t)), dtype=np.complex128))
    except (ZeroDivisionError, np.linalg.LinAlgError) as exc:
        raise RealPole(t) from exc
    if not np.all(np.isfinite(w)):
        raise RealPole(t)
    return nk.hermitian_part(nk.im_part(w)) / np.pi


def estimate_beta(omega, y=BETA_PROBE):
    """``lim omega(iy)/(iy)`` estimated at a single large ``y``."""
    return nk.hermitian_part(np.atleast_2d(omega(1j * y)) / (1j * y))


def theta_grid(M):
    return 2 * np.pi * (np.arange(M) + 0.5) / M


def circle_to_line(theta):
    return -1.0 / np.tan(theta / 2)


def line_to_disk(zeta):
    return (zeta - 1j) / (zeta + 1j)


def _density_on_grid(density, M):
    t = circle_to_line(theta_grid(M))
    return t, [np.atleast_2d(density(tt)) for tt in t]


def szego_integral(density, M=2048):
    """``int (1+t^2)^{-1} ln det tau'(t) dt`` by the midpoint rule on the circle."""
    _, vals = _density_on_grid(density, M)
    logs = []
    for v in vals:
        d = np.linalg.det(v).real
        logs.append(np.log(d) if d > 0 else -np.inf)
    value = 0.5 * (2 * np.pi / M) * np.sum(logs)
    if not np.isfinite(value) or value < DIVERGENCE_FLOOR:
        raise QuadratureDivergence(value if np.isfinite(value) else -np.inf)
    return float(value)


@dataclass(frozen=True)
class OuterFactor:
    """Scalar outer function ``G`` with ``|G(t)|^2 = tau'(t)`` on the real line."""

    M: int
    theta: np.ndarray
    log_density: np.ndarray
    coef: np.ndarray
    boundary_error: float

    def disk_value(self, z):
        z = complex(z)
        return np.exp(np.polynomial.polynomial.polyval(z, self.coef))

    def __call__(self, zeta):
        """``G(zeta)`` for ``zeta`` in the closed upper half-plane."""
        return self.disk_value(line_to_disk(complex(zeta)))

    def boundary(self):
        z = np.exp(1j * self.theta)
        return np.exp(np.polynomial.polynomial.polyval(z, self.coef))

    def to_json(self):
        gb = self.boundary()
        return {
            "M": self.M,
            "theta": self.theta.tolist(),
            "logW": self.log_density.tolist(),
            "G_boundary": [[float(v.real), float(v.imag)] for v in gb],
        }


def outer_factor_scalar(density, M=4096, *, tol=TOL_FACTOR):
    """Outer factor of a strictly positive scalar density.

    ``log G`` on the disk is the analytic completion of ``(1/2) log tau'``:
    with ``log tau' = sum_k c_k e^{ik theta}``, ``log G = c_0/2 + sum_{k>0} c_k z^k``.
    The Nyquist mode is dropped; its size is part of the reported boundary error.
    """
    if M < 8 or M % 2:
        raise ValueError("M must be an even integer >= 8")
    theta = theta_grid(M)
    t, vals = _density_on_grid(density, M)
    w = np.array([v.reshape(-1)[0] for v in vals])
    if np.any(np.abs(w.imag) > 1e-12 * np.abs(w)):
        raise ValidationError("density must be real")
    w = w.real
    bad = np.flatnonzero(~(w > 0))
    if bad.size:
        raise DensityNotPositive(float(t[bad[0]]))
    logw = np.log(w)
    # midpoint grid shifts each Fourier mode by exp(-i k pi / M)
    c = np.fft.fft(logw) / M * np.exp(-1j * np.pi * np.fft.fftfreq(M, d=1.0 / M) / M)
    coef = np.zeros(M // 2 + 1, dtype=np.complex128)
    coef[0] = c[0].real / 2
    coef[1:M // 2] = c[1:M // 2]
    g = OuterFactor(M=M, theta=theta, log_density=logw, coef=coef, boundary_error=0.0)
    err = float(np.max(np.abs(np.abs(g.boundary()) ** 2 - w) / w))
    tail = float(np.max(np.abs(coef[-max(2, M // 16):])))
    g = OuterFactor(M=M, theta=theta, log_density=logw, coef=coef, boundary_error=max(err, tail))
    if g.boundary_error > tol:
        raise GridTooCoarse(g.boundary_error)
    return g


def asymptotic_target(omega, G, zeta, xi):
    """Limit of ``M(k, zeta, conj xi)`` as ``k -> infinity`` (scalar case)."""
    zeta, xi = complex(zeta), complex(xi)
    wz = complex(np.atleast_2d(omega(zeta))[0, 0])
    wx = complex(np.atleast_2d(omega(xi))[0, 0])
    col = np.array([[-1j * wz], [1.0]])
    row = np.array([[1j * np.conj(wx), 1.0]])
    g = 1.0 / (G(zeta) * np.conj(G(xi)))
    return col @ row * g / (2 * np.pi)


@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    M: np.ndarray
    target: np.ndarray
    error: float
    trace_lambda_l: float
    radius_error: float


def convergence_report(moments, omega, G, zeta, xi, k_max, ks=None):
    """Rows ``(k, ||M(k,zeta,conj xi) - target||_F, tr Lambda_l(k,zeta), ||Lambda_r(k,zeta) - sqrt(2 pi |G(zeta)|^2)||)``."""
    target = asymptotic_target(omega, G, zeta, xi)
    r_lim = np.sqrt(2 * np.pi * abs(G(zeta)) ** 2)
    rows = []
    for k in ks if ks is not None else range(1, k_max + 1):
        t = assemble(moments, k)
        kp = eval_M(t, zeta, np.conj(xi), check=False)
        d = weyl_disk(t, zeta)
        rows.append(
            ConvergenceRow(
                k=k,
                M=kp.M,
                target=target,
                error=float(np.linalg.norm(kp.M - target)),
                trace_lambda_l=float(np.trace(d.Lambda_l).real),
                radius_error=float(np.linalg.norm(d.Lambda_r - r_lim * np.eye(d.Lambda_r.shape[0]))),
            )
        )
    return rows


def S_from_measure(k, density, beta=None, M=1024, *, tol=TOL_QUADRATURE, max_M=1 << 16):
    """``S(k)`` rebuilt from the Herglotz data ``beta`` and an absolutely continuous density.

    ``A^{-1} Phi_1 beta Phi_1^* A^{-*} + int (I + tA)^{-1} Phi_1 tau'(t) Phi_1^* (I + tA^*)^{-1} dt``
    on the circle, doubling ``M`` until two successive grids agree to ``tol``.
    """
    p = np.atleast_2d(density(0.0)).shape[0]
    A = structure_matrix(k, p)
    Phi1 = np.tile(np.eye(p, dtype=np.complex128), (k, 1))
    base = np.zeros((k * p, k * p), dtype=np.complex128)
    if beta is not None and np.any(beta):
        x = nk.solve(A, Phi1)
        base = x @ nk.cmatrix(beta) @ nk.conj_transpose(x)

    def quad(MM):
        total = np.zeros_like(base)
        eye = np.eye(k * p)
        for th in theta_grid(MM):
            t = circle_to_line(th)
            x = np.linalg.solve(eye + t * A, Phi1)
            total += (1 + t * t) * (x @ np.atleast_2d(density(t)) @ nk.conj_transpose(x))
        return total * (np.pi / MM)

    prev = quad(M)
    while True:
        M *= 2
        cur = quad(M)
        change = np.linalg.norm(cur - prev) / max(np.linalg.norm(cur), 1e-300)
        if change <= tol:
            return nk.hermitian_part(base + cur)
        if M >= max_M:
            raise QuadratureNotConverged(change)
        prev = cur
