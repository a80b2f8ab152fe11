"""Inverse problem: potential from moments, moments from a Weyl function."""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import numkernel as nk
from .dirac import DEFAULT_PROBES, Potential, extract_potential_step, j_residual, signature
from .errors import (
    AliasingDetected,
    EvaluatorFailure,
    InsufficientMoments,
    NotHermitian,
    NotPositiveDefinite,
    Singular,
    SingularW,
)
from .toeplitz import MomentData, assemble, fundamental_from_moments

log = logging.getLogger(__name__)

DEFAULT_RADIUS = 0.5
DEFAULT_CHECK_RADIUS = 0.7
TOL_ALIAS = 1e-8


@dataclass
class RecoveryReport:
    potential: Potential | None
    probes: tuple
    lambda_residuals: list = field(default_factory=list)
    junit_residuals: list = field(default_factory=list)
    stopped_at: int | None = None
    diagnostic: str = ""

    @property
    def complete(self):
        return self.stopped_at is None


def recover_potential(m, N, probes=DEFAULT_PROBES):
    """Recover ``C_0 .. C_N`` from ``nu, s_0 .. s_{-N}``.

    ``W_k`` is rebuilt from ``S(k)`` for both probes, each ``C_k`` is read off
    one step of the recursion, and the spread between the probes is
    reported.  If ``S(k)`` stops being positive definite the partial
    potential is returned with ``stopped_at`` set.
    """
    if m.K < N:
        raise InsufficientMoments(N, m.K)
    probes = tuple(complex(z) for z in probes)
    if len(probes) != 2:
        raise ValueError("exactly two probes are required")
    p = m.p
    j = signature(p).j
    eye = np.eye(2 * p, dtype=np.complex128)
    prev = [eye, eye]
    Cs, lam_res, ju_res = [], [], []
    report = RecoveryReport(potential=None, probes=probes)
    for k in range(N + 1):
        try:
            t = assemble(m, k + 1)
            t.chol
        except (NotPositiveDefinite, NotHermitian):
            report.stopped_at = k
            report.diagnostic = f"S({k + 1}) is not positive definite"
            log.warning("recovery stopped at k=%d: %s", k, report.diagnostic)
            break
        nxt, cands = [], []
        for i, lam in enumerate(probes):
            W = fundamental_from_moments(t, lam)
            try:
                cands.append(extract_potential_step(prev[i], W, lam))
            except Singular as exc:
                raise SingularW(k, lam) from exc
            nxt.append(W)
        prev = nxt
        C = nk.hermitian_part(cands[0])
        Cs.append(C)
        lam_res.append(nk.rel_residual(cands[1], cands[0]))
        ju_res.append(j_residual(C, j))
    report.potential = Potential(p=p, C=tuple(Cs)) if Cs else None
    report.lambda_residuals = lam_res
    report.junit_residuals = ju_res
    return report


def cayley_lambda(z):
    """``lam(z) = i (z + 1)/(z - 1)``; maps the unit disk onto ``C_-`` with ``0 -> -i``."""
    return 1j * (z + 1) / (z - 1)


def taylor_coefficients(f, K, r, M):
    """First ``K + 1`` Taylor coefficients of ``f`` at 0 from ``M`` samples on ``|z| = r``."""
    theta = 2 * np.pi * np.arange(M) / M
    z = r * np.exp(1j * theta)
    vals = np.stack([np.asarray(f(zz), dtype=np.complex128) for zz in z])
    coef = np.fft.fft(vals, axis=0) / M
    scale = r ** -np.arange(K + 1)
    return coef[: K + 1] * scale[:, None, None]


def default_grid(K):
    return max(8, 1 << int(np.ceil(np.log2(max(4 * K, 1)))))


def weyl_to_moments(phi, K, r=DEFAULT_RADIUS, M=None, *, r_check=DEFAULT_CHECK_RADIUS, tol=TOL_ALIAS):
    """Moments of a Weyl function from its Taylor expansion under ``lam(z)``.

    ``f(z) = i phi(lam(z))`` is sampled on two circles; disagreement above
    ``tol`` (relative to the largest coefficient) raises :class:`AliasingDetected`.
    """
    if not 0 < r < 1 or not 0 < r_check < 1:
        raise ValueError("radii must lie in (0, 1)")
    if M is None:
        M = default_grid(K)
    if M <= K:
        raise ValueError("grid size M must exceed K")

    def f(z):
        try:
            val = 1j * np.atleast_2d(phi(cayley_lambda(z)))
        except Exception as exc:  # evaluator is user code
            raise EvaluatorFailure(f"phi failed at lambda={cayley_lambda(z)}: {exc}") from exc
        if not np.all(np.isfinite(val)):
            raise EvaluatorFailure(f"phi is not finite at lambda={cayley_lambda(z)}")
        return val

    c1 = taylor_coefficients(f, K, r, M)
    c2 = taylor_coefficients(f, K, r_check, M)
    scale = max(np.max(np.abs(c1)), 1e-300)
    err = float(np.max(np.abs(c1 - c2)) / scale)
    if err > tol:
        raise AliasingDetected(err)
    alpha0 = c1[0]
    nu = nk.im_part(alpha0)
    s0 = alpha0 + nk.conj_transpose(alpha0)
    s = (nk.hermitian_part(s0),) + tuple(c1[1:])
    md = MomentData(p=alpha0.shape[0], nu=nk.hermitian_part(nu), s=s)
    return md, err
