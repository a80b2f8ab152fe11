"""Dense complex linear algebra primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`cmatrix`
is the validating constructor.  Tolerances are module constants and every
function accepts an override.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import (
    IllConditionedWarning,
    NonFiniteEntries,
    NotHermitian,
    NotPositiveDefinite,
    ShapeError,
    Singular,
)

TOL_HERM = 1e-12
TOL_SINGULAR = 1e-14
COND_WARN = 1e12


def cmatrix(data, *, shape=None):
    """Coerce ``data`` to a finite 2-D complex array.

    Scalars become 1x1 matrices and 1-D input becomes a column.
    """
    m = np.array(data, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if shape is not None and m.shape != tuple(shape):
        raise ShapeError(f"expected shape {tuple(shape)}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteEntries("matrix contains NaN or Inf")
    return m


def conj_transpose(m):
    return np.conj(np.asarray(m)).T


def rel_residual(a, b, scale=None):
    """Frobenius ``||a - b|| / scale`` with ``scale`` defaulting to ``max(||b||, 1e-300)``."""
    if scale is None:
        scale = np.linalg.norm(b)
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(scale, 1e-300))


def hermitian_residual(m):
    nm = np.linalg.norm(m)
    if nm == 0:
        return 0.0
    return float(np.linalg.norm(m - conj_transpose(m)) / nm)


def hermitian_part(m):
    return 0.5 * (m + conj_transpose(m))


def im_part(m):
    """Matrix imaginary part ``(m - m*) / 2i``."""
    return (m - conj_transpose(m)) / 2j


def re_part(m):
    return hermitian_part(m)


@dataclass(frozen=True)
class HermitianPD:
    """A Hermitian positive definite matrix with its lower Cholesky factor."""

    matrix: np.ndarray
    factor: np.ndarray

    @property
    def n(self):
        return self.matrix.shape[0]

    def solve(self, b):
        """Apply ``matrix^{-1}`` through two triangular solves."""
        b = np.asarray(b, dtype=np.complex128)
        y = sla.solve_triangular(self.factor, b, lower=True)
        return sla.solve_triangular(self.factor, y, lower=True, trans="C")

    @property
    def min_pivot(self):
        return float(np.min(np.abs(np.diag(self.factor))) ** 2)


def cholesky_pd(m, *, tol_herm=TOL_HERM):
    """Cholesky factorization ``m = L L*`` with a positivity certificate.

    Raises :class:`NotHermitian` or :class:`NotPositiveDefinite` carrying the
    zero-based index of the first failing pivot.
    """
    m = cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"cholesky_pd needs a square matrix, got {m.shape}")
    res = hermitian_residual(m)
    if res > tol_herm:
        raise NotHermitian(res)
    h = hermitian_part(m)
    factor, info = lapack.zpotrf(h, lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefinite(info - 1)
    if info < 0:  # pragma: no cover - LAPACK argument error
        raise ValueError(f"zpotrf illegal argument {-info}")
    return HermitianPD(matrix=h, factor=np.tril(factor))


def is_positive_definite(m, *, tol_herm=TOL_HERM):
    try:
        cholesky_pd(m, tol_herm=tol_herm)
    except (NotHermitian, NotPositiveDefinite):
        return False
    return True


def principal_sqrt_pd(m):
    """Principal (Hermitian positive definite) square root via eigendecomposition."""
    if not isinstance(m, HermitianPD):
        m = cholesky_pd(m)
    w, v = np.linalg.eigh(m.matrix)
    # eigh of a certified PD matrix can still return -eps for tiny eigenvalues
    w = np.clip(w, 0.0, None)
    r = (v * np.sqrt(w)) @ conj_transpose(v)
    return hermitian_part(r)


def _check_cond(m, what="matrix"):
    c = np.linalg.cond(m)
    if not np.isfinite(c) or c > COND_WARN:
        warnings.warn(f"{what} has condition number {c:.2e}", IllConditionedWarning, stacklevel=3)
    return c


def lu(m, *, tol=TOL_SINGULAR):
    """LU factorization with a relative pivot guard; returns scipy's ``(lu, piv)``."""
    m = cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got {m.shape}")
    amax = np.max(np.abs(m))
    if amax == 0:
        raise Singular("zero matrix")
    # rescale first so the Frobenius norm cannot overflow for huge entries
    scale = amax * np.linalg.norm(m / amax)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu_, piv = sla.lu_factor(m, check_finite=False)
    if np.min(np.abs(np.diag(lu_))) < tol * scale:
        raise Singular(f"pivot below {tol:g} * ||m||")
    return lu_, piv


def inverse(m, *, tol=TOL_SINGULAR):
    m = cmatrix(m)
    f = lu(m, tol=tol)
    _check_cond(m)
    return sla.lu_solve(f, np.eye(m.shape[0], dtype=np.complex128))


def solve(m, b, *, tol=TOL_SINGULAR):
    """Solve ``m x = b`` with the same singularity guard as :func:`inverse`."""
    return sla.lu_solve(lu(m, tol=tol), np.asarray(b, dtype=np.complex128))


def right_divide(b, m, *, tol=TOL_SINGULAR):
    """Return ``b m^{-1}`` by solving ``m^T x^T = b^T``."""
    f = lu(m, tol=tol)
    return sla.lu_solve(f, np.asarray(b, dtype=np.complex128).T, trans=1).T


def spectral_norm(m):
    return float(np.linalg.norm(cmatrix(m), 2))
