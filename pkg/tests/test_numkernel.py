import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_toeplitz import numkernel as nk
from dirac_toeplitz.errors import NonFiniteEntries, NotHermitian, NotPositiveDefinite, Singular


def test_conj_transpose_examples():
    assert np.array_equal(nk.conj_transpose([[0, 1], [1, 0]]), [[0, 1], [1, 0]])
    assert np.array_equal(nk.conj_transpose([[1j]]), [[-1j]])
    out = nk.conj_transpose([[1 + 2j, 3]])
    assert out.shape == (2, 1)
    assert np.array_equal(out, [[1 - 2j], [3]])


def test_cmatrix_rejects_nonfinite():
    with pytest.raises(NonFiniteEntries):
        nk.cmatrix([[1.0, np.nan]])


def test_cholesky_examples():
    h = nk.cholesky_pd(2 * np.eye(2))
    assert np.allclose(h.factor, np.sqrt(2) * np.eye(2), atol=1e-15)
    with pytest.raises(NotPositiveDefinite) as exc:
        nk.cholesky_pd([[1, 2], [2, 1]])
    assert exc.value.index == 1
    h = nk.cholesky_pd([[1, 1j], [-1j, 2]])
    assert np.allclose(h.factor, [[1, 0], [-1j, 1]], atol=1e-15)
    with pytest.raises(NotHermitian):
        nk.cholesky_pd([[1, 1], [0, 1]])


def test_hermitian_pd_solve():
    m = np.array([[4, 1 - 1j], [1 + 1j, 3]])
    h = nk.cholesky_pd(m)
    b = np.array([[1.0], [2j]])
    assert np.allclose(m @ h.solve(b), b, atol=1e-14)


def test_principal_sqrt_examples():
    assert np.allclose(nk.principal_sqrt_pd(np.eye(4)), np.eye(4), atol=1e-15)
    assert np.allclose(nk.principal_sqrt_pd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-15)
    a, b = (np.sqrt(3) + 1) / 2, (np.sqrt(3) - 1) / 2
    assert np.allclose(nk.principal_sqrt_pd([[2, 1], [1, 2]]), [[a, b], [b, a]], atol=1e-15)


def test_inverse_examples():
    assert np.allclose(nk.inverse(np.eye(3)), np.eye(3))
    assert np.allclose(nk.inverse(np.diag([2, -1j])), np.diag([0.5, 1j]))
    assert np.allclose(nk.inverse([[1.5, 1], [0, 1.5]]), [[2 / 3, -4 / 9], [0, 2 / 3]], atol=1e-15)
    with pytest.raises(Singular):
        nk.inverse([[1, 2], [2, 4]])


def test_inverse_huge_entries():
    # squaring 1e190 overflows; the pivot guard must not treat that as singular
    assert np.allclose(nk.inverse([[1e190]]), [[1e-190]], rtol=1e-15, atol=0)
    m = 1e200 * np.array([[2.0, 1.0], [0.0, 3.0]])
    assert np.allclose(nk.inverse(m) @ m, np.eye(2))
    with pytest.raises(Singular):
        nk.inverse(1e200 * np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_spectral_norm_examples():
    assert nk.spectral_norm(np.eye(3)) == pytest.approx(1.0)
    assert nk.spectral_norm(np.diag([3, -4j])) == pytest.approx(4.0)
    assert nk.spectral_norm([[0, 2], [0, 0]]) == pytest.approx(2.0)


def _random_pd(seed, n):
    r = np.random.default_rng(seed)
    X = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    return X @ X.conj().T + 0.1 * np.eye(n)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_sqrt_squares_back(seed, n):
    m = _random_pd(seed, n)
    r = nk.principal_sqrt_pd(m)
    assert nk.hermitian_residual(r) < 1e-14
    assert np.min(np.linalg.eigvalsh(r)) > 0
    assert np.linalg.norm(r @ r - m) <= 1e-10 * np.linalg.norm(m)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_inverse_residual(seed, n):
    r = np.random.default_rng(seed)
    m = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n)) + 3 * np.eye(n)
    if np.linalg.cond(m) > 1e8:
        return
    assert np.linalg.norm(m @ nk.inverse(m) - np.eye(n)) <= 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_conj_transpose_involution(seed, n):
    r = np.random.default_rng(seed)
    m = r.standard_normal((n, n + 1)) + 1j * r.standard_normal((n, n + 1))
    assert np.array_equal(nk.conj_transpose(nk.conj_transpose(m)), m)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_cholesky_agrees_with_eigenvalues(seed, n):
    r = np.random.default_rng(seed)
    X = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    m = X + X.conj().T + r.uniform(-2, 4) * np.eye(n)
    ev = np.linalg.eigvalsh(m)
    if abs(ev).min() < 1e-8:
        return
    assert nk.is_positive_definite(m) == (ev.min() > 0)
    if ev.min() > 0:
        L = nk.cholesky_pd(m).factor
        assert np.linalg.norm(L @ L.conj().T - m) <= 1e-10 * np.linalg.norm(m)
