import numpy as np
import pytest

from ternarybell.jacobi import eigh_jacobi, top_eigenpair


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


@pytest.mark.parametrize("seed", range(20))
def test_matches_numpy(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 10))
    h = random_hermitian(rng, n)
    w, v = eigh_jacobi(h)
    assert np.allclose(w, np.linalg.eigvalsh(h), atol=1e-10)
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-10)
    assert np.allclose(h @ v, v * w, atol=1e-9)


def test_degenerate_spectrum():
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9)))
    h = q @ np.diag([1, 1, 1, 0, 0, -2, -2, -2, 5]) @ q.conj().T
    w, v = eigh_jacobi(h)
    assert np.allclose(w, [-2, -2, -2, 0, 0, 1, 1, 1, 5], atol=1e-10)
    lam, vec = top_eigenpair(h)
    assert lam == pytest.approx(5.0, abs=1e-10)
    assert np.allclose(h @ vec, lam * vec, atol=1e-9)


def test_diagonal_and_real_input():
    w, v = eigh_jacobi(np.diag([3.0, -1.0, 2.0]))
    assert np.allclose(w, [-1, 2, 3])
    assert np.allclose(np.abs(v), np.eye(3)[:, [1, 2, 0]])


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        eigh_jacobi(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(ValueError):
        eigh_jacobi(np.zeros((2, 3)))
