"""Cyclic Jacobi eigen-decomposition for small complex Hermitian matrices."""

from __future__ import annotations

import numpy as np


class JacobiError(RuntimeError):
    pass


def _off_norm(a: np.ndarray) -> float:
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def eigh_jacobi(h: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60):
    """Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.

    Each rotation zeroes one off-diagonal pair (p, q): a phase on column q
    makes the entry real, then a real Givens rotation diagonalizes the 2x2
    block.  Sweeps stop once the off-diagonal Frobenius norm is below ``tol``
    times ``max(1, ||h||_F)``.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if np.max(np.abs(a - a.conj().T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(a))):
        raise ValueError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        if _off_norm(a) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                theta = 0.5 * np.arctan2(2.0 * r, (a[p, p] - a[q, q]).real)
                c, s = np.cos(theta), np.sin(theta)
                # u = diag(1, conj(phase)) @ [[c, -s], [s, c]]
                u = np.array([[c, -s], [s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[q, p] = a[p, q] = 0.0
                v[:, idx] = v[:, idx] @ u
    else:
        if _off_norm(a) > tol * scale:
            raise JacobiError("Jacobi sweeps did not converge")
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def top_eigenpair(h: np.ndarray, tol: float = 1e-12) -> tuple[float, np.ndarray]:
    w, v = eigh_jacobi(h, tol)
    return float(w[-1]), v[:, -1]
