"""Maximum-likelihood fit of a nonsignaling behavior to pooled counts.

Maximizes sum N(a,b|x,y) log P(a,b|x,y) over normalized nonsignaling
behaviors.  The feasible affine set is parametrized as ``P = P0 + Z theta``
with ``Z`` an orthonormal null-space basis of the equality constraints, and
the concave objective is climbed with damped Newton steps that keep P > 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import null_space

from . import behavior as bh
from .polytope import ns_constraints


@dataclass(frozen=True, eq=False)
class MLEFit:
    behavior: bh.Behavior
    i_a: float
    loglik: float
    converged: bool
    iterations: int
    stationarity: float


@lru_cache(maxsize=1)
def _affine_frame() -> tuple[np.ndarray, np.ndarray]:
    rows, _ = ns_constraints()
    z = null_space(np.array(rows, dtype=float))
    p0 = np.full(36, 1.0 / 9.0)
    return p0, z


def _loglik(n: np.ndarray, p: np.ndarray) -> float:
    mask = n > 0
    return float(np.sum(n[mask] * np.log(p[mask])))


def _newton(w, theta, p0, z, total, tol, budget):
    """Maximize sum w log P over the affine frame, keeping P > 0.

    Returns (theta, stationarity, converged, iterations used).
    """
    p = p0 + z @ theta
    value = _loglik(w, p)
    stationarity = np.inf
    for it in range(1, budget + 1):
        grad = z.T @ (w / p)
        stationarity = float(np.max(np.abs(grad))) / total
        if stationarity < tol:
            return theta, stationarity, True, it
        hess = (z * (w / p ** 2)[:, None]).T @ z
        step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        if grad @ step <= 0:
            step = grad
        direction = z @ step
        alpha = 1.0
        neg = direction < 0
        if np.any(neg):
            alpha = min(1.0, 0.99 * float(np.min(-p[neg] / direction[neg])))
        moved = False
        while alpha > 1e-16:
            cand = p + alpha * direction
            if np.all(cand > 0):
                cand_value = _loglik(w, cand)
                if cand_value >= value + 1e-4 * alpha * float(grad @ step) or \
                        (cand_value > value and alpha < 1e-8):
                    theta = theta + alpha * step
                    p, value, moved = cand, cand_value, True
                    break
            alpha *= 0.5
        if not moved:
            return theta, stationarity, False, it
    return theta, stationarity, False, budget


def mle_nonsignaling_fit(counts, tol: float = 1e-9, max_iter: int = 100_000) -> MLEFit:
    """Nonsignaling ML behavior for counts indexed [x, y, a, b].

    Cells with zero counts may sit at P = 0 at the optimum.  They get a log
    barrier of weight mu that is driven from 1 down to 1e-12 of the total
    count, so the reported likelihood is within ``(#zero cells) * mu`` of the
    optimum.  ``stationarity`` is the largest component of the (barrier)
    gradient projected on the feasible directions, divided by the total
    count; the fit is ``converged`` when the last stage drops it below ``tol``.
    """
    n = np.asarray(counts, dtype=float).reshape(-1)
    if n.size != 36:
        raise ValueError("counts must have 36 entries")
    if np.any(n < 0):
        raise ValueError("counts must be nonnegative")
    slice_totals = n.reshape(4, 9).sum(axis=1)
    if np.any(slice_totals <= 0):
        raise ValueError("every setting slice needs at least one count")
    total = float(n.sum())
    p0, z = _affine_frame()

    # start from the Euclidean projection of the frequencies if it is interior
    freq = (n.reshape(4, 9) / slice_totals[:, None]).reshape(-1)
    theta = z.T @ (freq - p0)
    if np.min(p0 + z @ theta) <= 1e-12:
        theta = np.zeros(z.shape[1])

    empty = n == 0
    mus = [0.0]
    if np.any(empty):
        mu_min = 1e-12 * total
        mus = list(np.geomspace(1.0, mu_min, 13)) if mu_min < 1.0 else [mu_min]
    used = 0
    for mu in mus:
        w = n + mu * empty
        theta, stationarity, converged, it = _newton(w, theta, p0, z, total, tol,
                                                     max(1, max_iter - used))
        used += it
    p = p0 + z @ theta
    value = _loglik(n, p)
    p = np.clip(p, 0.0, None)
    p = (p.reshape(4, 9) / p.reshape(4, 9).sum(axis=1, keepdims=True)).reshape(bh.SHAPE)
    fitted = bh.Behavior(p)
    return MLEFit(fitted, bh.i_a(fitted), value, converged, used, stationarity)
