"""See-saw search for the largest quantum value of I_a with qutrits.

The state step takes the top eigenvector of the Bell operator.  The
measurement step does gradient ascent on each basis unitary ``U``, moving
along ``U -> U exp(i t G)`` with ``G`` Hermitian (9 real generator
coordinates per basis) and a backtracking step ``t = 1, 1/2, 1/4, ...``.
Both steps never decrease I_a, so values are monotone within a restart.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .jacobi import top_eigenpair
from .qcore import MeasurementBasis, TwoQutritState, haar_unitary

NS_CAP = 4.0 / 3.0

# (k, x, y, sign) for the four nonzero sign patterns of I_a
_TERMS = [(k, x, y, -1.0 if (k + x + y) % 2 else 1.0)
          for k in range(2) for x in range(2) for y in range(2)]


@dataclass(frozen=True, eq=False)
class VariationalPoint:
    state: TwoQutritState
    alice_bases: tuple[MeasurementBasis, MeasurementBasis]
    bob_bases: tuple[MeasurementBasis, MeasurementBasis]
    value: float
    iterations: int = 0
    converged: bool = True
    restart: int = 0
    history: tuple[float, ...] = field(default=(), repr=False)

    def to_json(self) -> dict:
        def cvec(v):
            return [[float(z.real), float(z.imag)] for z in v]
        return {
            "value": float(self.value),
            "iterations": self.iterations,
            "converged": self.converged,
            "restart": self.restart,
            "state": cvec(self.state.amplitudes),
            "alice_bases": [[cvec(v) for v in b.vectors] for b in self.alice_bases],
            "bob_bases": [[cvec(v) for v in b.vectors] for b in self.bob_bases],
        }


def bell_operator(alice: Sequence[MeasurementBasis], bob: Sequence[MeasurementBasis]) -> np.ndarray:
    """9x9 operator whose expectation in any state is I_a."""
    op = np.zeros((9, 9), dtype=complex)
    for k, x, y, s in _TERMS:
        op += s * np.kron(alice[x].projector(k), bob[y].projector(k))
    return 0.5 * (op + op.conj().T)


def hermitian_from_coords(coords: Sequence[float]) -> np.ndarray:
    """3x3 Hermitian matrix from 9 reals: 3 diagonal, then 3 real and 3 imaginary upper parts."""
    c = np.asarray(coords, dtype=float)
    h = np.diag(c[:3]).astype(complex)
    iu = np.triu_indices(3, 1)
    h[iu] = c[3:6] + 1j * c[6:9]
    h[(iu[1], iu[0])] = c[3:6] - 1j * c[6:9]
    return h


def coords_from_hermitian(h: np.ndarray) -> np.ndarray:
    iu = np.triu_indices(3, 1)
    return np.concatenate([np.diag(h).real, h[iu].real, h[iu].imag])


def expi(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(i t h) for Hermitian h."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * t * w)) @ v.conj().T


def unitary_from_coords(coords: Sequence[float]) -> np.ndarray:
    return expi(hermitian_from_coords(coords))


def _value(psi: np.ndarray, ua: Sequence[np.ndarray], ub: Sequence[np.ndarray]) -> float:
    # amplitudes <eta_a|x (x) eta_b|y | psi> = (U_x^dag Psi U_y^*)_{ab}
    total = 0.0
    for x in range(2):
        for y in range(2):
            amp = ua[x].conj().T @ psi @ ub[y].conj()
            pr = np.abs(amp) ** 2
            s = 1.0 if (x + y) % 2 == 0 else -1.0
            total += s * (pr[0, 0] - pr[1, 1])
    return float(total)


def _generators(psi: np.ndarray, ua, ub) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Steepest-ascent Hermitian generators for every basis unitary."""
    def party(u_own, u_other, psi_mat):
        out = []
        for x in range(2):
            u = u_own[x]
            omega = np.zeros((3, 3), dtype=complex)
            for k in range(2):
                m = np.zeros((3, 3), dtype=complex)
                for y in range(2):
                    s = -1.0 if (k + x + y) % 2 else 1.0
                    eta = u_other[y][:, k]
                    proj_t = np.outer(eta.conj(), eta)  # transpose of |eta><eta|
                    m += s * psi_mat @ proj_t @ psi_mat.conj().T
                mt = u.conj().T @ m @ u
                e = np.zeros((3, 3))
                e[k, k] = 1.0
                omega += 1j * (e @ mt - mt @ e)
            out.append(0.5 * (omega + omega.conj().T))
        return out

    return party(ua, ub, psi), party(ub, ua, psi.T)


def _state_step(ua, ub, subspace: int) -> tuple[float, np.ndarray]:
    alice = [MeasurementBasis.from_unitary(u) for u in ua]
    bob = [MeasurementBasis.from_unitary(u) for u in ub]
    op = bell_operator(alice, bob)
    if subspace == 3:
        val, vec = top_eigenpair(op)
        return val, vec.reshape(3, 3)
    keep = [i * 3 + j for i in range(subspace) for j in range(subspace)]
    val, vec = top_eigenpair(op[np.ix_(keep, keep)])
    full = np.zeros(9, dtype=complex)
    full[keep] = vec
    return val, full.reshape(3, 3)


def _measurement_step(psi, ua, ub, inner_steps: int, min_step: float = 1e-10):
    value = _value(psi, ua, ub)
    for _ in range(inner_steps):
        ga, gb = _generators(psi, ua, ub)
        t = 1.0
        improved = False
        while t >= min_step:
            na = [u @ expi(g, t) for u, g in zip(ua, ga)]
            nb = [u @ expi(g, t) for u, g in zip(ub, gb)]
            nv = _value(psi, na, nb)
            if nv > value:
                ua, ub, value, improved = na, nb, nv, True
                break
            t *= 0.5
        if not improved:
            break
    return ua, ub, value


def _to_point(psi, ua, ub, value, iterations, converged, restart, history) -> VariationalPoint:
    return VariationalPoint(
        TwoQutritState(psi.reshape(-1)),
        tuple(MeasurementBasis.from_unitary(u) for u in ua),
        tuple(MeasurementBasis.from_unitary(u) for u in ub),
        float(value), iterations, converged, restart, tuple(history))


def see_saw(alice_unitaries: Sequence[np.ndarray], bob_unitaries: Sequence[np.ndarray],
            max_iters: int = 500, tol: float = 1e-10, inner_steps: int = 20,
            subspace: int = 3, restart: int = 0) -> VariationalPoint:
    """One see-saw run from the given basis unitaries (columns = basis vectors).

    ``subspace=2`` confines the state to the span of the first two levels on
    both sides while measurements stay three-outcome qutrit bases.
    """
    if subspace not in (2, 3):
        raise ValueError("subspace must be 2 or 3")
    ua = [np.asarray(u, dtype=complex) for u in alice_unitaries]
    ub = [np.asarray(u, dtype=complex) for u in bob_unitaries]
    value, psi = _state_step(ua, ub, subspace)
    history = [value]
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        ua, ub, _ = _measurement_step(psi, ua, ub, inner_steps)
        new_value, psi = _state_step(ua, ub, subspace)
        history.append(new_value)
        gain = new_value - value
        value = max(value, new_value)
        if gain < tol:
            converged = True
            break
    return _to_point(psi, ua, ub, value, it, converged, restart, history)


def _one_restart(args) -> VariationalPoint:
    seed, r, max_iters, tol, inner_steps, subspace = args
    rng = np.random.default_rng(seed + r)
    ua = [haar_unitary(rng) for _ in range(2)]
    ub = [haar_unitary(rng) for _ in range(2)]
    return see_saw(ua, ub, max_iters, tol, inner_steps, subspace, restart=r)


def optimize(seed: int = 0, restarts: int = 20, max_iters: int = 500, tol: float = 1e-10,
             inner_steps: int = 20, subspace: int = 3, workers: int = 1) -> VariationalPoint:
    """Best see-saw point over ``restarts`` Haar-random starts.

    Restart ``r`` uses generator seed ``seed + r``; ties go to the lowest
    restart index, so the result does not depend on ``workers``.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    jobs = [(seed, r, max_iters, tol, inner_steps, subspace) for r in range(restarts)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            points = list(pool.map(_one_restart, jobs))
    else:
        points = [_one_restart(j) for j in jobs]
    best = points[0]
    for p in points[1:]:
        if p.value > best.value:
            best = p
    return best
