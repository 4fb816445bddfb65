"""Qutrit states, projective bases and Born-rule behaviors.

Basis index convention for one photon: 0 = H_u, 1 = V_u, 2 = H_l.
Two-qutrit amplitudes are stored row-major in (Alice, Bob).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .behavior import Behavior

NORM_TOL = 1e-12


class StateError(ValueError):
    pass


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QutritState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.shape != (3,):
            raise StateError("a qutrit state has 3 amplitudes")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_sq - 1.0) <= tol


@dataclass(frozen=True, eq=False)
class TwoQutritState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.shape != (9,):
            raise StateError("a two-qutrit state has 9 amplitudes")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def matrix(self) -> np.ndarray:
        """Amplitudes as a 3x3 array psi[a_A, a_B]."""
        return self.amplitudes.reshape(3, 3)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_sq - 1.0) <= tol

    def reduced_alice(self) -> np.ndarray:
        m = self.matrix
        return m @ m.conj().T

    def reduced_bob(self) -> np.ndarray:
        m = self.matrix
        return m.T @ m.conj()


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Rank-one projective measurement; row k of ``vectors`` is outcome k."""

    vectors: np.ndarray

    def __post_init__(self):
        vecs = _frozen(self.vectors)
        if vecs.shape != (3, 3):
            raise StateError("a qutrit basis has three 3-component vectors")
        object.__setattr__(self, "vectors", vecs)

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> MeasurementBasis:
        """Basis given by the columns of a unitary matrix."""
        return cls(np.asarray(u).T)

    @property
    def unitary(self) -> np.ndarray:
        return self.vectors.T

    def projector(self, k: int) -> np.ndarray:
        v = self.vectors[k]
        return np.outer(v, v.conj())

    def orthonormality_error(self) -> float:
        g = self.vectors.conj() @ self.vectors.T
        return float(np.max(np.abs(g - np.eye(3))))

    def is_orthonormal(self, tol: float = NORM_TOL) -> bool:
        return self.orthonormality_error() <= tol


def canonical_state() -> TwoQutritState:
    """(sqrt2 |00> + |11> - |22>) / 2."""
    amps = np.zeros(9, dtype=complex)
    amps[0] = np.sqrt(2.0) / 2
    amps[4] = 0.5
    amps[8] = -0.5
    return TwoQutritState(amps)


def canonical_basis(setting: int) -> MeasurementBasis:
    """The optimal three-outcome basis for ``setting`` 0 or 1 (same for both parties)."""
    if setting not in (0, 1):
        raise ValueError(f"setting must be 0 or 1, got {setting!r}")
    r3 = np.sqrt(3.0)
    r12 = np.sqrt(12.0)
    s = 1 if setting == 1 else -1
    return MeasurementBasis([
        np.array([2.0, s * (1 + r3), s * (1 - r3)]) / r12,
        np.array([2.0, s * (1 - r3), s * (1 + r3)]) / r12,
        np.array([1.0, -s, -s]) / r3,
    ])


def canonical_bases() -> tuple[MeasurementBasis, MeasurementBasis]:
    return canonical_basis(0), canonical_basis(1)


def computational_basis() -> MeasurementBasis:
    return MeasurementBasis(np.eye(3))


def born_behavior(state: TwoQutritState,
                  alice: Sequence[MeasurementBasis],
                  bob: Sequence[MeasurementBasis],
                  tol: float = 1e-10) -> Behavior:
    """P(a,b|x,y) = |<eta_a|x (x) eta_b|y | psi>|^2."""
    if not state.is_normalized(tol):
        raise StateError(f"state is not normalized (norm^2 = {state.norm_sq})")
    for basis in (*alice, *bob):
        if not basis.is_orthonormal(tol):
            raise StateError("measurement basis is not orthonormal")
    psi = state.matrix
    p = np.empty((2, 2, 3, 3))
    for x, ba in enumerate(alice):
        for y, bb in enumerate(bob):
            amp = ba.vectors.conj() @ psi @ bb.vectors.conj().T
            p[x, y] = np.abs(amp) ** 2
    return Behavior(p)


def canonical_behavior() -> Behavior:
    bases = canonical_bases()
    return born_behavior(canonical_state(), bases, bases)


@dataclass(frozen=True)
class NoiseModel:
    """Isotropic mixing with the uniform behavior at weight ``1 - visibility``."""

    visibility: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must lie in [0, 1], got {self.visibility}")

    def apply(self, behavior: Behavior) -> Behavior:
        v = self.visibility
        return Behavior(v * behavior.to_float().p + (1.0 - v) / 9.0)


def apply_noise(behavior: Behavior, visibility: float) -> Behavior:
    return NoiseModel(visibility).apply(behavior)


def haar_unitary(rng: np.random.Generator, dim: int = 3) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
