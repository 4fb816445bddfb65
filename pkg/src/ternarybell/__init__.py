"""Binary-nonsignaling bounds, quantum maximum and data analysis for the qutrit Bell functional I_a."""

from .behavior import Behavior, check_nonsignaling, i_a, x_a, x_b
from .qcore import (
    MeasurementBasis,
    NoiseModel,
    QutritState,
    TwoQutritState,
    apply_noise,
    born_behavior,
    canonical_basis,
    canonical_behavior,
    canonical_state,
)

QUANTUM_MAX = 2.0 * (2.0 / 3.0) ** 1.5

__all__ = [
    "Behavior", "MeasurementBasis", "NoiseModel", "QUANTUM_MAX", "QutritState", "TwoQutritState",
    "apply_noise", "born_behavior", "canonical_basis", "canonical_behavior", "canonical_state",
    "check_nonsignaling", "i_a", "x_a", "x_b",
]
