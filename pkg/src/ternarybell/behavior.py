"""Behavior tables P(a,b|x,y) for two settings and three outcomes per party.

Arrays are indexed ``p[x, y, a, b]``.  Entries are either floats or exact
:class:`fractions.Fraction` values (numpy ``object`` dtype); every function in
this module works on both and stays exact on exact input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, NamedTuple

import numpy as np

N_SETTINGS = 2
N_OUTCOMES = 3
SHAPE = (N_SETTINGS, N_SETTINGS, N_OUTCOMES, N_OUTCOMES)

DEFAULT_TOL = 1e-10
JSON_SCHEMA = "behavior/1"


def _sign(*idx: int) -> int:
    return -1 if sum(idx) % 2 else 1


# Coefficient tables of the three linear functionals, indexed like p.
IA_COEFFS = np.zeros(SHAPE, dtype=int)
XA_COEFFS = np.zeros(SHAPE, dtype=int)
XB_COEFFS = np.zeros(SHAPE, dtype=int)
for _x in range(2):
    for _y in range(2):
        for _k in range(2):
            IA_COEFFS[_x, _y, _k, _k] = _sign(_k, _x, _y)
            XA_COEFFS[_x, _y, _k, :] = _sign(_k, _x, _y)
            XB_COEFFS[_x, _y, :, _k] = _sign(_k, _x, _y)
for _arr in (IA_COEFFS, XA_COEFFS, XB_COEFFS):
    _arr.setflags(write=False)


class BehaviorError(ValueError):
    """Raised for tables that are not valid behaviors."""


@dataclass(frozen=True, eq=False)
class Behavior:
    """Joint conditional distribution ``P(a,b|x,y)``.

    ``p`` is stored read-only.  Exact behaviors (Fraction entries) are checked
    for exact normalization; float behaviors within ``tol``.
    """

    p: np.ndarray
    tol: float = 1e-9

    def __post_init__(self):
        p = np.array(self.p, dtype=object if _is_exact_like(self.p) else float)
        if p.shape != SHAPE:
            raise BehaviorError(f"behavior must have shape {SHAPE}, got {p.shape}")
        if p.dtype == object:
            p = np.vectorize(Fraction, otypes=[object])(p)
        if np.any(p < 0):
            raise BehaviorError("behavior has negative entries")
        sums = p.sum(axis=(2, 3))
        if p.dtype == object:
            if any(s != 1 for s in sums.flat):
                raise BehaviorError("setting slices are not exactly normalized")
        elif np.max(np.abs(sums - 1.0)) > self.tol:
            raise BehaviorError("setting slices do not sum to 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def exact(self) -> bool:
        return self.p.dtype == object

    @classmethod
    def uniform(cls, exact: bool = False) -> Behavior:
        if exact:
            return cls(np.full(SHAPE, Fraction(1, 9), dtype=object))
        return cls(np.full(SHAPE, 1.0 / 9.0))

    @classmethod
    def deterministic(cls, alice, bob) -> Behavior:
        """Exact deterministic behavior: Alice outputs ``alice[x]``, Bob ``bob[y]``."""
        p = np.full(SHAPE, Fraction(0), dtype=object)
        for x in range(2):
            for y in range(2):
                p[x, y, alice[x], bob[y]] = Fraction(1)
        return cls(p)

    @classmethod
    def from_counts(cls, counts) -> Behavior:
        """Empirical frequencies N(a,b|x,y) / sum_ab N(a,b|x,y)."""
        counts = np.asarray(counts, dtype=float)
        totals = counts.sum(axis=(2, 3), keepdims=True)
        if np.any(totals <= 0):
            raise BehaviorError("every setting slice needs a positive total")
        return cls(counts / totals)

    def to_float(self) -> Behavior:
        if not self.exact:
            return self
        return Behavior(self.p.astype(float))

    def marginals(self) -> Marginals:
        return marginals(self)

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"Behavior({kind}, I_a={i_a(self)})"


def _is_exact_like(p) -> bool:
    arr = np.asarray(p, dtype=object)
    return arr.size > 0 and all(isinstance(v, (Fraction, int)) and not isinstance(v, bool)
                                for v in arr.flat) and any(isinstance(v, Fraction) for v in arr.flat)


def _table(b) -> np.ndarray:
    return b.p if isinstance(b, Behavior) else np.asarray(b)


def _contract(coeffs: np.ndarray, b) -> Any:
    p = _table(b)
    if p.dtype == object:
        return sum((int(c) * v for c, v in zip(coeffs.flat, p.flat) if c), Fraction(0))
    return float(np.sum(coeffs * p))


def i_a(b) -> Any:
    """Signed sum of P(k,k|x,y) over k, x, y in {0, 1}."""
    return _contract(IA_COEFFS, b)


def x_a(b) -> Any:
    """Alice auxiliary sum; vanishes on every nonsignaling behavior."""
    return _contract(XA_COEFFS, b)


def x_b(b) -> Any:
    """Bob auxiliary sum; vanishes on every nonsignaling behavior."""
    return _contract(XB_COEFFS, b)


class Marginals(NamedTuple):
    """Local marginals.

    ``pA[x, y, a]`` is Alice's marginal computed inside slice (x, y), likewise
    ``pB[x, y, b]``.  For nonsignaling behaviors ``pA`` does not depend on y
    and ``pB`` does not depend on x; ``alice``/``bob`` then give P_A(a|x) and
    P_B(b|y) (read from the y=0 and x=0 slices respectively).
    """

    pA: np.ndarray
    pB: np.ndarray

    @property
    def alice(self) -> np.ndarray:
        return self.pA[:, 0, :]

    @property
    def bob(self) -> np.ndarray:
        return self.pB[0, :, :]


def marginals(b) -> Marginals:
    p = _table(b)
    return Marginals(p.sum(axis=3), p.sum(axis=2))


class SignalingViolation(NamedTuple):
    party: str  # "A" or "B"
    outcome: int
    setting: int  # the party's own setting
    delta: Any  # marginal at remote setting 0 minus remote setting 1


def check_nonsignaling(b, tol: float = DEFAULT_TOL) -> list[SignalingViolation]:
    """All marginal equalities violated by more than ``tol``.

    Exact tables are compared exactly when ``tol`` is 0.
    """
    m = marginals(b)
    out = []
    for x in range(2):
        for a in range(3):
            delta = m.pA[x, 0, a] - m.pA[x, 1, a]
            if abs(delta) > tol:
                out.append(SignalingViolation("A", a, x, delta))
    for y in range(2):
        for bb in range(3):
            delta = m.pB[0, y, bb] - m.pB[1, y, bb]
            if abs(delta) > tol:
                out.append(SignalingViolation("B", bb, y, delta))
    return out


def is_nonsignaling(b, tol: float = DEFAULT_TOL) -> bool:
    return not check_nonsignaling(b, tol)


def mix(weight: float, b1: Behavior, b2: Behavior) -> Behavior:
    """Convex combination ``weight*b1 + (1-weight)*b2``."""
    return Behavior(weight * b1.p + (1 - weight) * b2.p)


def _encode(v) -> Any:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return float(v)


def to_json(b: Behavior) -> dict:
    """JSON-ready dict.  ``p`` is nested in x, y, a, b order."""
    nested = [[[[_encode(b.p[x, y, a, bb]) for bb in range(3)] for a in range(3)]
               for y in range(2)] for x in range(2)]
    return {"schema": JSON_SCHEMA, "index_order": ["x", "y", "a", "b"],
            "exact": b.exact, "p": nested}


def from_json(d: dict) -> Behavior:
    if d.get("index_order", ["x", "y", "a", "b"]) != ["x", "y", "a", "b"]:
        raise BehaviorError("unsupported index order")
    raw = np.array(d["p"], dtype=object)
    if d.get("exact"):
        return Behavior(np.vectorize(Fraction, otypes=[object])(raw))
    return Behavior(raw.astype(float))
