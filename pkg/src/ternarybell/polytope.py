"""Exact certification of the binary-nonsignaling and nonsignaling bounds on I_a.

Every computation here uses :class:`fractions.Fraction`.

Binary nonsignaling behaviors are convex hulls of two-outcome nonsignaling
boxes embedded into the three-outcome scenario: for each setting one outcome
is precluded (a :class:`SupportChoice`) and the remaining two outcomes carry
an extremal point of the two-setting, two-outcome nonsignaling polytope.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import behavior as bh
from .behavior import Behavior
from .rational_lp import maximize

HALF = Fraction(1, 2)
ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True, order=True)
class SupportChoice:
    """Precluded outcome per setting: ``precluded_a[x]`` for Alice, ``precluded_b[y]`` for Bob."""

    precluded_a: tuple[int, int]
    precluded_b: tuple[int, int]

    def __post_init__(self):
        if len(self.precluded_a) != 2 or len(self.precluded_b) != 2:
            raise ValueError("need one precluded outcome per setting")
        if any(v not in (0, 1, 2) for v in (*self.precluded_a, *self.precluded_b)):
            raise ValueError("precluded outcomes must lie in {0, 1, 2}")

    def kept_a(self, x: int) -> tuple[int, int]:
        return tuple(o for o in range(3) if o != self.precluded_a[x])

    def kept_b(self, y: int) -> tuple[int, int]:
        return tuple(o for o in range(3) if o != self.precluded_b[y])

    @classmethod
    def all(cls) -> list[SupportChoice]:
        return [cls((a0, a1), (b0, b1))
                for a0, a1, b0, b1 in itertools.product(range(3), repeat=4)]


@dataclass(frozen=True, eq=False)
class RationalBehavior:
    behavior: Behavior
    tag: str  # "deterministic" or "PR-box"
    support: SupportChoice

    @property
    def key(self) -> tuple[Fraction, ...]:
        return tuple(self.behavior.p.flat)


# two-setting, two-outcome nonsignaling boxes; tables indexed [x, y, a, b]

def _empty2222() -> np.ndarray:
    return np.full((2, 2, 2, 2), ZERO, dtype=object)


def deterministic_boxes() -> list[np.ndarray]:
    """The 16 local deterministic two-outcome boxes a = f(x), b = g(y)."""
    out = []
    for fa in itertools.product(range(2), repeat=2):
        for gb in itertools.product(range(2), repeat=2):
            t = _empty2222()
            for x in range(2):
                for y in range(2):
                    t[x, y, fa[x], gb[y]] = ONE
            out.append(t)
    return out


def pr_boxes() -> list[np.ndarray]:
    """The 8 Popescu-Rohrlich boxes: a xor b = xy xor alpha x xor beta y xor gamma, uniform marginals."""
    out = []
    for alpha, beta, gamma in itertools.product(range(2), repeat=3):
        t = _empty2222()
        for x, y, a in itertools.product(range(2), repeat=3):
            b = a ^ (x * y) ^ (alpha * x) ^ (beta * y) ^ gamma
            t[x, y, a, b] = HALF
        out.append(t)
    return out


def _is_ns2222(t: np.ndarray) -> bool:
    pa = t.sum(axis=3)
    pb = t.sum(axis=2)
    return bool(np.all(pa[:, 0] == pa[:, 1]) and np.all(pb[0] == pb[1]))


def bruteforce_ns2222_vertices() -> list[np.ndarray]:
    """Extremal two-outcome nonsignaling boxes, found by exhaustive search.

    Scans every table with entries in {0, 1/2, 1} that is normalized and
    nonsignaling, then keeps the ones that are not the midpoint of two other
    members of that set.  Independent of :func:`deterministic_boxes` and
    :func:`pr_boxes`.
    """
    slices = []
    for cells in itertools.product((ZERO, HALF, ONE), repeat=4):
        if sum(cells) == 1:
            slices.append(np.array(cells, dtype=object).reshape(2, 2))
    candidates = []
    for s00, s01, s10, s11 in itertools.product(slices, repeat=4):
        t = np.array([[s00, s01], [s10, s11]], dtype=object)
        if _is_ns2222(t):
            candidates.append(t)
    index = {tuple(t.flat) for t in candidates}
    vertices = []
    for p in candidates:
        kp = tuple(p.flat)
        is_mid = False
        for q in candidates:
            kq = tuple(q.flat)
            if kq == kp:
                continue
            r = tuple(2 * u - v for u, v in zip(kp, kq))
            if r != kp and r in index:
                is_mid = True
                break
        if not is_mid:
            vertices.append(p)
    vertices.sort(key=lambda t: tuple(t.flat))
    return vertices


def embed(box: np.ndarray, support: SupportChoice) -> Behavior:
    """Place a two-outcome box on the outcomes left open by ``support``."""
    p = np.full(bh.SHAPE, ZERO, dtype=object)
    for x, y in itertools.product(range(2), repeat=2):
        ka, kb = support.kept_a(x), support.kept_b(y)
        for i, j in itertools.product(range(2), repeat=2):
            p[x, y, ka[i], kb[j]] = box[x, y, i, j]
    return Behavior(p)


def embedded_vertices(support: SupportChoice) -> list[RationalBehavior]:
    """The 16 + 8 extremal points for one support choice, before deduplication."""
    return ([RationalBehavior(embed(t, support), "deterministic", support) for t in deterministic_boxes()]
            + [RationalBehavior(embed(t, support), "PR-box", support) for t in pr_boxes()])


def enumerate_binary_ns_vertices(workers: int = 1) -> list[RationalBehavior]:
    """Extremal binary nonsignaling behaviors over all 81 support choices.

    Exact duplicates (deterministic points shared between supports) are
    merged; the first support in canonical order is kept.  Output is sorted by
    the exact table entries.
    """
    supports = SupportChoice.all()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            per_support = list(pool.map(embedded_vertices, supports))
    else:
        per_support = [embedded_vertices(s) for s in supports]
    seen: dict[tuple, RationalBehavior] = {}
    for group in per_support:
        for v in group:
            seen.setdefault(v.key, v)
    return sorted(seen.values(), key=lambda v: v.key)


def max_ia_binary(vertices: Iterable[RationalBehavior] | None = None, tag: str | None = None) -> Fraction:
    """Exact maximum of I_a over binary nonsignaling vertices (optionally one tag only)."""
    if vertices is None:
        vertices = enumerate_binary_ns_vertices()
    values = [bh.i_a(v.behavior) for v in vertices if tag is None or v.tag == tag]
    if not values:
        raise ValueError(f"no vertices with tag {tag!r}")
    return max(values)


@dataclass(frozen=True)
class CoefficientCertificate:
    """Coefficients of 3*I_a - X_A - X_B in the 36 coordinates P(a,b|x,y)."""

    coefficients: np.ndarray  # int, indexed [x, y, a, b]
    passed: bool
    ns_bound: Fraction

    def to_json(self) -> dict:
        return {
            "expression": "3*I_a - X_A - X_B",
            "index_order": ["x", "y", "a", "b"],
            "coefficients": self.coefficients.tolist(),
            "all_in_minus1_0_1": self.passed,
            "ns_bound": f"{self.ns_bound.numerator}/{self.ns_bound.denominator}",
        }


def certify_coefficient_argument() -> CoefficientCertificate:
    """Expand 3*I_a - X_A - X_B and check every coefficient is -1, 0 or +1.

    With slice normalization the total mass is 4, and X_A = X_B = 0 on
    nonsignaling behaviors, so passing implies I_a <= 4/3 there.
    """
    coeffs = 3 * bh.IA_COEFFS - bh.XA_COEFFS - bh.XB_COEFFS
    passed = bool(np.all(np.isin(coeffs, (-1, 0, 1))))
    bound = Fraction(bh.N_SETTINGS * bh.N_SETTINGS, 3) if passed else None
    return CoefficientCertificate(coeffs, passed, bound)


def _var_index(x: int, y: int, a: int, b: int) -> int:
    return ((x * 2 + y) * 3 + a) * 3 + b


def ns_constraints() -> tuple[list[list[int]], list[int]]:
    """4 normalization rows followed by 12 marginal-equality rows (Alice then Bob)."""
    rows, rhs = [], []
    for x, y in itertools.product(range(2), repeat=2):
        r = [0] * 36
        for a, b in itertools.product(range(3), repeat=2):
            r[_var_index(x, y, a, b)] = 1
        rows.append(r)
        rhs.append(1)
    for x in range(2):
        for a in range(3):
            r = [0] * 36
            for b in range(3):
                r[_var_index(x, 0, a, b)] += 1
                r[_var_index(x, 1, a, b)] -= 1
            rows.append(r)
            rhs.append(0)
    for y in range(2):
        for b in range(3):
            r = [0] * 36
            for a in range(3):
                r[_var_index(0, y, a, b)] += 1
                r[_var_index(1, y, a, b)] -= 1
            rows.append(r)
            rhs.append(0)
    return rows, rhs


def max_ia_nonsignaling_lp(minimize: bool = False,
                           support: SupportChoice | None = None) -> Fraction:
    """Exact optimum of I_a over nonsignaling behaviors.

    ``minimize`` returns the minimum instead.  With ``support`` the precluded
    outcomes are forced to zero, i.e. the LP runs over the binary face for
    that support choice.
    """
    rows, rhs = ns_constraints()
    if support is not None:
        for x, y, a, b in itertools.product(range(2), range(2), range(3), range(3)):
            if a == support.precluded_a[x] or b == support.precluded_b[y]:
                r = [0] * 36
                r[_var_index(x, y, a, b)] = 1
                rows.append(r)
                rhs.append(0)
    sign = -1 if minimize else 1
    c = [sign * int(v) for v in bh.IA_COEFFS.flat]
    result = maximize(c, rows, rhs)
    return sign * result.value


def lp_optimal_behavior() -> Behavior:
    """A maximizer of the nonsignaling LP, as an exact behavior."""
    rows, rhs = ns_constraints()
    result = maximize([int(v) for v in bh.IA_COEFFS.flat], rows, rhs)
    return Behavior(np.array(result.x, dtype=object).reshape(bh.SHAPE))


def _frac_str(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def bound_certificate() -> dict:
    """Everything the ``bound`` command reports, as exact strings."""
    vertices = enumerate_binary_ns_vertices()
    cert = certify_coefficient_argument()
    tags = {}
    for v in vertices:
        tags[v.tag] = tags.get(v.tag, 0) + 1
    return {
        "schema": "1",
        "vertex_count": len(vertices),
        "vertex_count_by_tag": tags,
        "binary_ns_max": _frac_str(max_ia_binary(vertices)),
        "binary_ns_max_deterministic": _frac_str(max_ia_binary(vertices, "deterministic")),
        "binary_ns_max_pr_box": _frac_str(max_ia_binary(vertices, "PR-box")),
        "ns_max_lp": _frac_str(max_ia_nonsignaling_lp()),
        "ns_min_lp": _frac_str(max_ia_nonsignaling_lp(minimize=True)),
        "coefficient_certificate": cert.to_json(),
    }
