"""Evaluation of coincidence data grouped into complete sets.

A complete set holds one run for each of the four setting pairs.  Three
conditions are tested on the per-set count tables N_r(a,b|x,y):

(i)   normalization: slice totals do not depend on (x, y), 3 differences;
(ii)  nonsignaling: local marginal counts do not depend on the remote
      setting, 11 independent differences;
(iii) binary bound: sum_{k,x,y} (-1)^{k+x+y} N_r(k,k|x,y) - N_r/4 <= 0.

Each per-set quantity is averaged over sets, turned into a Student-t value
and rescaled to an approximately normal z.  Joint conditions use the
chi-square distribution of the summed z^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy import stats as sps

from . import behavior as bh
from .simlab import RunRecord

SETTING_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))

N_NORMALIZATION = 3
N_NONSIGNALING = 11

# labels of the 12 marginal differences, in order; the last one is dropped by default
NONSIGNALING_LABELS = tuple(
    [f"A a={a} x={x}" for x in range(2) for a in range(3)]
    + [f"B b={b} y={y}" for y in range(2) for b in range(3)]
)
DEFAULT_DROPPED = 11


class DegenerateDataError(ValueError):
    """Per-set values have zero variance, so no t statistic exists."""


@dataclass(frozen=True, eq=False)
class CompleteSet:
    index: int  # 1-based
    counts: np.ndarray  # int, [x, y, a, b]
    runs: tuple[int, int, int, int] = ()

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64)
        if c.shape != bh.SHAPE:
            raise ValueError(f"counts must have shape {bh.SHAPE}")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def slice_totals(self) -> np.ndarray:
        return self.counts.sum(axis=(2, 3))

    @classmethod
    def from_tables(cls, index: int, tables: dict) -> CompleteSet:
        """Build from ``{(x, y): 3x3 counts}``."""
        c = np.zeros(bh.SHAPE, dtype=np.int64)
        for (x, y), t in tables.items():
            c[x, y] = np.asarray(t)
        return cls(index, c)


class Grouping(NamedTuple):
    sets: list[CompleteSet]
    discarded: list[int]  # run indices not used by any set


def group_runs(records: Iterable[RunRecord]) -> Grouping:
    """The r-th complete set combines the r-th run of each setting-pair stream.

    Streams are ordered by start time (ties by run index).  The number of sets
    is the length of the shortest stream; the surplus runs are discarded.
    """
    streams: dict[tuple[int, int], list[RunRecord]] = {xy: [] for xy in SETTING_PAIRS}
    for rec in sorted(records, key=lambda r: (r.t_start, r.run_index)):
        streams[(rec.x, rec.y)].append(rec)
    n_sets = min(len(s) for s in streams.values())
    sets = []
    for r in range(n_sets):
        c = np.zeros(bh.SHAPE, dtype=np.int64)
        runs = []
        for x, y in SETTING_PAIRS:
            rec = streams[(x, y)][r]
            c[x, y] = rec.count_array
            runs.append(rec.run_index)
        sets.append(CompleteSet(r + 1, c, tuple(runs)))
    discarded = sorted(rec.run_index for s in streams.values() for rec in s[n_sets:])
    return Grouping(sets, discarded)


def group_complete_sets(records: Iterable[RunRecord]) -> list[CompleteSet]:
    return group_runs(records).sets


def _counts(s) -> np.ndarray:
    return s.counts if isinstance(s, CompleteSet) else np.asarray(s)


def condition_normalization(s) -> np.ndarray:
    """T(x,y) - T(0,0) for (x,y) = (0,1), (1,0), (1,1)."""
    t = _counts(s).sum(axis=(2, 3))
    return np.array([t[0, 1] - t[0, 0], t[1, 0] - t[0, 0], t[1, 1] - t[0, 0]], dtype=float)


def nonsignaling_differences(s) -> np.ndarray:
    """All 12 marginal-count differences (remote setting 0 minus remote setting 1).

    Order matches :data:`NONSIGNALING_LABELS`.  They satisfy one linear
    relation: (Alice x=0) - (Alice x=1) - (Bob y=0) + (Bob y=1) = 0, each
    term summed over the outcomes.
    """
    c = _counts(s)
    ma = c.sum(axis=3)  # [x, y, a]
    mb = c.sum(axis=2)  # [x, y, b]
    alice = [ma[x, 0, a] - ma[x, 1, a] for x in range(2) for a in range(3)]
    bob = [mb[0, y, b] - mb[1, y, b] for y in range(2) for b in range(3)]
    return np.array(alice + bob, dtype=float)


def condition_nonsignaling(s, dropped: int = DEFAULT_DROPPED) -> np.ndarray:
    """11 independent marginal-count differences (one of the 12 removed)."""
    return np.delete(nonsignaling_differences(s), dropped)


def condition_binary(s) -> float:
    """Count-level binary bound; positive values violate it."""
    c = _counts(s)
    return float(np.sum(bh.IA_COEFFS * c) - 0.25 * np.sum(c))


@dataclass(frozen=True, eq=False)
class ConditionStat:
    name: str
    values: np.ndarray = field(repr=False)
    m: float
    v: float
    t: float
    z: float
    g: int


def aggregate(values: Sequence[float], name: str = "") -> ConditionStat:
    """Mean, unbiased variance, t = m sqrt(R/v) and z = t sqrt((g-2)/g), g = R-1."""
    vals = np.asarray(values, dtype=float)
    n = vals.size
    if n < 3:
        raise ValueError("need at least 3 sets")
    m = float(np.mean(vals))
    v = float(np.var(vals, ddof=1))
    if v == 0.0:
        raise DegenerateDataError(f"condition {name!r} has zero variance across sets")
    g = n - 1
    t = m * math.sqrt(n / v)
    z = t * math.sqrt((g - 2) / g)
    return ConditionStat(name, vals, m, v, t, z, g)


class ChiSquare(NamedTuple):
    chi2: float
    dof: int
    p: float
    conservative_applied: bool


def joint_chi2(stats: Sequence[ConditionStat], dof: int | None = None,
               conservative: bool = False) -> ChiSquare:
    """p-value of sum z^2 under the chi-square distribution.

    With ``conservative`` set, a sum below the distribution median is judged
    by its lower tail and that probability is doubled.
    """
    dof = len(stats) if dof is None else dof
    chi2 = float(sum(s.z ** 2 for s in stats))
    dist = sps.chi2(dof)
    if conservative and chi2 < dist.median():
        return ChiSquare(chi2, dof, min(1.0, 2.0 * float(dist.cdf(chi2))), True)
    return ChiSquare(chi2, dof, float(dist.sf(chi2)), False)


def inequality_p_value(z: float) -> float:
    """Two-sided normal tail for a violation of size z; 1 when not violated."""
    if z <= 0:
        return 1.0
    return min(1.0, 2.0 * float(sps.norm.sf(z)))


def p_conversions(p: float) -> tuple[float, float]:
    """(coin tosses, standard deviations) for a p-value.

    Coin tosses are -log2 p; standard deviations use the two-sided normal
    convention, i.e. the s with P(|Z| > s) = p.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    coins = -math.log2(p)
    sigmas = float(sps.norm.isf(p / 2.0)) if p < 1.0 else 0.0
    return (coins + 0.0, max(sigmas, 0.0))


def sigmas_to_p(s: float) -> float:
    return float(2.0 * sps.norm.sf(s))


class EmpiricalIa(NamedTuple):
    mean: float
    standard_error: float
    values: np.ndarray
    excluded: list[int]  # indices of sets with an empty slice


def empirical_ia(sets: Sequence[CompleteSet]) -> EmpiricalIa:
    """Per-set I_a from the empirical frequencies, with mean and standard error."""
    values, excluded = [], []
    for s in sets:
        c = _counts(s).astype(float)
        totals = c.sum(axis=(2, 3), keepdims=True)
        if np.any(totals == 0):
            excluded.append(getattr(s, "index", len(values) + len(excluded) + 1))
            continue
        values.append(bh.i_a(c / totals))
    vals = np.array(values)
    if vals.size == 0:
        raise ValueError("no set has four nonempty slices")
    se = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else float("nan")
    return EmpiricalIa(float(np.mean(vals)), se, vals, excluded)


def reduce_every_fifth(sets: Sequence) -> list:
    """Keep sets 1, 6, 11, ... (1-based), i.e. the first of each block of five."""
    return list(sets[::5])


def pooled_counts(sets: Sequence[CompleteSet]) -> np.ndarray:
    return np.sum([_counts(s) for s in sets], axis=0)


@dataclass(frozen=True)
class ConditionResult:
    name: str
    p: float
    coin_tosses: float
    standard_deviations: float
    statistic: float  # chi-square for (i)/(ii), z for (iii)
    dof: int
    conservative_applied: bool = False


@dataclass(frozen=True)
class MLEResult:
    raw_pooled_ia: float
    fitted_ia: float
    converged: bool
    iterations: int
    stationarity: float


@dataclass(frozen=True)
class AnalysisReport:
    label: str
    n_sets: int
    n_discarded: int
    ia_mean: float
    ia_standard_error: float
    conditions: tuple[ConditionResult, ...]
    mean_coincidences_per_set: float
    mle: MLEResult | None = None

    def condition(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        out = {
            "schema": "1",
            "label": self.label,
            "n_sets": self.n_sets,
            "n_discarded_runs": self.n_discarded,
            "mean_coincidences_per_set": self.mean_coincidences_per_set,
            "ia": {"mean": self.ia_mean, "standard_error": self.ia_standard_error},
            "conditions": [c.__dict__.copy() for c in self.conditions],
        }
        if self.mle is not None:
            out["mle"] = self.mle.__dict__.copy()
        return out


def _result(name: str, p: float, statistic: float, dof: int, conservative: bool = False) -> ConditionResult:
    coins, sig = p_conversions(p) if p > 0 else (math.inf, math.inf)
    return ConditionResult(name, p, coins, sig, statistic, dof, conservative)


def analyze_sets(sets: Sequence[CompleteSet], label: str = "full", n_discarded: int = 0,
                 mle_fit: bool = False, dropped: int = DEFAULT_DROPPED) -> AnalysisReport:
    """Conditions (i)-(iii), empirical I_a and optionally the nonsignaling ML fit."""
    if len(sets) < 3:
        raise ValueError(f"need at least 3 complete sets, got {len(sets)}")
    norm_vals = np.array([condition_normalization(s) for s in sets])
    ns_vals = np.array([condition_nonsignaling(s, dropped) for s in sets])
    bin_vals = np.array([condition_binary(s) for s in sets])

    norm_stats = [aggregate(norm_vals[:, j], f"(i).{j}") for j in range(N_NORMALIZATION)]
    ns_stats = [aggregate(ns_vals[:, j], f"(ii).{j}") for j in range(N_NONSIGNALING)]
    bin_stat = aggregate(bin_vals, "(iii)")

    c1 = joint_chi2(norm_stats, N_NORMALIZATION, conservative=True)
    c2 = joint_chi2(ns_stats, N_NONSIGNALING, conservative=True)
    p3 = inequality_p_value(bin_stat.z)
    conditions = (
        _result("(i)", c1.p, c1.chi2, c1.dof, c1.conservative_applied),
        _result("(ii)", c2.p, c2.chi2, c2.dof, c2.conservative_applied),
        _result("(iii)", p3, bin_stat.z, 1),
    )
    emp = empirical_ia(sets)
    mle = None
    if mle_fit:
        from .mle import mle_nonsignaling_fit

        pooled = pooled_counts(sets)
        fit = mle_nonsignaling_fit(pooled)
        mle = MLEResult(bh.i_a(bh.Behavior.from_counts(pooled)), fit.i_a, fit.converged,
                        fit.iterations, fit.stationarity)
    mean_counts = float(np.mean([_counts(s).sum() for s in sets]))
    return AnalysisReport(label, len(sets), n_discarded, emp.mean, emp.standard_error,
                          conditions, mean_counts, mle)


def analyze(records: Iterable[RunRecord], reduced: bool = False, mle_fit: bool = False,
            dropped: int = DEFAULT_DROPPED) -> AnalysisReport:
    grouping = group_runs(records)
    sets = grouping.sets
    label = "full"
    if reduced:
        sets = reduce_every_fifth(sets)
        label = "reduced"
    return analyze_sets(sets, label, len(grouping.discarded), mle_fit, dropped)


def _fmt_p(p: float) -> str:
    if p == 0:
        return "0"
    if p >= 1e-3:
        return f"{p:.3g}"
    return f"{p:.3g}".replace("e-0", "e-")


def format_table(reports: Sequence[AnalysisReport]) -> str:
    """Plain-text table with the columns Condition, p-value, Coin tosses, Standard deviations."""
    lines = [f"{'Condition':<10}{'p-value':>12}{'Coin tosses':>14}{'Standard deviations':>22}"]
    for rep in reports:
        lines.append(f"{rep.label} data set using {rep.n_sets} repetitions: "
                     f"I_a = {rep.ia_mean:.3f} +- {rep.ia_standard_error:.3f}")
        for c in rep.conditions:
            mark = "a" if c.conservative_applied else ""
            lines.append(f"{c.name + mark:<10}{_fmt_p(c.p):>12}{c.coin_tosses:>14.3g}"
                         f"{c.standard_deviations:>22.3g}")
        if rep.mle is not None:
            lines.append(f"ML nonsignaling fit: I_a = {rep.mle.fitted_ia:.4f} "
                         f"(pooled raw {rep.mle.raw_pooled_ia:.4f})")
    if any(c.conservative_applied for r in reports for c in r.conditions):
        lines.append("a: chi-square below its median; doubled lower-tail probability reported.")
    return "\n".join(lines)
