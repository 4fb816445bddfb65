import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from conftest import QUANTUM_MAX
from ternarybell import behavior as bh
from ternarybell import simlab
from ternarybell import stats as S
from ternarybell.behavior import Behavior
from ternarybell.qcore import apply_noise, canonical_behavior
from ternarybell.simlab import RunRecord, SimConfig

REFERENCE_CONVERSIONS = [  # p-value, coin tosses, standard deviations, as printed
    (0.213, "2.23", "1.25"),
    (3.66e-4, "11.4", "3.56"),
    (5.95e-21, "67.2", "9.39"),
    (0.340, "1.56", "0.954"),
    (0.0592, "4.08", "1.89"),
    (4.72e-6, "17.7", "4.58"),
]


def rec(i, x, y, counts=None):
    counts = [[1, 0, 0], [0, 1, 0], [0, 0, 1]] if counts is None else counts
    return RunRecord(i, x, y, 0.5 * i, 0.5, counts)


@pytest.fixture(scope="module")
def default_sim():
    return simlab.simulate(SimConfig(seed=0))


# grouping

def test_one_run_per_pair_is_one_set():
    g = S.group_runs([rec(i, x, y) for i, (x, y) in enumerate(S.SETTING_PAIRS)])
    assert len(g.sets) == 1 and g.discarded == []
    assert g.sets[0].runs == (0, 1, 2, 3)


def test_single_pair_stream_gives_no_sets():
    g = S.group_runs([rec(i, 0, 0) for i in range(8)])
    assert g.sets == [] and len(g.discarded) == 8


def test_empty_input():
    assert S.group_complete_sets([]) == []


def test_stream_indexed_grouping_and_time_order():
    records = [rec(0, 1, 1), rec(1, 0, 0), rec(2, 0, 1), rec(3, 0, 0), rec(4, 1, 0), rec(5, 0, 1)]
    g = S.group_runs(reversed(records))
    assert len(g.sets) == 1
    assert g.sets[0].runs == (1, 2, 4, 0)
    assert g.discarded == [3, 5]


def test_default_simulation_set_count(default_sim):
    n = len(S.group_complete_sets(default_sim))
    assert 1020 <= n <= 1125


# conditions

def tables(totals):
    return S.CompleteSet.from_tables(1, {xy: [[t, 0, 0], [0, 0, 0], [0, 0, 0]]
                                         for xy, t in zip(S.SETTING_PAIRS, totals)})


def test_normalization_condition():
    assert np.array_equal(S.condition_normalization(tables((100, 100, 100, 100))), [0, 0, 0])
    assert np.array_equal(S.condition_normalization(tables((100, 90, 100, 100))), [-10, 0, 0])


def test_normalization_drift_free_mean_zero():
    records = simlab.simulate(SimConfig(seed=5, drift_sigma=0.0))
    sets = S.group_complete_sets(records)[:1000]
    vals = np.array([S.condition_normalization(s) for s in sets])
    for j in range(3):
        st_ = S.aggregate(vals[:, j])
        assert abs(st_.z) < 3


def test_nonsignaling_zero_for_exact_nonsignaling_counts():
    counts = 100 * Behavior.deterministic((0, 1), (0, 2)).p.astype(int)
    s = S.CompleteSet(1, counts)
    assert np.array_equal(S.nonsignaling_differences(s), np.zeros(12))
    assert S.condition_nonsignaling(s).shape == (11,)


def test_nonsignaling_hand_built_alice_shift():
    c = np.full((2, 2, 3, 3), 10, dtype=int)
    c[0, 0, 0, 0] += 10  # Alice x=0: a=0 gains 10 counts at y=0 ...
    c[0, 0, 1, 0] -= 10  # ... taken from a=1, keeping the slice total fixed
    d = S.nonsignaling_differences(S.CompleteSet(1, c))
    assert d[0] == 10 and d[1] == -10
    assert np.all(d[2:] == 0)
    assert S.NONSIGNALING_LABELS[0].startswith("A")


def test_nonsignaling_dependency():
    rng = np.random.default_rng(0)
    c = rng.integers(0, 20, size=(2, 2, 3, 3))
    d = S.nonsignaling_differences(c)
    a0, a1, b0, b1 = (d[3 * i:3 * i + 3].sum() for i in range(4))
    assert a0 - a1 - b0 + b1 == 0
    basis = np.array([S.nonsignaling_differences(e.reshape(2, 2, 3, 3)) for e in np.eye(36)])
    assert np.linalg.matrix_rank(basis) == 11
    assert np.linalg.matrix_rank(np.delete(basis, S.DEFAULT_DROPPED, axis=1)) == 11


def test_binary_condition_examples():
    det = 100 * Behavior.deterministic((0, 1), (0, 2)).p.astype(float)
    assert S.condition_binary(det) == 0
    assert S.condition_binary(np.full((2, 2, 3, 3), 100 / 9)) == pytest.approx(-100)
    q = 100 * canonical_behavior().p
    assert S.condition_binary(q) == pytest.approx(100 * (QUANTUM_MAX - 1), abs=1e-9)
    assert S.condition_binary(q) == pytest.approx(8.87, abs=5e-3)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 200), st.integers(0, 2**32 - 1))
def test_binary_condition_matches_ia_for_equal_totals(total, seed):
    rng = np.random.default_rng(seed)
    c = np.array([[rng.multinomial(total, np.ones(9) / 9).reshape(3, 3) for _ in range(2)]
                  for _ in range(2)])
    assert S.condition_binary(c) == pytest.approx(total * (bh.i_a(Behavior.from_counts(c)) - 1),
                                                  abs=1e-9)


# aggregation

def test_aggregate_formula():
    vals = [1.0, 2.0, 4.0, 7.0]
    s = S.aggregate(vals)
    m, v, n = np.mean(vals), np.var(vals, ddof=1), 4
    assert s.m == m and s.v == pytest.approx(v)
    assert s.g == 3
    assert s.t == pytest.approx(m * math.sqrt(n / v))
    assert s.z == pytest.approx(s.t * math.sqrt(1 / 3))


def test_aggregate_degenerate():
    with pytest.raises(S.DegenerateDataError):
        S.aggregate([2.0] * 10)
    with pytest.raises(ValueError):
        S.aggregate([1.0, 2.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=30).filter(lambda v: np.var(v) > 1e-6),
       st.randoms())
def test_aggregate_permutation_invariant(values, rnd):
    shuffled = values[:]
    rnd.shuffle(shuffled)
    a, b = S.aggregate(values), S.aggregate(shuffled)
    assert a.z == pytest.approx(b.z, rel=1e-9, abs=1e-12)


def test_aggregate_standard_normal_calibration():
    rng = np.random.default_rng(0)
    zs = np.array([S.aggregate(rng.standard_normal(1060)).z for _ in range(2000)])
    assert np.all(np.abs(zs) < 4)
    assert np.std(zs) == pytest.approx(1.0, abs=0.1)


def test_binary_z_on_default_simulation(default_sim):
    sets = S.group_complete_sets(default_sim)
    z = S.aggregate([S.condition_binary(s) for s in sets]).z
    assert 7 <= z <= 12


# p-values

def test_joint_chi2_zero():
    zero = S.ConditionStat("", np.zeros(3), 0.0, 1.0, 0.0, 0.0, 2)
    assert S.joint_chi2([zero] * 3, 3).p == 1.0


def test_joint_chi2_table_value():
    z = math.sqrt(4.49 / 3)
    s = S.ConditionStat("", np.zeros(3), 0.0, 1.0, z, z, 1059)
    res = S.joint_chi2([s] * 3, 3, conservative=True)
    assert res.chi2 == pytest.approx(4.49)
    assert res.p == pytest.approx(0.213, abs=5e-4)
    assert not res.conservative_applied


def test_joint_chi2_eleven_dof_to_sigmas():
    chi2 = sps.chi2.isf(3.66e-4, 11)
    z = math.sqrt(chi2 / 11)
    s = S.ConditionStat("", np.zeros(3), 0.0, 1.0, z, z, 1059)
    p = S.joint_chi2([s] * 11, 11).p
    assert p == pytest.approx(3.66e-4, rel=1e-9)
    assert f"{S.p_conversions(p)[1]:.3g}" == "3.56"


def test_conservative_factor_below_median():
    chi2 = sps.chi2.ppf(0.0296, 11)
    z = math.sqrt(chi2 / 11)
    s = S.ConditionStat("", np.zeros(3), 0.0, 1.0, z, z, 211)
    res = S.joint_chi2([s] * 11, 11, conservative=True)
    assert res.conservative_applied
    assert res.p == pytest.approx(0.0592, rel=1e-9)
    plain = S.joint_chi2([s] * 11, 11)
    assert plain.p == pytest.approx(1 - 0.0296, rel=1e-9)


@pytest.mark.parametrize("p, coins, sigmas", REFERENCE_CONVERSIONS)
def test_reference_conversions(p, coins, sigmas):
    c, s = S.p_conversions(p)
    assert f"{c:.3g}" == coins
    assert f"{s:.3g}" == sigmas


def test_conversion_of_one():
    assert S.p_conversions(1.0) == (0.0, 0.0)
    with pytest.raises(ValueError):
        S.p_conversions(0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-30, 0))
def test_conversion_round_trip(log10p):
    p = 10.0 ** log10p
    _, s = S.p_conversions(p)
    assert S.sigmas_to_p(s) == pytest.approx(p, rel=1e-10, abs=1e-300)


def test_inequality_p_value():
    assert S.inequality_p_value(-1.0) == 1.0
    assert S.inequality_p_value(0.0) == 1.0
    assert S.p_conversions(S.inequality_p_value(9.39))[1] == pytest.approx(9.39, abs=1e-9)


# empirical I_a

def test_empirical_ia_limits():
    exact = np.rint(1e6 * canonical_behavior().p).astype(int)
    sets = [S.CompleteSet(i, exact) for i in range(1, 4)]
    assert S.empirical_ia(sets).mean == pytest.approx(QUANTUM_MAX, abs=1e-3)
    uni = [S.CompleteSet(i, np.full((2, 2, 3, 3), 7)) for i in range(1, 4)]
    assert S.empirical_ia(uni).mean == pytest.approx(0.0, abs=1e-15)


def test_empirical_ia_excludes_empty_slices():
    good = np.full((2, 2, 3, 3), 3)
    bad = good.copy()
    bad[1, 0] = 0
    res = S.empirical_ia([S.CompleteSet(1, good), S.CompleteSet(2, bad), S.CompleteSet(3, good)])
    assert res.excluded == [2]
    assert res.values.size == 2


def test_empirical_ia_default_simulation(default_sim):
    res = S.empirical_ia(S.group_complete_sets(default_sim))
    assert res.mean == pytest.approx(1.066, abs=0.02)


def test_reduce_every_fifth():
    assert len(S.reduce_every_fifth(list(range(1060)))) == 212
    assert S.reduce_every_fifth([1, 2, 3, 4]) == [1]
    assert S.reduce_every_fifth(list(range(1, 12))) == [1, 6, 11]


# pipeline

def test_analyze_report(default_sim):
    full = S.analyze(default_sim)
    red = S.analyze(default_sim, reduced=True)
    assert full.n_sets == len(S.group_complete_sets(default_sim))
    assert red.n_sets == math.ceil(full.n_sets / 5)
    assert [c.name for c in full.conditions] == ["(i)", "(ii)", "(iii)"]
    assert full.condition("(ii)").dof == 11
    assert full.condition("(iii)").standard_deviations > 6
    assert full.mean_coincidences_per_set == pytest.approx(4 * 33.6 * 0.5, rel=0.05)
    js = full.to_json()
    assert js["schema"] == "1" and js["n_sets"] == full.n_sets
    text = S.format_table([full, red])
    assert "Coin tosses" in text and "reduced data set" in text


def test_drift_raises_nonsignaling_chi2():
    drift, flat = [], []
    for seed in range(5):
        drift.append(S.analyze(simlab.simulate(SimConfig(seed=seed))).condition("(ii)").statistic)
        flat.append(S.analyze(simlab.simulate(SimConfig(seed=seed, drift_sigma=0.0)))
                    .condition("(ii)").statistic)
    assert np.median(drift) > np.median(flat)


def test_dropped_condition_sensitivity(default_sim):
    sets = S.group_complete_sets(default_sim)
    p = [S.analyze_sets(sets, dropped=k).condition("(ii)").p for k in (0, 5, 11)]
    assert all(0 < v <= 1 for v in p)


def test_analyze_needs_three_sets():
    with pytest.raises(ValueError):
        S.analyze([rec(i, x, y) for i, (x, y) in enumerate(S.SETTING_PAIRS)])


def correlated_null_pass_rate(condition, n_conditions, visibility, level, rng):
    """Pass rate of the joint test when the per-set conditions are correlated.

    Under the Poisson model the condition values of one set have covariance
    D diag(mu) D^T, so sum z^2 follows sum_i lambda_i chi2_1 with lambda the
    eigenvalues of the correlation matrix rather than chi2 with n_conditions dof.
    """
    mu = (apply_noise(canonical_behavior(), visibility).p * 16.8).reshape(-1)
    d = np.array([condition(e.reshape(2, 2, 3, 3)) for e in np.eye(36)]).T
    cov = d @ np.diag(mu) @ d.T
    sd = np.sqrt(np.diag(cov))
    lam = np.linalg.eigvalsh(cov / np.outer(sd, sd))
    q = rng.chisquare(1, size=(200_000, n_conditions)) @ lam
    dist = sps.chi2(n_conditions)
    p = np.where(q < dist.median(), np.minimum(1.0, 2.0 * dist.cdf(q)), dist.sf(q))
    return float(np.mean(p > level))


@pytest.fixture(scope="module")
def drift_free_tenfold():
    """Drift-free, visibility-1 pipeline at ten times the default statistics, 100 seeds."""
    reports = []
    for seed in range(100):
        cfg = SimConfig(seed=seed, drift_sigma=0.0, visibility=1.0, pair_rate=336.0)
        reports.append(S.analyze(simlab.simulate(cfg)))
    return reports


@pytest.mark.slow
@pytest.mark.xfail(strict=False, reason=(
    "the sum-of-z^2 statistic ignores correlations between conditions; "
    "its expected 5%-level pass rate is 88.8% for (ii) and 89.7% for (i)"))
def test_drift_free_pipeline_pass_rate(drift_free_tenfold):
    ok_i = sum(r.condition("(i)").p > 0.05 for r in drift_free_tenfold)
    ok_ii = sum(r.condition("(ii)").p > 0.05 for r in drift_free_tenfold)
    assert ok_i >= 90 and ok_ii >= 90


@pytest.mark.slow
def test_drift_free_pass_rate_matches_correlated_null(drift_free_tenfold):
    rng = np.random.default_rng(0)
    for name, cond, k in (("(i)", S.condition_normalization, 3),
                          ("(ii)", S.condition_nonsignaling, 11)):
        expected = correlated_null_pass_rate(cond, k, 1.0, 0.05, rng)
        observed = sum(r.condition(name).p > 0.05 for r in drift_free_tenfold)
        sd = math.sqrt(100 * expected * (1 - expected))
        assert abs(observed - 100 * expected) < 3 * sd


@pytest.mark.slow
def test_binary_z_grows_with_sqrt_counts(drift_free_tenfold):
    base = [S.analyze(simlab.simulate(SimConfig(seed=s, drift_sigma=0.0, visibility=1.0)))
            .condition("(iii)").statistic for s in range(5)]
    tenfold = [r.condition("(iii)").statistic for r in drift_free_tenfold]
    assert np.median(tenfold) / np.median(base) == pytest.approx(math.sqrt(10), rel=0.15)
