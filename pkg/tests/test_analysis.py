import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import stats as oracle
from prim.analysis import (AnalysisReportData, EmptyRecords, ExperimentRecord, IllConditioned,
                           InsufficientPoints, LengthMismatch, NoComparablePairs, TiesPresent,
                           TooFewPoints, ZeroVariance, analyze, critical_value,
                           exploration_rate, kendall, pearson, polyfit, spearman, standardize)

distinct_floats = st.lists(st.integers(-10**6, 10**6), min_size=3, max_size=30,
                           unique=True).map(lambda xs: [x / 7 for x in xs])


def test_standardize_example():
    assert standardize([1, 2, 3]) == pytest.approx([-1.224744871391589, 0, 1.224744871391589],
                                                   abs=1e-15)
    with pytest.raises(ZeroVariance):
        standardize([2, 2, 2])
    with pytest.raises(TooFewPoints):
        standardize([1])


def test_correlation_examples():
    assert pearson([1, 2, 3, 4, 5], [5, 6, 7, 8, 7.5]) == pytest.approx(0.9191450300180577,
                                                                       abs=1e-12)
    assert spearman([1, 2, 3, 4, 5], [2, 1, 4, 5, 3]) == pytest.approx(0.6, abs=1e-12)
    assert kendall([1, 2, 3], [1, 3, 2]) == pytest.approx(1 / 3, abs=1e-12)
    assert kendall([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(2 / 3, abs=1e-12)
    assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-15)


def test_correlation_errors():
    with pytest.raises(ZeroVariance):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(LengthMismatch):
        pearson([1, 2], [1, 2, 3])
    with pytest.raises(TooFewPoints):
        kendall([1], [2])
    with pytest.raises(TiesPresent):
        spearman([1, 1, 2], [1, 2, 3])
    with pytest.raises(NoComparablePairs):
        kendall([1, 1, 1], [1, 2, 3])


def test_kendall_ignores_tied_pairs():
    # pairs (0,1) tied in x; remaining: (0,2) C, (1,2) C
    assert kendall([1, 1, 2], [1, 2, 3]) == 1.0


@settings(max_examples=60)
@given(distinct_floats, st.integers(0, 2**31))
def test_correlations_match_oracle(x, seed):
    y = np.random.default_rng(seed).permutation(len(x)).astype(float).tolist()
    assert pearson(x, y) == pytest.approx(oracle.pearson(x, y), abs=1e-12)
    assert spearman(x, y) == pytest.approx(oracle.spearman_via_ranks(x, y), abs=1e-12)
    assert kendall(x, y) == pytest.approx(oracle.kendall(x, y), abs=1e-12)


@settings(max_examples=60)
@given(distinct_floats)
def test_correlation_invariants(x):
    y = [v ** 3 / 1e6 + v for v in x]
    assert -1 <= pearson(x, y) <= 1
    assert spearman(x, y) == pytest.approx(1.0)
    assert kendall(x, y) == 1.0
    neg = [-v for v in y]
    assert kendall(x, neg) == -1.0
    assert pearson(x, y) == pytest.approx(pearson(y, x), abs=1e-15)


@settings(max_examples=40)
@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=40))
def test_standardize_moments(x):
    if oracle.pop_std(x) < 1e-6:
        return
    z = standardize(x)
    assert oracle.mean(z) == pytest.approx(0, abs=1e-9)
    assert oracle.pop_std(z) == pytest.approx(1, abs=1e-9)


def test_polyfit_recovers_exact_quadratic():
    fit = polyfit([0, 1, 2, 3], [1, 3, 7, 13], 2)
    np.testing.assert_allclose(fit.coefficients, [1, 1, 1], atol=1e-10)
    assert fit.sum_squared_residual == pytest.approx(0, abs=1e-20)
    assert fit(4) == pytest.approx(21)


def test_polyfit_linear_example():
    fit = polyfit([0, 1, 2, 3, 4], [1, 2, 2, 5, 4], 1, variable="pitch")
    np.testing.assert_allclose(fit.coefficients, [1.0, 0.9], atol=1e-12)
    assert fit.sum_squared_residual == pytest.approx(2.7, abs=1e-12)
    assert fit.variable == "pitch" and fit.degree == 1


def test_polyfit_against_extended_precision_oracle():
    rng = np.random.default_rng(8)
    for degree in (1, 2, 3):
        x = rng.uniform(60, 200, 25).tolist()
        y = rng.uniform(0, 1, 25).tolist()
        coeffs, sse = oracle.lstsq_poly(x, y, degree)
        fit = polyfit(x, y, degree)
        np.testing.assert_allclose(fit.coefficients, coeffs, rtol=1e-7, atol=1e-12)
        assert fit.sum_squared_residual == pytest.approx(sse, rel=1e-9)


def test_polyfit_errors():
    with pytest.raises(InsufficientPoints):
        polyfit([1, 2], [1, 2], 2)
    with pytest.raises(InsufficientPoints):
        polyfit([1, 1, 1, 2], [1, 2, 3, 4], 2)
    with pytest.raises(LengthMismatch):
        polyfit([1, 2, 3], [1, 2], 1)
    with pytest.raises(IllConditioned):
        polyfit([0, 1e-6, 2e-6, 1], [0, 1, 2, 3], 3)


def test_exploration_rate_examples():
    pts = [{"a": 0, "b": 0}, {"a": 3, "b": 4}, {"a": 6, "b": 8}]
    assert exploration_rate(pts) == pytest.approx(20 / 3, abs=1e-12)
    assert exploration_rate(pts[:2]) == 5.0
    assert exploration_rate([pts[0], pts[0]]) == 0.0
    with pytest.raises(TooFewPoints):
        exploration_rate(pts[:1])


@settings(max_examples=40)
@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50), st.floats(-50, 50)),
                min_size=2, max_size=25), st.floats(-100, 100), st.permutations(range(25)))
def test_exploration_rate_properties(points, shift, perm):
    conds = [{"a": p[0], "b": p[1], "c": p[2]} for p in points]
    eps = exploration_rate(conds)
    assert eps == pytest.approx(oracle.exploration_rate(points), rel=1e-9, abs=1e-9)
    assert eps >= 0
    moved = [{k: v + shift for k, v in c.items()} for c in conds]
    assert exploration_rate(moved) == pytest.approx(eps, rel=1e-9, abs=1e-6)
    order = [i for i in perm if i < len(conds)]
    assert exploration_rate([conds[i] for i in order]) == pytest.approx(eps, rel=1e-12)
    doubled = [{k: 2 * v for k, v in c.items()} for c in conds]
    assert exploration_rate(doubled) == pytest.approx(2 * eps, rel=1e-9, abs=1e-9)


def test_standardized_exploration_rate_drops_constant_dims():
    conds = [{"a": 0.0, "b": 5.0}, {"a": 2.0, "b": 5.0}]
    assert exploration_rate(conds, standardized=True) == pytest.approx(2.0)


def _records(xs, gs):
    return [ExperimentRecord({"pitch": x, "curl": 1.0}, g, 1, i)
            for i, (x, g) in enumerate(zip(xs, gs), start=1)]


def test_critical_value_prefers_earliest_tie():
    recs = _records([60, 70, 80], [0.5, 0.9, 0.9])
    assert critical_value(recs) == ({"pitch": 70, "curl": 1.0}, 0.9)
    with pytest.raises(EmptyRecords):
        critical_value([])


def test_analyze_flags_and_round_trip():
    recs = _records([60, 70, 80, 90, 100], [0.1, 0.4, 0.2, 0.8, 0.6])
    report = analyze(recs, ["pitch", "curl"])
    assert report.record_count == 5
    assert report.critical_value == 0.8
    assert report.flags["curl"] == "constant, correlation undefined"
    (corr,) = report.correlations
    assert corr.variable == "pitch"
    assert corr.spearman == pytest.approx(0.8)
    assert len(report.fits) == 1 and report.fits[0].degree == 2
    assert report.exploration_rate == pytest.approx(oracle.exploration_rate(
        [(r.params["pitch"], r.params["curl"]) for r in recs]))
    assert AnalysisReportData.from_dict(report.to_dict()) == report


def test_analyze_single_record_and_ties():
    single = analyze(_records([60], [0.3]), ["pitch"])
    assert single.exploration_rate is None
    assert "exploration_rate" in single.flags
    assert single.flags["pitch"].startswith("too few points")
    tied = analyze(_records([60, 60, 70], [0.1, 0.2, 0.3]), ["pitch"])
    assert tied.correlations[0].spearman is None
    assert "pitch.spearman" in tied.flags
    assert "pitch.fit" in tied.flags
    with pytest.raises(EmptyRecords):
        analyze([], ["pitch"])


def test_nonfinite_free_outputs():
    rng = np.random.default_rng(2)
    recs = _records(rng.uniform(60, 200, 40).tolist(), rng.uniform(0, 1, 40).tolist())
    report = analyze(recs, ["pitch"])
    c = report.correlations[0]
    assert all(math.isfinite(v) for v in (c.pearson, c.spearman, c.kendall))
