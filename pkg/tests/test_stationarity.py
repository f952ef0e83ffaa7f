"""Distance statistics, null variance and decision rules."""

import math

import numpy as np
import pytest

from ftstest._normal import norm_cdf, norm_quantile
from ftstest.core import FunctionalTimeSeries, l2_inner
from ftstest.spectral import BlockDesignError, fdft, make_design
from ftstest.stationarity import (
    DegenerateSeriesError,
    averaged_spectral_power,
    bias_correction,
    confidence_interval,
    distance_statistics,
    local_spectral_power,
    null_variance,
    power_approx,
    relevant_test,
    run_test,
    suggest_blocks,
)


def _series(n_times=64, n_grid=10, seed=0):
    rng = np.random.default_rng(seed)
    return FunctionalTimeSeries(rng.standard_normal((n_times, n_grid)))


def _loop_parts(series, design):
    """Slow per-definition evaluation of the three distance ingredients."""
    m, n, t = design.n_blocks, design.block_length, design.n_total
    half = n // 2
    curves = {
        (j, k): fdft(series, design, j, k).curve
        for j in range(1, m + 1)
        for k in range(0, half + 1)
    }
    f1 = sum(
        abs(l2_inner(curves[j, k], curves[j, k - 1])) ** 2
        for j in range(1, m + 1)
        for k in range(1, half + 1)
    ) / t
    f2 = 0.0
    for k in range(1, half + 1):
        f2 += sum(
            abs(l2_inner(curves[j1, k], curves[j2, k])) ** 2
            for j1 in range(1, m + 1)
            for j2 in range(1, m + 1)
        ) / (m * m)
    f2 /= n
    bias = sum(
        abs(l2_inner(curves[j, k], curves[j, k]))
        * abs(l2_inner(curves[j, k - 1], curves[j, k - 1]))
        for j in range(1, m + 1)
        for k in range(1, half + 1)
    ) / (n * m)
    return f1, f2, bias


def test_parts_match_per_definition_loops():
    series = _series(48, n_grid=8, seed=11)
    design = make_design(48, 4)
    f1, f2, bias = _loop_parts(series, design)
    parts = distance_statistics(series, design)
    assert parts.local_term == pytest.approx(f1, rel=1e-12)
    assert parts.averaged_term == pytest.approx(f2, rel=1e-12)
    assert parts.bias_term == pytest.approx(bias, rel=1e-12)
    assert local_spectral_power(series, design) == pytest.approx(f1, rel=1e-12)
    assert averaged_spectral_power(series, design) == pytest.approx(f2, rel=1e-12)
    assert bias_correction(series, design) == pytest.approx(bias, rel=1e-12)


def test_parts_are_nonnegative():
    series = _series(seed=12)
    design = make_design(series.n_times, 4)
    parts = distance_statistics(series, design)
    assert parts.local_term >= 0.0
    assert parts.averaged_term >= 0.0
    assert parts.bias_term >= 0.0


def test_bias_modes_differ_by_scaled_correction():
    series = _series(seed=13)
    design = make_design(series.n_times, 4)
    scaled = distance_statistics(series, design, bias_mode="scaled")
    literal = distance_statistics(series, design, bias_mode="literal")
    expected_gap = 4 * math.pi * scaled.bias_term * (1 - 1 / design.n_blocks)
    assert literal.distance - scaled.distance == pytest.approx(expected_gap, rel=1e-12)
    with pytest.raises(ValueError):
        distance_statistics(series, design, bias_mode="relaxed")


def test_homogeneity_of_parts_and_variance():
    series = _series(seed=14)
    design = make_design(series.n_times, 4)
    c = 1.7
    parts = distance_statistics(series, design)
    scaled = distance_statistics(series.scaled(c), design)
    assert scaled.local_term == pytest.approx(c**4 * parts.local_term, rel=1e-12)
    assert scaled.averaged_term == pytest.approx(c**4 * parts.averaged_term, rel=1e-12)
    assert scaled.bias_term == pytest.approx(c**4 * parts.bias_term, rel=1e-12)
    assert null_variance(series.scaled(c), design) == pytest.approx(
        c**8 * null_variance(series, design), rel=1e-12
    )


def test_statistic_scale_invariance():
    series = _series(seed=15)
    design = make_design(series.n_times, 4)
    base = run_test(series, design)
    doubled = run_test(series.scaled(2.0), design)
    assert doubled.statistic == base.statistic
    assert doubled.p_value == base.p_value
    assert doubled.reject == base.reject


def test_run_test_report_consistency():
    series = _series(seed=16)
    design = make_design(series.n_times, 4)
    report = run_test(series, design, alpha=0.1)
    expected = (
        math.sqrt(design.n_total)
        * report.parts.distance
        / math.sqrt(report.null_variance)
    )
    assert report.statistic == pytest.approx(expected, rel=1e-12)
    assert report.p_value == pytest.approx(1 - norm_cdf(report.statistic), rel=1e-12)
    assert report.reject == (report.statistic > norm_quantile(0.9))
    with pytest.raises(ValueError):
        run_test(series, design, alpha=1.5)


def test_constant_series_is_degenerate_not_accepted():
    series = FunctionalTimeSeries(np.ones((32, 6)))
    design = make_design(32, 2)
    with pytest.raises(DegenerateSeriesError):
        run_test(series, design)


def test_normal_helpers_reference_values():
    assert 1 - norm_cdf(1.0) == pytest.approx(0.15866, abs=1e-5)
    assert norm_quantile(0.95) == pytest.approx(1.644854, abs=1e-6)
    assert norm_cdf(norm_quantile(0.123)) == pytest.approx(0.123, abs=1e-12)


def test_power_approx_behaviour():
    # Vanishing distance with matching variances leaves type II error 1 - alpha.
    assert power_approx(0.0, 0.5, 0.5, 100, 0.05) == pytest.approx(0.95, rel=1e-10)
    small = power_approx(0.2, 0.5, 0.5, 400, 0.05)
    smaller = power_approx(0.2, 0.5, 0.5, 1600, 0.05)
    assert smaller < small < 0.95
    with pytest.raises(ValueError):
        power_approx(-0.1, 0.5, 0.5, 100, 0.05)
    with pytest.raises(ValueError):
        power_approx(0.1, 0.0, 0.5, 100, 0.05)


def test_confidence_interval_values():
    low, high = confidence_interval(0.1, 0.5, 100, 0.05)
    assert low == pytest.approx(0.002, abs=5e-5)
    assert high == pytest.approx(0.198, abs=5e-5)
    low, _ = confidence_interval(0.0, 0.5, 100, 0.05)
    assert low == 0.0
    with pytest.raises(ValueError):
        confidence_interval(0.1, -1.0, 100, 0.05)


def test_relevant_test_margin_rule():
    result = relevant_test(0.5, 1.0, 100, delta=1.0, alpha=0.05)
    assert result.margin == pytest.approx(-5.0, rel=1e-12)
    assert result.reject is True
    kept = relevant_test(1.2, 1.0, 100, delta=1.0, alpha=0.05)
    assert kept.reject is False
    with pytest.raises(ValueError):
        relevant_test(0.5, 1.0, 100, delta=0.0, alpha=0.05)


def test_suggest_blocks_divisor_mode():
    assert suggest_blocks(4096) == (16, 256)
    assert suggest_blocks(128) == (4, 32)
    assert suggest_blocks(8) == (2, 4)
    with pytest.raises(BlockDesignError):
        suggest_blocks(15)  # every divisor leaves an odd block length
    with pytest.raises(ValueError):
        suggest_blocks(4)


def test_suggest_blocks_ceil_mode():
    assert suggest_blocks(149, mode="ceil") == (6, 24)
    assert suggest_blocks(4096, mode="ceil") == (16, 256)
    with pytest.raises(ValueError):
        suggest_blocks(64, mode="nearest")
