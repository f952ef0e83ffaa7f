"""Test statistics, null-variance calibration, decision rules and applications.

The measure of non-stationarity is the L2 distance between the time-varying
spectral density operator and its best stationary approximation. It is
estimated from block-wise functional DFTs by

    distance = 4 pi * (local_term - averaged_term + (N/T) * bias_term)

where local_term sums |<D_{j,k}, D_{j,k-1}>|^2 over blocks j and frequency
pairs (k, k-1), averaged_term is the HS norm of the block-averaged
periodogram, and bias_term removes the O(N/T) bias of averaged_term. The
standardized statistic sqrt(T) * distance / null_sd is asymptotically
standard normal under stationarity.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._normal import norm_cdf, norm_quantile
from .core import FunctionalTimeSeries
from .spectral import BlockDesign, BlockDesignError, all_fdfts

BIAS_MODES = ("scaled", "literal")


class DegenerateSeriesError(ValueError):
    """The null-variance estimate is zero, so the statistic cannot be
    standardized (e.g. a constant series). Never a silent accept."""


@dataclass(frozen=True)
class StatisticParts:
    """Ingredients of the distance estimate for one block design."""

    local_term: float       # sum of adjacent-frequency periodogram products
    averaged_term: float    # HS norm^2 of the block-averaged periodogram
    bias_term: float        # plug-in bias correction
    distance: float         # 4 pi combination, may be negative in finite samples
    bias_mode: str
    design: BlockDesign


@dataclass(frozen=True)
class TestReport:
    parts: StatisticParts
    null_variance: float    # estimated asymptotic variance under stationarity
    statistic: float        # sqrt(T) * distance / sqrt(null_variance)
    p_value: float
    alpha: float
    reject: bool


@dataclass(frozen=True)
class RelevantTestResult:
    """Decision record of the relevant-hypothesis test of distance >= delta."""

    distance: float
    delta: float
    nu: float
    n_total: int
    alpha: float
    margin: float           # sqrt(T) * (distance - delta) / nu
    reject: bool


def _frequency_summaries(d: np.ndarray):
    """Per-block/per-frequency building blocks from the M x N x G DFT array.

    Returns (adjacent_power, norms) where adjacent_power[j, k-1] =
    |<D_{j,k}, D_{j,k-1}>|^2 for k = 1..N/2 and norms[j, k] = ||D_{j,k}||^2.
    """
    _, n, g = d.shape
    half = n // 2
    adjacent = (
        np.einsum("jkg,jkg->jk", d[:, 1 : half + 1, :], d[:, 0:half, :].conj()) / g
    )
    adjacent_power = np.abs(adjacent) ** 2
    norms = np.einsum("jkg,jkg->jk", d, d.conj()).real / g
    return adjacent_power, norms


def _averaged_term(d: np.ndarray) -> float:
    m, n, g = d.shape
    half = n // 2
    total = 0.0
    for k in range(1, half + 1):
        gram = d[:, k, :] @ d[:, k, :].conj().T / g
        total += float(np.sum(np.abs(gram) ** 2))
    return total / (n * m * m)


def local_spectral_power(series: FunctionalTimeSeries, design: BlockDesign) -> float:
    """(1/T) sum_{k=1}^{N/2} sum_j |<D_{j,k}, D_{j,k-1}>|^2; always >= 0."""
    adjacent_power, _ = _frequency_summaries(all_fdfts(series, design))
    return float(adjacent_power.sum()) / design.n_total


def averaged_spectral_power(series: FunctionalTimeSeries, design: BlockDesign) -> float:
    """(1/N) sum_{k=1}^{N/2} || (1/M) sum_j periodogram_{j,k} ||_HS^2."""
    return _averaged_term(all_fdfts(series, design))


def bias_correction(series: FunctionalTimeSeries, design: BlockDesign) -> float:
    """(1/(NM)) sum_{k=1}^{N/2} sum_j ||D_{j,k}||^2 ||D_{j,k-1}||^2."""
    d = all_fdfts(series, design)
    _, norms = _frequency_summaries(d)
    half = design.block_length // 2
    return float(np.sum(norms[:, 1 : half + 1] * norms[:, 0:half])) / (
        design.block_length * design.n_blocks
    )


def distance_statistics(
    series: FunctionalTimeSeries,
    design: BlockDesign,
    bias_mode: str = "scaled",
) -> StatisticParts:
    """Estimate of the squared distance to stationarity with its parts.

    bias_mode "scaled" (default) weights the bias correction by N/T, which
    matches the order of the bias it removes; "literal" adds it unweighted.
    """
    if bias_mode not in BIAS_MODES:
        raise ValueError(f"bias_mode must be one of {BIAS_MODES}, got {bias_mode!r}")
    d = all_fdfts(series, design)
    adjacent_power, norms = _frequency_summaries(d)
    half = design.block_length // 2
    local_term = float(adjacent_power.sum()) / design.n_total
    averaged_term = _averaged_term(d)
    bias_term = float(np.sum(norms[:, 1 : half + 1] * norms[:, 0:half])) / (
        design.block_length * design.n_blocks
    )
    weight = 1.0 / design.n_blocks if bias_mode == "scaled" else 1.0
    distance = 4 * math.pi * (local_term - averaged_term + weight * bias_term)
    return StatisticParts(local_term, averaged_term, bias_term, distance, bias_mode, design)


def null_variance(series: FunctionalTimeSeries, design: BlockDesign) -> float:
    """(16 pi^2 / N) sum_{k=1}^{N/2} [ (1/M) sum_j |<D_{j,k}, D_{j,k-1}>|^2 ]^2."""
    adjacent_power, _ = _frequency_summaries(all_fdfts(series, design))
    per_frequency = adjacent_power.mean(axis=0)
    return float(16 * math.pi**2 / design.block_length * np.sum(per_frequency**2))


def run_test(
    series: FunctionalTimeSeries,
    design: BlockDesign,
    alpha: float = 0.05,
    bias_mode: str = "scaled",
) -> TestReport:
    """Level-alpha test of second-order stationarity.

    Rejects when sqrt(T) * distance / null_sd exceeds the (1-alpha) standard
    normal quantile. The statistic is invariant under rescaling the series.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    parts = distance_statistics(series, design, bias_mode)
    variance = null_variance(series, design)
    if variance <= 0.0:
        raise DegenerateSeriesError(
            "null-variance estimate is zero; the series carries no usable "
            "spectral variation (e.g. constant curves)"
        )
    statistic = math.sqrt(design.n_total) * parts.distance / math.sqrt(variance)
    p_value = 1.0 - norm_cdf(statistic)
    reject = statistic > norm_quantile(1.0 - alpha)
    return TestReport(parts, variance, statistic, p_value, alpha, reject)


def power_approx(
    distance_sq: float, nu: float, nu_h0: float, n_total: int, alpha: float
) -> float:
    """Approximate type II error probability Phi(nu_h0/nu * u_{1-a} - sqrt(T) d^2/nu)."""
    if distance_sq < 0 or nu <= 0 or nu_h0 <= 0 or not 0 < alpha < 1:
        raise ValueError("need distance_sq >= 0, nu > 0, nu_h0 > 0, alpha in (0, 1)")
    u = norm_quantile(1.0 - alpha)
    return norm_cdf(nu_h0 / nu * u - math.sqrt(n_total) * distance_sq / nu)


def confidence_interval(
    distance: float, nu: float, n_total: int, alpha: float
) -> tuple[float, float]:
    """Asymptotic (1-alpha) interval for the squared distance; lower end
    clamped at 0. `nu` is the alternative-hypothesis standard deviation,
    supplied by the caller."""
    if nu <= 0 or not 0 < alpha < 1:
        raise ValueError("need nu > 0 and alpha in (0, 1)")
    width = nu * norm_quantile(1.0 - alpha / 2) / math.sqrt(n_total)
    return max(0.0, distance - width), distance + width


def relevant_test(
    distance: float, nu: float, n_total: int, delta: float, alpha: float
) -> RelevantTestResult:
    """Test of 'distance >= delta' against 'distance < delta' (similarity to
    stationarity); rejects when the standardized margin falls below u_alpha."""
    if nu <= 0 or delta <= 0 or not 0 < alpha < 1:
        raise ValueError("need nu > 0, delta > 0, alpha in (0, 1)")
    margin = math.sqrt(n_total) * (distance - delta) / nu
    reject = margin < norm_quantile(alpha)
    return RelevantTestResult(distance, delta, nu, n_total, alpha, margin, reject)


def _ceil_cbrt(n: int) -> int:
    m = round(n ** (1.0 / 3.0))
    while m**3 < n:
        m += 1
    while m > 1 and (m - 1) ** 3 >= n:
        m -= 1
    return m


def suggest_blocks(n_total: int, mode: str = "divisor") -> tuple[int, int]:
    """Block-count heuristic M ~ T^(1/3).

    divisor mode picks the divisor of T nearest to T^(1/3) with T/M even
    (ties toward smaller M); ceil mode returns M = ceil(T^(1/3)) with the
    largest even N = floor(T/M) rounded down, leaving truncation to the caller.
    """
    if n_total < 8:
        raise ValueError(f"need at least 8 curves, got {n_total}")
    target = n_total ** (1.0 / 3.0)
    if mode == "divisor":
        candidates = [
            m
            for m in range(1, n_total // 2 + 1)
            if n_total % m == 0 and (n_total // m) % 2 == 0
        ]
        if not candidates:
            raise BlockDesignError(
                f"{n_total} admits no block count with an even block length; "
                "truncate the series (e.g. drop one curve) and retry"
            )
        best = min(candidates, key=lambda m: (abs(m - target), m))
        return best, n_total // best
    if mode == "ceil":
        m = _ceil_cbrt(n_total)
        n = (n_total // m) // 2 * 2
        if n < 2:
            raise BlockDesignError(f"ceil-mode block count {m} leaves blocks too short")
        return m, n
    raise ValueError(f"mode must be 'divisor' or 'ceil', got {mode!r}")
