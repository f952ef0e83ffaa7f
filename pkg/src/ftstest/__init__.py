"""Bandwidth-free frequency-domain test of second-order stationarity for
functional time series, with a time-varying functional AR simulator and a
seeded Monte Carlo harness."""

__version__ = "0.1.0"

from .core import FourierBasis, FunctionalTimeSeries, evaluate_basis, l2_inner
from .spectral import (
    BlockDesign,
    BlockDesignError,
    LocalFourierTransform,
    all_fdfts,
    fdft,
    gram_row,
    hs_inner_periodograms,
    make_design,
)
from .stationarity import (
    DegenerateSeriesError,
    StatisticParts,
    TestReport,
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
from .simulate import (
    ExplosiveModelError,
    McConfig,
    McResult,
    MonteCarloError,
    TvFarSpec,
    density_samples,
    draw_operator,
    load_spec,
    monte_carlo,
    preset,
    simulate,
)
from .oracle import AnalyticSpectrum, analytic_m2, analytic_nu_h0, brute_statistics

__all__ = [name for name in dir() if not name.startswith("_")]
