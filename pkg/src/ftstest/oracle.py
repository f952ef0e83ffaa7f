"""Independent reference computations for testing.

brute_statistics re-evaluates the distance ingredients from raw definitions:
local DFTs by direct summation, periodograms as explicit G x G kernels, and
Hilbert-Schmidt inner products as double grid averages. No FFT, no Gram
shortcut. The analytic helpers give closed-form targets for modulated white
noise X_t = sigma(t/T) * e_t, the one tractable family where the spectral
density is sigma^2(u) * c / (2 pi) with c the innovation covariance kernel.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .core import FunctionalTimeSeries
from .spectral import BlockDesign
from .stationarity import BIAS_MODES, StatisticParts

BRUTE_SIZE_LIMIT = 64
QUAD_TOL = 1e-10


def _direct_fdft(block: np.ndarray, k: int) -> np.ndarray:
    n = block.shape[0]
    omega = 2 * math.pi * k / n
    weights = np.array([cmath.exp(-1j * omega * s) for s in range(n)])
    return weights @ block / math.sqrt(2 * math.pi * n)


def _kernel(curve: np.ndarray) -> np.ndarray:
    return np.outer(curve, curve.conj())


def _hs_inner(kernel_a: np.ndarray, kernel_b: np.ndarray) -> complex:
    g = kernel_a.shape[0]
    return complex(np.sum(kernel_a * kernel_b.conj())) / (g * g)


def _trace(kernel: np.ndarray) -> float:
    return float(np.real(np.trace(kernel))) / kernel.shape[0]


def brute_statistics(
    series: FunctionalTimeSeries,
    design: BlockDesign,
    bias_mode: str = "scaled",
) -> StatisticParts:
    """Definitional re-evaluation of the distance ingredients (T <= 64 guard)."""
    if design.n_total > BRUTE_SIZE_LIMIT:
        raise ValueError(
            f"brute-force evaluation is limited to T <= {BRUTE_SIZE_LIMIT}"
        )
    if bias_mode not in BIAS_MODES:
        raise ValueError(f"bias_mode must be one of {BIAS_MODES}, got {bias_mode!r}")
    m, n = design.n_blocks, design.block_length
    half = n // 2
    kernels = {}
    for j in range(1, m + 1):
        block = series.values[design.block_rows(j)]
        for k in range(0, half + 1):
            kernels[j, k] = _kernel(_direct_fdft(block, k))

    local_term = 0.0
    bias_term = 0.0
    for k in range(1, half + 1):
        for j in range(1, m + 1):
            local_term += abs(_hs_inner(kernels[j, k], kernels[j, k - 1]))
            bias_term += _trace(kernels[j, k]) * _trace(kernels[j, k - 1])
    local_term /= design.n_total
    bias_term /= n * m

    averaged_term = 0.0
    for k in range(1, half + 1):
        averaged = sum(kernels[j, k] for j in range(1, m + 1)) / m
        averaged_term += abs(_hs_inner(averaged, averaged))
    averaged_term /= n

    weight = 1.0 / m if bias_mode == "scaled" else 1.0
    distance = 4 * math.pi * (local_term - averaged_term + weight * bias_term)
    return StatisticParts(local_term, averaged_term, bias_term, distance, bias_mode, design)


@dataclass(frozen=True)
class AnalyticSpectrum:
    """Modulated white noise X_t = sigma(t/T) * e_t with diagonal innovation
    covariance: kernel of the local spectral density is
    sigma^2(u) * c(tau, s) / (2 pi), where ||c||^2 = sum_l sigma_l^4."""

    variance_profile: Callable[[float], float]       # sigma^2(u), u in [0, 1]
    coeff_variances: np.ndarray                       # diagonal of c

    def __post_init__(self):
        coeff = np.asarray(self.coeff_variances, dtype=float)
        if coeff.ndim != 1 or np.any(coeff < 0):
            raise ValueError("coefficient variances must be a nonnegative vector")
        object.__setattr__(self, "coeff_variances", coeff)


def analytic_m2(spec: AnalyticSpectrum) -> float:
    """Closed-form squared distance to stationarity for modulated white noise:

        m^2 = [int sigma^4 - (int sigma^2)^2] * ||c||^2 / (2 pi).
    """
    sigma_sq = spec.variance_profile
    second, _ = quad(sigma_sq, 0.0, 1.0, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
    fourth, _ = quad(
        lambda u: sigma_sq(u) ** 2, 0.0, 1.0, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200
    )
    kernel_norm_sq = float(np.sum(spec.coeff_variances**2))
    return max(0.0, (fourth - second**2)) * kernel_norm_sq / (2 * math.pi)


def analytic_nu_h0(coeff_variances: np.ndarray) -> float:
    """Null asymptotic variance for i.i.d. noise with diagonal covariance:
    the frequency integral of the fourth power of the stationary spectral
    density collapses to (sum_l sigma_l^4)^2 / (2 pi^2). The integral form is
    evaluated numerically and must agree with the closed form to 1e-12."""
    coeff = np.asarray(coeff_variances, dtype=float)
    if coeff.ndim != 1 or np.any(coeff < 0) or not np.any(coeff > 0):
        raise ValueError("need a nonnegative vector with at least one positive entry")
    kernel_norm_sq = float(np.sum(coeff**2))
    closed_form = kernel_norm_sq**2 / (2 * math.pi**2)
    density_norm_4 = (kernel_norm_sq / (4 * math.pi**2)) ** 2
    integral, _ = quad(
        lambda _omega: density_norm_4, -math.pi, math.pi, epsabs=QUAD_TOL, epsrel=QUAD_TOL
    )
    numeric = 4 * math.pi * integral
    if abs(numeric - closed_form) > 1e-12 * max(1.0, closed_form):
        raise AssertionError(
            f"numeric ({numeric}) and closed-form ({closed_form}) null variances disagree"
        )
    return closed_form
