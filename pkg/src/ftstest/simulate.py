"""Time-varying functional AR simulation and the seeded Monte Carlo harness.

Data are generated in Fourier-coefficient space: the first L coefficients
follow a VAR(p) recursion whose operator matrices are drawn once per call
(Gaussian entries, rescaled to a prescribed spectral norm) and whose time
variation enters only through scalar norm schedules kappa_j(t) and an
innovation variance profile s^2(t). Curves are then evaluated on the grid
through the Fourier basis.

Monte Carlo replications use a counter-based Philox stream keyed by
(seed, replication), so results are bit-identical for any worker count.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import FourierBasis, FunctionalTimeSeries
from .spectral import make_design
from .stationarity import DegenerateSeriesError, distance_statistics, null_variance
from ._normal import norm_quantile

STATE_OVERFLOW_GUARD = 1e12
PRESET_NAMES = ("I", "II", "III", "IV", "V", "VI")


class ExplosiveModelError(RuntimeError):
    """The VAR recursion exceeded the overflow guard."""


class MonteCarloError(RuntimeError):
    """Too many replications failed (1% cap)."""


# ---------------------------------------------------------------------------
# Time profiles (norm schedules and innovation variance profiles)

@dataclass(frozen=True)
class Constant:
    value: float

    def at(self, t: int, n_total: int) -> float:
        return self.value


@dataclass(frozen=True)
class CosineOfCosine:
    """amplitude * cos(offset - cos(2 pi cycles t / T))."""

    amplitude: float
    offset: float
    cycles: float

    def at(self, t: int, n_total: int) -> float:
        return self.amplitude * math.cos(
            self.offset - math.cos(2 * math.pi * self.cycles * t / n_total)
        )


@dataclass(frozen=True)
class CosineModulatedVariance:
    """s^2(t) = cos(a + b cos(2 pi t / period) + c sin(2 pi t / period)).

    With the default coefficients the cosine argument stays in
    (-0.55, 1.55), so the profile is strictly positive; violated parameter
    choices are rejected at evaluation time.
    """

    period: float = 1024.0
    a: float = 0.5
    b: float = 1.0
    c: float = 0.3

    def at(self, t: int, n_total: int) -> float:
        angle = 2 * math.pi * t / self.period
        value = math.cos(self.a + self.b * math.cos(angle) + self.c * math.sin(angle))
        if value <= 0.0:
            raise ValueError(
                f"cosine-modulated variance profile is not positive at t={t}"
            )
        return value


@dataclass(frozen=True)
class RaisedCosineVariance:
    """s^2(t) = 1 + cos(2 pi t / T) over rescaled time (zero at midsample)."""

    def at(self, t: int, n_total: int) -> float:
        return 1.0 + math.cos(2 * math.pi * t / n_total)


# ---------------------------------------------------------------------------
# Model specification

def _noise_variances(dimension: int, decreasing: bool = False) -> np.ndarray:
    """Innovation coefficient variances exp(+/-(l-1)/10), l = 1..L."""
    sign = -1.0 if decreasing else 1.0
    return np.exp(sign * np.arange(dimension) / 10.0)


def _exp_neg_sum(dimension: int) -> np.ndarray:
    l = np.arange(1, dimension + 1)
    return np.exp(-(l[:, None] + l[None, :]).astype(float))


def _inverse_power(dimension: int) -> np.ndarray:
    l = np.arange(1, dimension + 1).astype(float)
    return 1.0 / (l[:, None] + l[None, :] ** 1.5)


VARIANCE_FAMILIES = {"exp_neg_sum": _exp_neg_sum, "inverse_power": _inverse_power}


@dataclass(frozen=True)
class TvFarSpec:
    """Time-varying functional AR model in Fourier-coefficient space."""

    order: int
    dimension: int = 15
    lag_variances: tuple = ()
    kappas: tuple = ()
    sigma_sq: np.ndarray = field(default=None)  # type: ignore[assignment]
    noise_variance: object = Constant(1.0)
    break_frac: float | None = None
    post_kappas: tuple | None = None
    post_sigma_sq: np.ndarray | None = None
    burn_in: int = 100

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"order must be >= 0, got {self.order}")
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if len(self.lag_variances) != self.order or len(self.kappas) != self.order:
            raise ValueError("need one variance matrix and one norm schedule per lag")
        lag_variances = tuple(np.asarray(v, dtype=float) for v in self.lag_variances)
        for v in lag_variances:
            if v.shape != (self.dimension, self.dimension) or np.any(v < 0):
                raise ValueError("lag variances must be nonnegative L x L matrices")
        sigma_sq = self.sigma_sq
        if sigma_sq is None:
            sigma_sq = np.ones(self.dimension)
        sigma_sq = np.asarray(sigma_sq, dtype=float)
        if sigma_sq.shape != (self.dimension,) or np.any(sigma_sq < 0):
            raise ValueError("sigma_sq must be a length-L nonnegative sequence")
        if self.break_frac is not None:
            if not 0.0 < self.break_frac < 1.0:
                raise ValueError(f"break point must lie in (0, 1), got {self.break_frac}")
            if self.post_kappas is not None and len(self.post_kappas) != self.order:
                raise ValueError("post-break norms must cover every lag")
        post_sigma_sq = self.post_sigma_sq
        if post_sigma_sq is not None:
            post_sigma_sq = np.asarray(post_sigma_sq, dtype=float)
            if post_sigma_sq.shape != (self.dimension,) or np.any(post_sigma_sq < 0):
                raise ValueError("post-break sigma_sq must be nonnegative, length L")
        object.__setattr__(self, "lag_variances", lag_variances)
        object.__setattr__(self, "sigma_sq", sigma_sq)
        object.__setattr__(self, "post_sigma_sq", post_sigma_sq)


def _as_schedule(value) -> object:
    if hasattr(value, "at"):
        return value
    return Constant(float(value))


def preset(
    name: str,
    n_total: int | None = None,
    dimension: int = 15,
    model4_period: float = 1024.0,
    decreasing_noise: bool = False,
) -> TvFarSpec:
    """The six benchmark models.

    I: functional white noise. II/III: FAR(2) with fixed norms. IV: tvFAR(1)
    with a cosine-modulated innovation variance (period `model4_period`,
    overridable to T). V: tvFAR(2) with a time-varying first norm. VI: FAR(2)
    with a structural break at 3T/8 and doubled innovation variance after it.
    """
    del n_total  # presets are expressed in rescaled or absolute time directly
    noise = _noise_variances(dimension, decreasing_noise)
    if name == "I":
        return TvFarSpec(order=0, dimension=dimension, sigma_sq=noise)
    if name == "II":
        return TvFarSpec(
            order=2,
            dimension=dimension,
            lag_variances=(_exp_neg_sum(dimension), _inverse_power(dimension)),
            kappas=(Constant(0.75), Constant(-0.4)),
            sigma_sq=noise,
        )
    if name == "III":
        return TvFarSpec(
            order=2,
            dimension=dimension,
            lag_variances=(_exp_neg_sum(dimension), _inverse_power(dimension)),
            kappas=(Constant(0.4), Constant(0.45)),
            sigma_sq=noise,
        )
    if name == "IV":
        return TvFarSpec(
            order=1,
            dimension=dimension,
            lag_variances=(_exp_neg_sum(dimension),),
            kappas=(Constant(0.8),),
            sigma_sq=noise,
            noise_variance=CosineModulatedVariance(period=model4_period),
        )
    if name == "V":
        return TvFarSpec(
            order=2,
            dimension=dimension,
            lag_variances=(_exp_neg_sum(dimension), _exp_neg_sum(dimension)),
            kappas=(CosineOfCosine(1.8, 1.5, 2.0), Constant(-0.81)),
            sigma_sq=noise,
        )
    if name == "VI":
        return TvFarSpec(
            order=2,
            dimension=dimension,
            lag_variances=(_exp_neg_sum(dimension), _inverse_power(dimension)),
            kappas=(Constant(0.7), Constant(0.2)),
            sigma_sq=noise,
            break_frac=3.0 / 8.0,
            post_kappas=(Constant(0.0), Constant(-0.2)),
            post_sigma_sq=2.0 * noise,
        )
    raise ValueError(f"unknown model preset {name!r}; choose from {PRESET_NAMES}")


# ---------------------------------------------------------------------------
# Simulation

def draw_operator(
    variances: np.ndarray, norm: float, rng: np.random.Generator
) -> np.ndarray:
    """Gaussian random matrix rescaled to spectral norm |norm|, signed by norm.

    Entries are drawn independently N(0, variances[l, l']); a zero norm gives
    the zero matrix. An all-zero draw (probability zero unless all variances
    vanish) is redrawn once, then rejected.
    """
    variances = np.asarray(variances, dtype=float)
    if not math.isfinite(norm):
        raise ValueError("operator norm must be finite")
    if norm == 0.0:
        return np.zeros_like(variances)
    std = np.sqrt(variances)
    for _ in range(2):
        draw = rng.standard_normal(variances.shape) * std
        spectral = np.linalg.norm(draw, 2)
        if spectral > 0:
            return draw * (norm / spectral)
    raise ValueError("operator draw is identically zero; check the variance matrix")


def _break_index(spec: TvFarSpec, n_total: int) -> int | None:
    if spec.break_frac is None:
        return None
    return int(math.floor(spec.break_frac * n_total))


def simulate(
    spec: TvFarSpec,
    n_total: int,
    rng: np.random.Generator,
    n_grid: int = 100,
) -> FunctionalTimeSeries:
    """Generate T curves from the model.

    Operators are drawn once (unit spectral norm) and reused across time;
    variation enters through the norm schedules and the innovation variance
    profile. Burn-in steps run with the schedules frozen at t = 1 and zero
    initial conditions.
    """
    if n_total < 2:
        raise ValueError(f"need at least 2 curves, got {n_total}")
    p, dim = spec.order, spec.dimension
    base = [draw_operator(v, 1.0, rng) for v in spec.lag_variances]
    sigma = np.sqrt(spec.sigma_sq)
    post_sigma = None if spec.post_sigma_sq is None else np.sqrt(spec.post_sigma_sq)
    post_kappas = spec.post_kappas if spec.post_kappas is not None else spec.kappas
    break_at = _break_index(spec, n_total)

    coeffs = np.empty((n_total, dim))
    recent = [np.zeros(dim) for _ in range(p)]
    for step in range(spec.burn_in + n_total):
        t = max(1, step - spec.burn_in + 1)
        post = break_at is not None and t > break_at
        kappas = post_kappas if post else spec.kappas
        sig = post_sigma if (post and post_sigma is not None) else sigma
        scale_sq = spec.noise_variance.at(t, n_total)
        if scale_sq < 0:
            raise ValueError(
                f"innovation variance profile {spec.noise_variance!r} is "
                f"negative at t={t}"
            )
        x = rng.standard_normal(dim) * sig * math.sqrt(scale_sq)
        for lag in range(p):
            x = x + kappas[lag].at(t, n_total) * (base[lag] @ recent[lag])
        if np.abs(x).max() > STATE_OVERFLOW_GUARD:
            raise ExplosiveModelError(
                f"recursion overflowed at t={t}; norm schedules {spec.kappas} "
                "generate an explosive model"
            )
        if p:
            recent = [x] + recent[:-1]
        if step >= spec.burn_in:
            coeffs[step - spec.burn_in] = x
    basis = FourierBasis(dim).evaluate(n_grid)
    return FunctionalTimeSeries(coeffs @ basis)


# ---------------------------------------------------------------------------
# Monte Carlo harness

@dataclass(frozen=True)
class McConfig:
    model: TvFarSpec | str
    n_total: int
    n_blocks: int
    replications: int
    alphas: tuple[float, ...] = (0.05,)
    seed: int = 0
    workers: int = 1
    bias_mode: str = "scaled"
    n_grid: int = 100

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("need at least one replication")
        if not all(0.0 < a < 1.0 for a in self.alphas):
            raise ValueError("every alpha must lie in (0, 1)")
        object.__setattr__(self, "alphas", tuple(self.alphas))

    def resolved_model(self) -> TvFarSpec:
        if isinstance(self.model, str):
            return preset(self.model)
        return self.model


@dataclass(frozen=True)
class McResult:
    config: McConfig
    statistics: np.ndarray              # standardized statistic per replication (NaN = failed)
    rejection_rates: dict[float, float]  # alpha -> fraction rejected
    std_errors: dict[float, float]       # binomial Monte Carlo standard errors
    n_failed: int


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    """Philox stream keyed by (seed, replication); independent of ordering."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(replication,)))
    )


def _one_statistic(config: McConfig, replication: int) -> float:
    rng = replication_rng(config.seed, replication)
    spec = config.resolved_model()
    series = simulate(spec, config.n_total, rng, n_grid=config.n_grid)
    design = make_design(config.n_total, config.n_blocks)
    parts = distance_statistics(series, design, config.bias_mode)
    variance = null_variance(series, design)
    if variance <= 0.0:
        raise DegenerateSeriesError("degenerate replication")
    return math.sqrt(config.n_total) * parts.distance / math.sqrt(variance)


def _statistic_or_nan(args) -> float:
    config, replication = args
    try:
        return _one_statistic(config, replication)
    except (DegenerateSeriesError, ExplosiveModelError, ValueError):
        return math.nan


def _all_statistics(config: McConfig) -> np.ndarray:
    reps = range(config.replications)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            values = list(pool.map(_statistic_or_nan, [(config, r) for r in reps],
                                   chunksize=max(1, config.replications // (4 * config.workers))))
    else:
        values = [_statistic_or_nan((config, r)) for r in reps]
    statistics = np.array(values)
    n_failed = int(np.isnan(statistics).sum())
    if n_failed and n_failed / config.replications >= 0.01:
        raise MonteCarloError(
            f"{n_failed} of {config.replications} replications failed"
        )
    return statistics


def monte_carlo(config: McConfig) -> McResult:
    """Rejection rates of the stationarity test over seeded replications.

    Bit-reproducible for a fixed (seed, model, T, M, R) regardless of the
    worker count; aborts when at least 1% of the replications fail.
    """
    statistics = _all_statistics(config)
    ok = statistics[~np.isnan(statistics)]
    rates, errors = {}, {}
    for alpha in config.alphas:
        threshold = norm_quantile(1.0 - alpha)
        rate = float(np.mean(ok > threshold))
        rates[alpha] = rate
        errors[alpha] = math.sqrt(rate * (1.0 - rate) / ok.size)
    return McResult(config, statistics, rates, errors, int(np.isnan(statistics).sum()))


def density_samples(config: McConfig) -> np.ndarray:
    """The standardized statistics themselves (for density and KS analysis)."""
    return _all_statistics(config)


# ---------------------------------------------------------------------------
# Config-file loading (TOML)

def _load_toml(path):
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(path, "rb") as handle:
        return tomllib.load(handle)


def _parse_profile(value, dimension_hint: str) -> object:
    if isinstance(value, (int, float)):
        return Constant(float(value))
    kind = value.get("kind", "constant")
    if kind == "constant":
        return Constant(float(value["value"]))
    if kind == "cosine_of_cosine":
        return CosineOfCosine(
            float(value["amplitude"]), float(value["offset"]), float(value["cycles"])
        )
    if kind == "model4_cosine":
        return CosineModulatedVariance(period=float(value.get("period", 1024.0)))
    if kind == "raised_cosine":
        return RaisedCosineVariance()
    raise ValueError(f"unknown {dimension_hint} profile kind {kind!r}")


def _parse_variances(value, dimension: int) -> np.ndarray:
    if isinstance(value, str):
        try:
            return VARIANCE_FAMILIES[value](dimension)
        except KeyError:
            raise ValueError(
                f"unknown variance family {value!r}; "
                f"choose from {sorted(VARIANCE_FAMILIES)}"
            ) from None
    return np.asarray(value, dtype=float)


def _parse_sigma_sq(value, dimension: int) -> np.ndarray:
    if isinstance(value, str):
        if value == "exp_increasing":
            return _noise_variances(dimension)
        if value == "exp_decreasing":
            return _noise_variances(dimension, decreasing=True)
        raise ValueError(f"unknown sigma_sq family {value!r}")
    return np.asarray(value, dtype=float)


def load_spec(path) -> TvFarSpec:
    """Read a TvFarSpec from a TOML file (schema documented in the README)."""
    doc = _load_toml(path)
    model = doc["model"]
    dimension = int(model.get("dimension", 15))
    lags = model.get("lag", [])
    spec = TvFarSpec(
        order=int(model.get("order", len(lags))),
        dimension=dimension,
        lag_variances=tuple(_parse_variances(l["variances"], dimension) for l in lags),
        kappas=tuple(_parse_profile(l["kappa"], "norm") for l in lags),
        sigma_sq=_parse_sigma_sq(model.get("sigma_sq", "exp_increasing"), dimension),
        noise_variance=_parse_profile(model.get("noise_variance", 1.0), "variance"),
        burn_in=int(model.get("burn_in", 100)),
    )
    post = model.get("post_break")
    if post is not None:
        spec = replace(
            spec,
            break_frac=float(post["break_frac"]),
            post_kappas=tuple(_parse_profile(k, "norm") for k in post["kappas"])
            if "kappas" in post
            else None,
            post_sigma_sq=float(post.get("sigma_sq_factor", 1.0)) * spec.sigma_sq
            if "sigma_sq_factor" in post
            else None,
        )
    return spec
