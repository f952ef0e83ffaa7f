"""Discretized functional time series, the L2 quadrature rule and the Fourier basis.

Curves live on a uniform grid of G points tau_g = g/G, g = 1..G, on [0, 1].
All integrals over [0, 1] are computed as plain grid averages, so inner
products of grid-sampled curves are (1/G) * sum of pointwise products.
"""

from dataclasses import dataclass, field

import numpy as np

GRID_UNIFORMITY_TOL = 1e-12


class DimensionMismatchError(ValueError):
    """Two curves (or curve collections) live on grids of different length."""


def uniform_grid(n_points: int) -> np.ndarray:
    """Grid tau_g = g/G for g = 1..G (right endpoints of a uniform partition)."""
    if n_points < 2:
        raise ValueError(f"grid needs at least 2 points, got {n_points}")
    return np.arange(1, n_points + 1) / n_points


@dataclass(frozen=True)
class FunctionalTimeSeries:
    """T curves sampled on a common uniform grid of [0, 1].

    Parameters
    ----------
    values : ndarray of shape (T, G)
        Row t holds curve X_t evaluated at the grid points.
    grid : ndarray of shape (G,), optional
        Defaults to the right-endpoint grid g/G. Must be uniformly spaced.
    """

    values: np.ndarray
    grid: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError(f"values must be a T x G matrix, got shape {values.shape}")
        n_times, n_grid = values.shape
        if n_times < 2:
            raise ValueError(f"need at least 2 curves, got {n_times}")
        if n_grid < 2:
            raise ValueError(f"need at least 2 grid points, got {n_grid}")
        if not np.all(np.isfinite(values)):
            raise ValueError("curve values must all be finite")
        grid = self.grid
        if grid is None:
            grid = uniform_grid(n_grid)
        else:
            grid = np.asarray(grid, dtype=float)
            if grid.shape != (n_grid,):
                raise DimensionMismatchError(
                    f"grid has length {grid.shape}, values have {n_grid} columns"
                )
            spacings = np.diff(grid)
            if spacings.size and np.ptp(spacings) > GRID_UNIFORMITY_TOL:
                raise ValueError("grid spacing must be uniform to within 1e-12")
        values = values.copy()
        values.flags.writeable = False
        grid = grid.copy()
        grid.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "grid", grid)

    @property
    def n_times(self) -> int:
        return self.values.shape[0]

    @property
    def n_grid(self) -> int:
        return self.values.shape[1]

    def scaled(self, factor: float) -> "FunctionalTimeSeries":
        return FunctionalTimeSeries(self.values * factor, self.grid)

    def head_truncated(self, keep: int) -> "FunctionalTimeSeries":
        """Drop the earliest curves, keeping the final `keep` rows."""
        if not 2 <= keep <= self.n_times:
            raise ValueError(f"cannot keep {keep} of {self.n_times} curves")
        return FunctionalTimeSeries(self.values[self.n_times - keep:], self.grid)


def l2_inner(f: np.ndarray, g: np.ndarray) -> complex:
    """Grid-average inner product (1/G) * sum_g f(tau_g) * conj(g(tau_g)).

    Conjugate-symmetric: l2_inner(f, g) == conj(l2_inner(g, f)).
    """
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape or f.ndim != 1:
        raise DimensionMismatchError(
            f"curves must share one grid, got shapes {f.shape} and {g.shape}"
        )
    return complex(np.vdot(g, f)) / f.shape[0]


def l2_norm_sq(f: np.ndarray) -> float:
    """Squared L2 norm under the grid-average quadrature; real and >= 0."""
    f = np.asarray(f)
    return float(np.real(np.vdot(f, f))) / f.shape[0]


@dataclass(frozen=True)
class FourierBasis:
    """Orthonormal Fourier basis on [0, 1].

    psi_1 = 1, psi_{2m} = sqrt(2) sin(2 pi m tau), psi_{2m+1} = sqrt(2) cos(2 pi m tau).
    Orthonormal under the grid-average quadrature to 1e-10 once G >= 4 L.
    """

    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"basis dimension must be >= 1, got {self.dimension}")

    def evaluate(self, n_grid: int) -> np.ndarray:
        """L x G matrix; row l-1 holds psi_l at the grid points."""
        tau = uniform_grid(n_grid)
        rows = np.empty((self.dimension, n_grid))
        rows[0] = 1.0
        for l in range(2, self.dimension + 1):
            m = l // 2
            if l % 2 == 0:
                rows[l - 1] = np.sqrt(2.0) * np.sin(2 * np.pi * m * tau)
            else:
                rows[l - 1] = np.sqrt(2.0) * np.cos(2 * np.pi * m * tau)
        return rows


def evaluate_basis(basis: FourierBasis, n_grid: int) -> np.ndarray:
    return basis.evaluate(n_grid)
