"""Grid quadrature, the curve container and the Fourier basis."""

import numpy as np
import pytest

from ftstest.core import (
    DimensionMismatchError,
    FourierBasis,
    FunctionalTimeSeries,
    evaluate_basis,
    l2_inner,
    l2_norm_sq,
    uniform_grid,
)


def test_uniform_grid_right_endpoints():
    assert np.allclose(uniform_grid(4), [0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ValueError):
        uniform_grid(1)


def test_inner_product_is_grid_average():
    rng = np.random.default_rng(0)
    f = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    g = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    manual = sum(f[i] * np.conj(g[i]) for i in range(16)) / 16
    assert l2_inner(f, g) == pytest.approx(manual, rel=1e-12)


def test_inner_product_conjugate_symmetry():
    rng = np.random.default_rng(1)
    f = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    g = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    assert l2_inner(f, g) == pytest.approx(np.conj(l2_inner(g, f)), rel=1e-12)


def test_inner_product_rejects_mismatched_grids():
    with pytest.raises(DimensionMismatchError):
        l2_inner(np.zeros(4), np.zeros(5))
    with pytest.raises(DimensionMismatchError):
        l2_inner(np.zeros((2, 2)), np.zeros((2, 2)))


def test_norm_sq_real_nonnegative():
    f = np.array([1.0 + 2j, -3.0, 0.5j])
    value = l2_norm_sq(f)
    assert value == pytest.approx(abs(l2_inner(f, f)), rel=1e-12)
    assert value >= 0.0
    assert isinstance(value, float)


def test_fourier_basis_layout():
    rows = FourierBasis(5).evaluate(200)
    tau = uniform_grid(200)
    assert np.allclose(rows[0], 1.0)
    assert np.allclose(rows[1], np.sqrt(2) * np.sin(2 * np.pi * tau))
    assert np.allclose(rows[2], np.sqrt(2) * np.cos(2 * np.pi * tau))
    assert np.allclose(rows[3], np.sqrt(2) * np.sin(4 * np.pi * tau))
    assert np.allclose(rows[4], np.sqrt(2) * np.cos(4 * np.pi * tau))


def test_fourier_basis_orthonormal_under_grid_average():
    rows = FourierBasis(15).evaluate(100)
    gram = rows @ rows.T / 100
    assert np.max(np.abs(gram - np.eye(15))) < 1e-10


def test_fourier_basis_validation_and_helper():
    with pytest.raises(ValueError):
        FourierBasis(0)
    basis = FourierBasis(3)
    assert np.array_equal(evaluate_basis(basis, 50), basis.evaluate(50))


def test_series_validation():
    with pytest.raises(ValueError):
        FunctionalTimeSeries(np.zeros(8))  # not 2-d
    with pytest.raises(ValueError):
        FunctionalTimeSeries(np.zeros((1, 8)))  # one curve
    with pytest.raises(ValueError):
        FunctionalTimeSeries(np.zeros((8, 1)))  # one grid point
    bad = np.zeros((4, 4))
    bad[2, 1] = np.nan
    with pytest.raises(ValueError):
        FunctionalTimeSeries(bad)


def test_series_grid_checks():
    values = np.zeros((3, 4))
    with pytest.raises(DimensionMismatchError):
        FunctionalTimeSeries(values, grid=np.arange(5) / 5)
    with pytest.raises(ValueError):
        FunctionalTimeSeries(values, grid=np.array([0.1, 0.2, 0.5, 0.6]))
    series = FunctionalTimeSeries(values)
    assert np.allclose(series.grid, uniform_grid(4))


def test_series_is_frozen_and_defensive():
    data = np.ones((4, 3))
    series = FunctionalTimeSeries(data)
    data[0, 0] = 99.0
    assert series.values[0, 0] == 1.0
    with pytest.raises(ValueError):
        series.values[0, 0] = 2.0


def test_series_scaled_and_truncated():
    rng = np.random.default_rng(2)
    series = FunctionalTimeSeries(rng.standard_normal((6, 3)))
    doubled = series.scaled(2.0)
    assert np.array_equal(doubled.values, 2.0 * series.values)
    tail = series.head_truncated(4)
    assert tail.n_times == 4
    assert np.array_equal(tail.values, series.values[2:])
    with pytest.raises(ValueError):
        series.head_truncated(7)
    with pytest.raises(ValueError):
        series.head_truncated(1)
