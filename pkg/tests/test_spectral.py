"""Block designs and local functional DFTs."""

import numpy as np
import pytest

from ftstest.core import DimensionMismatchError, FunctionalTimeSeries, l2_inner
from ftstest.spectral import (
    BlockDesignError,
    all_fdfts,
    block_fdfts,
    fdft,
    gram_row,
    hs_inner_periodograms,
    make_design,
)


def _series(n_times, n_grid=12, seed=0):
    rng = np.random.default_rng(seed)
    return FunctionalTimeSeries(rng.standard_normal((n_times, n_grid)))


def test_make_design_basic():
    design = make_design(4096, 16)
    assert (design.n_total, design.n_blocks, design.block_length) == (4096, 16, 256)
    assert design.frequency(1) == pytest.approx(2 * np.pi / 256)
    mids = design.midpoints
    assert mids.shape == (16,)
    assert mids[0] == pytest.approx(128 / 4096)
    assert mids[-1] == pytest.approx((256 * 15 + 128) / 4096)


def test_make_design_rejects_bad_splits():
    with pytest.raises(BlockDesignError) as info:
        make_design(12, 8)  # 8 does not divide 12
    assert info.value.largest_admissible == 6
    with pytest.raises(BlockDesignError) as info:
        make_design(12, 4)  # N = 3 is odd
    assert info.value.largest_admissible == 3
    with pytest.raises(BlockDesignError):
        make_design(16, 0)


def test_block_rows():
    design = make_design(12, 3)
    assert design.block_rows(1) == slice(0, 4)
    assert design.block_rows(3) == slice(8, 12)
    with pytest.raises(IndexError):
        design.block_rows(4)


def test_fdft_matches_direct_sum():
    series = _series(24, n_grid=7, seed=3)
    design = make_design(24, 3)
    n = design.block_length
    for j in (1, 3):
        block = series.values[design.block_rows(j)]
        for k in (0, 1, n // 2):
            direct = sum(
                block[s] * np.exp(-2j * np.pi * k * s / n) for s in range(n)
            ) / np.sqrt(2 * np.pi * n)
            assert np.allclose(fdft(series, design, j, k).curve, direct, atol=1e-12)


def test_fdft_periodic_in_k():
    series = _series(16, seed=4)
    design = make_design(16, 2)
    n = design.block_length
    base = fdft(series, design, 1, 3).curve
    assert np.allclose(fdft(series, design, 1, 3 + n).curve, base)
    assert np.allclose(fdft(series, design, 1, 3 - n).curve, base)


def test_conjugate_symmetry_for_real_curves():
    series = _series(32, seed=5)
    design = make_design(32, 2)
    d = all_fdfts(series, design)
    n = design.block_length
    for k in range(1, n):
        assert np.max(np.abs(d[:, n - k, :] - d[:, k, :].conj())) < 1e-12


def test_parseval_per_block():
    series = _series(40, n_grid=9, seed=6)
    design = make_design(40, 5)
    for j in range(1, design.n_blocks + 1):
        d = block_fdfts(series, design, j)
        lhs = np.sum(np.abs(d) ** 2) / series.n_grid
        block = series.values[design.block_rows(j)]
        rhs = np.sum(block**2) / series.n_grid / (2 * np.pi)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_all_fdfts_shape_and_length_check():
    series = _series(24, n_grid=5)
    design = make_design(24, 4)
    d = all_fdfts(series, design)
    assert d.shape == (4, 6, 5)
    with pytest.raises(DimensionMismatchError):
        all_fdfts(series, make_design(16, 2))


def test_gram_row_matches_pairwise_inner_products():
    series = _series(24, n_grid=6, seed=7)
    design = make_design(24, 4)
    k = 2
    gram = gram_row(series, design, k)
    assert gram.shape == (4, 4)
    assert np.allclose(gram, gram.conj().T)
    curves = [fdft(series, design, j, k).curve for j in range(1, 5)]
    for a in range(4):
        for b in range(4):
            assert gram[a, b] == pytest.approx(l2_inner(curves[a], curves[b]), rel=1e-12)


def test_hs_inner_periodograms_reduces_to_abs_square():
    series = _series(16, seed=8)
    design = make_design(16, 2)
    a = fdft(series, design, 1, 1)
    b = fdft(series, design, 1, 0)
    assert hs_inner_periodograms(a, b) == pytest.approx(
        abs(l2_inner(a.curve, b.curve)) ** 2, rel=1e-12
    )
    assert hs_inner_periodograms(a, a) >= 0.0
