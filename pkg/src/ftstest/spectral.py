"""Block design, local functional DFTs and Hilbert-Schmidt periodogram products.

The sample of T curves is split into M non-overlapping blocks of N curves
(T = M * N, N even). Within block j the local functional DFT at the canonical
frequency 2*pi*k/N is

    D_{j,k} = (2 pi N)^(-1/2) * sum_{s=0}^{N-1} X_{N(j-1)+1+s} * exp(-i 2 pi k s / N),

computed for all k of a block in one FFT pass over the grid channels. The
periodogram at (j, k) is the rank-1 kernel D_{j,k}(tau) * conj(D_{j,k}(sigma));
its HS inner products reduce to |<D, D'>|^2 and never need materializing.
"""

from dataclasses import dataclass

import numpy as np

from .core import DimensionMismatchError, FunctionalTimeSeries, l2_inner


class BlockDesignError(ValueError):
    """Requested (T, M) split is inadmissible.

    Carries `largest_admissible`, the largest M' <= M with M' | T and T/M' even
    (None if no such M' exists); callers may truncate the series first.
    """

    def __init__(self, message: str, largest_admissible: int | None = None):
        super().__init__(message)
        self.largest_admissible = largest_admissible


@dataclass(frozen=True)
class BlockDesign:
    """Partition of T = M * N curves into M blocks of N, with block midpoints
    u_j = (N(j-1) + N/2)/T and canonical frequencies omega_k = 2 pi k / N."""

    n_total: int
    n_blocks: int
    block_length: int

    def __post_init__(self):
        if self.n_blocks < 1:
            raise BlockDesignError(f"need at least one block, got {self.n_blocks}")
        if self.block_length % 2 != 0 or self.block_length < 2:
            raise BlockDesignError(
                f"block length must be even and >= 2, got {self.block_length}"
            )
        if self.n_blocks * self.block_length != self.n_total:
            raise BlockDesignError(
                f"blocks do not tile the sample: {self.n_blocks} * "
                f"{self.block_length} != {self.n_total}"
            )

    @property
    def midpoints(self) -> np.ndarray:
        """u_j = (N(j-1) + N/2)/T for j = 1..M."""
        n, t = self.block_length, self.n_total
        j = np.arange(1, self.n_blocks + 1)
        return (n * (j - 1) + n / 2) / t

    def frequency(self, k: int) -> float:
        """omega_k = 2 pi k / N (k may be any integer)."""
        return 2 * np.pi * k / self.block_length

    def block_rows(self, j: int) -> slice:
        """0-based row slice of block j (1-based); times N(j-1)+1 .. Nj."""
        if not 1 <= j <= self.n_blocks:
            raise IndexError(f"block index {j} outside 1..{self.n_blocks}")
        start = self.block_length * (j - 1)
        return slice(start, start + self.block_length)


def _largest_admissible_blocks(n_total: int, at_most: int) -> int | None:
    for m in range(min(at_most, n_total // 2), 0, -1):
        if n_total % m == 0 and (n_total // m) % 2 == 0:
            return m
    return None


def make_design(n_total: int, n_blocks: int) -> BlockDesign:
    """Validated block design; raises BlockDesignError when M does not divide T
    or T/M is odd, reporting the largest admissible M' <= M."""
    if n_blocks < 1:
        raise BlockDesignError(f"need at least one block, got {n_blocks}")
    if n_total % n_blocks != 0 or (n_total // n_blocks) % 2 != 0:
        fallback = _largest_admissible_blocks(n_total, n_blocks)
        raise BlockDesignError(
            f"cannot split {n_total} curves into {n_blocks} blocks of even "
            f"length (largest admissible block count <= {n_blocks} is {fallback}); "
            "truncate the series first",
            largest_admissible=fallback,
        )
    return BlockDesign(n_total, n_blocks, n_total // n_blocks)


@dataclass(frozen=True)
class LocalFourierTransform:
    """Local functional DFT of block j at frequency index k."""

    block: int
    freq_index: int
    curve: np.ndarray


def block_fdfts(
    series: FunctionalTimeSeries, design: BlockDesign, j: int
) -> np.ndarray:
    """N x G complex array of local DFTs of block j for k = 0..N-1."""
    if series.n_times != design.n_total:
        raise DimensionMismatchError(
            f"series length {series.n_times} != design length {design.n_total}"
        )
    block = series.values[design.block_rows(j)]
    n = design.block_length
    return np.fft.fft(block, axis=0) / np.sqrt(2 * np.pi * n)


def all_fdfts(series: FunctionalTimeSeries, design: BlockDesign) -> np.ndarray:
    """M x N x G complex array of local DFTs; entry [j-1, k] is D_{j,k}."""
    return np.stack(
        [block_fdfts(series, design, j) for j in range(1, design.n_blocks + 1)]
    )


def fdft(
    series: FunctionalTimeSeries, design: BlockDesign, j: int, k: int
) -> LocalFourierTransform:
    """Local functional DFT of block j at omega_k; k may be any integer
    (the transform is N-periodic in k, so negative k maps to N - |k| mod N)."""
    curves = block_fdfts(series, design, j)
    return LocalFourierTransform(j, k, curves[k % design.block_length])


def hs_inner_periodograms(
    a: LocalFourierTransform, b: LocalFourierTransform
) -> float:
    """HS inner product of the rank-1 periodograms of a and b: |<a, b>|^2."""
    return abs(l2_inner(a.curve, b.curve)) ** 2


def gram_row(
    series: FunctionalTimeSeries, design: BlockDesign, k: int
) -> np.ndarray:
    """M x M Hermitian matrix with entry (j1, j2) = <D_{j1,k}, D_{j2,k}>."""
    d = all_fdfts(series, design)[:, k % design.block_length, :]
    return _gram(d)


def _gram(curves: np.ndarray) -> np.ndarray:
    """Gram matrix of grid-average inner products of the rows of `curves`."""
    return curves @ curves.conj().T / curves.shape[1]
