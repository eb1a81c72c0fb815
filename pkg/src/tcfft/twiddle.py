"""Roots-of-unity tables: DFT matrices and twiddle factors.

The forward transform convention is W_n = exp(-2j*pi/n). Exponents are
reduced mod n in exact integer arithmetic before the float64 trig
evaluation, so large row*col products lose no accuracy. Half-precision
consumers get values rounded once to binary16; the double-reference mode
uses the float64 values directly.
"""

from dataclasses import dataclass

import numpy as np

from .half import ComplexHalf, round_to_half


class UnsupportedRadixError(ValueError):
    pass


def _phase_pairs(exponents, n: int) -> np.ndarray:
    """Float64 (re, im) pairs of W_n**e for integer exponents (any shape)."""
    e = np.remainder(np.asarray(exponents, dtype=np.int64), n)
    ang = (-2.0 * np.pi / n) * e.astype(np.float64)
    out = np.empty(e.shape + (2,), dtype=np.float64)
    out[..., 0] = np.cos(ang)
    out[..., 1] = np.sin(ang)
    return out


def twiddle_block(rows, cols, n: int, dtype=np.float16) -> np.ndarray:
    """Twiddle factors W_n^(m*k) for broadcastable row/col index arrays.

    Returns (..., 2) pairs in the requested storage dtype.
    """
    m = np.asarray(rows, dtype=np.int64)
    k = np.asarray(cols, dtype=np.int64)
    e = np.remainder(m * np.remainder(k, n), n)  # exact: both factors < n
    pairs = _phase_pairs(e, n)
    if dtype == np.float64:
        return pairs
    return round_to_half(pairs)


def twiddle_at(m: int, k: int, n: int) -> ComplexHalf:
    """Single twiddle factor W_n^(m*k), rounded to binary16.

    The exponent m*k is reduced mod n as an exact integer first.
    """
    if n <= 0 or n & (n - 1):
        raise ValueError(f"transform size must be a power of two, got {n}")
    e = (int(m) * int(k)) % n
    pair = _phase_pairs(np.int64(e), n)
    return ComplexHalf(round_to_half(pair[0]), round_to_half(pair[1]))


@dataclass(frozen=True)
class DftMatrix:
    """Radix-n1 DFT matrix with entry (j, k) = W_n1^(j*k)."""

    n1: int
    pairs: np.ndarray  # (n1, n1, 2) binary16

    def entry(self, j: int, k: int) -> ComplexHalf:
        return ComplexHalf(self.pairs[j, k, 0], self.pairs[j, k, 1])


@dataclass(frozen=True)
class TwiddleTile:
    """Materialized n1 x n2 twiddle tile for a size-n merge (n = n1*n2)."""

    n1: int
    n2: int
    n: int
    pairs: np.ndarray  # (n1, n2, 2) binary16

    def entry(self, m: int, k: int) -> ComplexHalf:
        return ComplexHalf(self.pairs[m, k, 0], self.pairs[m, k, 1])


SUPPORTED_DFT_RADICES = (2, 4, 16)


def dft_matrix(n1: int, dtype=np.float16) -> DftMatrix:
    """DFT matrix F_n1 for n1 in {2, 4, 16}, rounded to the storage dtype."""
    if n1 not in SUPPORTED_DFT_RADICES:
        raise UnsupportedRadixError(f"unsupported DFT radix {n1}")
    j = np.arange(n1)
    pairs = twiddle_block(j[:, None], j[None, :], n1, dtype=dtype)
    return DftMatrix(n1, pairs)


def twiddle_tile(n1: int, n2: int, n: int, dtype=np.float16) -> TwiddleTile:
    """Materialized twiddle matrix; agrees elementwise with twiddle_at."""
    if n != n1 * n2:
        raise ValueError(f"size mismatch: {n1}*{n2} != {n}")
    m = np.arange(n1)
    k = np.arange(n2)
    pairs = twiddle_block(m[:, None], k[None, :], n, dtype=dtype)
    return TwiddleTile(n1, n2, n, pairs)
