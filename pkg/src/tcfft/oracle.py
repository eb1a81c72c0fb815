"""Reference transforms and metrics.

Two independent float64 oracles cross-check each other: a direct O(N^2)
summation with Kahan compensation, and an iterative radix-2 transform for
lengths where the quadratic oracle is too slow. The error metric is the
per-bin relative deviation averaged over the spectrum, with an epsilon
floor on the denominator so near-zero bins do not blow it up; throughput is
reported as radix-2-equivalent TFLOPS (5N log2 N real operations per
complex transform, scaled by the conventional factor 6*2*log2(N)*N).
"""

import math
from dataclasses import dataclass

import numpy as np


def naive_dft(x) -> np.ndarray:
    """Direct O(N^2) DFT in float64, Kahan-compensated accumulation."""
    x = np.asarray(x, dtype=np.complex128)
    n = len(x)
    roots = np.exp(-2j * np.pi * np.arange(n) / n)
    k = np.arange(n, dtype=np.int64)
    acc = np.zeros(n, dtype=np.complex128)
    comp = np.zeros(n, dtype=np.complex128)
    for m in range(n):
        term = x[m] * roots[(m * k) % n]
        y = term - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
    return acc


def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    x = np.arange(n, dtype=np.int64)
    r = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        r = (r << 1) | (x & 1)
        x >>= 1
    return r


def reference_fft64(x) -> np.ndarray:
    """Iterative radix-2 decimation-in-time transform in float64."""
    x = np.asarray(x, dtype=np.complex128)
    n = len(x)
    if n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    a = x[_bit_reverse_indices(n)].copy()
    m = 1
    while m < n:
        tw = np.exp(-1j * np.pi * np.arange(m) / m)
        blocks = a.reshape(-1, 2 * m)
        t = blocks[:, m:] * tw
        u = blocks[:, :m].copy()
        blocks[:, :m] = u + t
        blocks[:, m:] = u - t
        m *= 2
    return a


def relative_error(x, x_ref) -> float:
    """Mean per-bin relative deviation of a spectrum from its reference.

    Denominators are floored at 1e-6 times the reference peak magnitude.
    """
    x = np.asarray(x, dtype=np.complex128)
    x_ref = np.asarray(x_ref, dtype=np.complex128)
    if x.shape != x_ref.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {x_ref.shape}")
    mag = np.abs(x_ref)
    floor = 1e-6 * mag.max()
    return float(np.mean(np.abs(x_ref - x) / np.maximum(mag, floor)))


def radix2_equiv_tflops(n: int, n_batch: int, repeats: int,
                        total_time_s: float) -> float:
    """Radix-2-equivalent TFLOPS: 6 * 2 * log2(N) * N * batch * repeats
    over the wall time. For 2D transforms pass n = nx*ny (the per-dimension
    passes sum to N log2 N total)."""
    if n < 2 or n_batch < 1 or repeats < 1:
        raise ValueError("n, n_batch, repeats must be positive")
    if total_time_s <= 0:
        raise ValueError(f"total time must be positive, got {total_time_s}")
    flops = 6.0 * 2.0 * math.log2(n) * n * n_batch * repeats
    return flops / (total_time_s * 1e12)


CSV_HEADER = "kind,n,ny,batch,metric,value"


@dataclass
class ErrorReport:
    dims: int
    n: int
    ny: int | None
    batch: int
    per_sequence: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.mean(self.per_sequence))

    @property
    def std(self) -> float:
        return float(np.std(self.per_sequence))

    def csv_row(self) -> str:
        kind = f"{self.dims}d"
        ny = self.ny if self.ny else ""
        return f"{kind},{self.n},{ny},{self.batch},relative_error,{self.mean:.6e}"


@dataclass
class PerfReport:
    dims: int
    n: int
    ny: int | None
    batch: int
    repeats: int
    total_time: float

    @property
    def tflops(self) -> float:
        total = self.n * (self.ny or 1)
        return radix2_equiv_tflops(total, self.batch, self.repeats, self.total_time)

    def csv_row(self) -> str:
        kind = f"{self.dims}d"
        ny = self.ny if self.ny else ""
        return f"{kind},{self.n},{ny},{self.batch},tflops,{self.tflops:.6e}"
