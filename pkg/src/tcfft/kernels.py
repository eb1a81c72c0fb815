"""Merging kernels: combine r sub-spectra of length n2 into spectra of
length r*n2, expressed as X_out = F_r . (T ** X_in) per column.

Radix 16 maps onto the emulated 16x16x16 MMA primitive: each 16x16 input
tile is twiddled elementwise during load, split into real and imaginary
fragments, and multiplied by the radix-16 DFT matrix with four mma_sync
calls (re = Fr*Xr - Fi*Xi, im = Fi*Xr + Fr*Xi). Radix 2 and 4 run on the
scalar half path; their DFT matrices contain only 0 and +-1 (and +-i), so
the combine step is adds, negations, and component swaps.

A composed kernel of radix 16^a * {1,2,4,8} runs its radix-16 sub-merges
first and the small remainder last, exchanging data between stages at
warp, block, or global scope.
"""

from dataclasses import dataclass, field

import numpy as np

from .fragments import Fragment, FragmentMap, Warp, default_map
from .half import complex_mul_pairs
from .tracking import tracker
from .twiddle import dft_matrix, twiddle_block

#: Kernel radices: powers of two up to 8192. The MMA-backed catalog starts
#: at 16; 2, 4, and 8 are pure scalar kernels kept for completeness.
KERNEL_CATALOG = tuple(2**k for k in range(1, 14))

VALID_CONT_SIZES = (4, 8, 16, 32, 64)

#: Scratch budget per gather buffer, in complex elements. A stage keeps at
#: most four such buffers live (gather, twiddles, twiddled input, result)
#: plus tile temporaries, staying within 2 * SEGMENT_ELEMS overall.
CHUNK_ELEMS = 2048

#: Envelope for per-tile fragment and accumulator temporaries.
TILE_SCRATCH_ELEMS = 1024

_FLOPS_CMUL = 6
_FLOPS_CADD = 2
_FLOPS_PER_MMA = 2 * 16 * 16 * 16


class ShapeError(ValueError):
    pass


def sub_radices_for(radix: int):
    """Decompose a kernel radix into sub-merge radices: 16s first, then the
    {2,4,8} remainder (8 runs as a radix-4 then a radix-2 sub-merge)."""
    if radix not in KERNEL_CATALOG:
        raise ValueError(f"radix {radix} not in the kernel catalog")
    subs = []
    rem = radix
    while rem % 16 == 0 and rem >= 16:
        subs.append(16)
        rem //= 16
    if rem == 8:
        subs += [4, 2]
    elif rem in (2, 4):
        subs.append(rem)
    return tuple(subs)


@dataclass(frozen=True)
class SubMerge:
    radix: int
    path: str  # "mma" for radix 16, "scalar" for radix 2/4

    @classmethod
    def of(cls, radix: int) -> "SubMerge":
        return cls(radix, "mma" if radix == 16 else "scalar")


@dataclass(frozen=True)
class MergeKernel:
    radix: int
    sub_merges: tuple

    @classmethod
    def for_radix(cls, radix: int) -> "MergeKernel":
        return cls(radix, tuple(SubMerge.of(r) for r in sub_radices_for(radix)))

    @property
    def sub_radices(self):
        return tuple(s.radix for s in self.sub_merges)

    def exchange_tiers(self):
        """Data-exchange scope after each sub-merge: within a warp's 16x16
        group, within the kernel segment (block), or global."""
        tiers = []
        grown = 1
        for i, sub in enumerate(self.sub_merges):
            grown *= sub.radix
            if i == len(self.sub_merges) - 1:
                tiers.append("global")
            elif grown <= 16:
                tiers.append("warp")
            else:
                tiers.append("block")
        return tuple(tiers)


@dataclass
class MergeCounters:
    """Work accounting split by execution path."""

    mma_calls: int = 0
    mma_flops: int = 0
    scalar_flops: int = 0
    butterflies: dict = field(default_factory=dict)

    def add_butterflies(self, radix: int, count: int):
        self.butterflies[radix] = self.butterflies.get(radix, 0) + count

    @property
    def mma_share(self) -> float:
        total = self.mma_flops + self.scalar_flops
        return self.mma_flops / total if total else 0.0


def gather_continuous(n_cols: int, n2: int, continuous_size: int) -> np.ndarray:
    """Group a stage's columns into coalesced memory-access runs.

    Returns the column indices reshaped (n_groups, run) where ``run`` is the
    number of adjacent memory elements fetched per access. Joining adjacent
    butterflies caps the run at n2 (columns of one block are n2-contiguous);
    values and results are unchanged by the grouping.
    """
    if continuous_size not in VALID_CONT_SIZES:
        raise ValueError(f"continuous_size must be one of {VALID_CONT_SIZES}")
    run = min(continuous_size, n2, n_cols)
    if n_cols % run:
        raise ShapeError(
            f"continuous size {continuous_size} (run {run}) does not divide "
            f"{n_cols} columns"
        )
    return np.arange(n_cols).reshape(-1, run)


class StageRunner:
    """Executes sub-merge stages in place over strided streams.

    mode "half": binary16 storage, float32 compute, MMA path for radix 16.
    mode "double": float64 reference arithmetic throughout, no rounding.
    """

    def __init__(self, mode: str = "half", fmap: FragmentMap | None = None,
                 acc_map: FragmentMap | None = None, continuous_size: int = 32,
                 fused_twiddle: bool = True, accumulate: str = "fp32"):
        if mode not in ("half", "double"):
            raise ValueError(f"unknown precision mode {mode!r}")
        if continuous_size not in VALID_CONT_SIZES:
            raise ValueError(f"continuous_size must be one of {VALID_CONT_SIZES}")
        self.mode = mode
        self.fmap = fmap if fmap is not None else default_map()
        self.acc_map = acc_map if acc_map is not None else self.fmap
        self.continuous_size = continuous_size
        self.fused_twiddle = fused_twiddle
        self.warp = Warp(accumulate=accumulate)
        self.counters = MergeCounters()
        self.dtype = np.float16 if mode == "half" else np.float64
        if mode == "half":
            f16 = dft_matrix(16).pairs
            self._frag_f_re = self._const_frag(f16[..., 0])
            self._frag_f_im = self._const_frag(f16[..., 1])
            self._frag_f_im_neg = self._const_frag(-f16[..., 1])
            zeros = np.zeros((32, self.acc_map.num_elements), dtype=np.float32)
            self._frag_zero = Fragment("accumulator", "row", self.acc_map, zeros)
        else:
            d = dft_matrix(16, dtype=np.float64).pairs
            self._f16_complex = d[..., 0] + 1j * d[..., 1]

    def _const_frag(self, tile) -> Fragment:
        return self.warp.load_matrix_sync(
            np.ascontiguousarray(tile, dtype=np.float16), self.fmap, "matrix_a"
        )

    # -- tile-group sub-merges -------------------------------------------

    def radix16_submerge(self, x_in: np.ndarray, twiddle_cols: np.ndarray,
                         n_merged: int) -> np.ndarray:
        """Merge groups of 16 sub-spectra: one column per butterfly.

        x_in is (16, W, 2); twiddle_cols gives each column's k index within
        its merge of size n_merged. Columns are padded to a multiple of 16.
        """
        if x_in.ndim != 3 or x_in.shape[0] != 16 or x_in.shape[2] != 2:
            raise ShapeError(f"expected (16, W, 2) input, got {x_in.shape}")
        w_real = x_in.shape[1]
        if self.mode == "double":
            tw = twiddle_block(
                np.arange(16)[:, None], twiddle_cols[None, :], n_merged,
                dtype=np.float64,
            )
            xc = (x_in[..., 0] + 1j * x_in[..., 1]) * (tw[..., 0] + 1j * tw[..., 1])
            yc = self._f16_complex @ xc
            out = np.empty_like(x_in)
            out[..., 0] = yc.real
            out[..., 1] = yc.imag
            self.counters.add_butterflies(16, w_real)
            return out

        w = -(-w_real // 16) * 16
        if w != w_real:
            pad = np.zeros((16, w, 2), dtype=np.float16)
            pad[:, :w_real] = x_in
            x_in = pad
            twiddle_cols = np.concatenate(
                [twiddle_cols, np.zeros(w - w_real, dtype=np.int64)]
            )
        tw = twiddle_block(
            np.arange(16)[:, None], twiddle_cols[None, :], n_merged
        )
        if self.fused_twiddle:
            # Twiddle during load: each lane multiplies the elements it is
            # about to store into its fragment slots (same elementwise op,
            # vectorized over the whole tile group).
            xt = complex_mul_pairs(x_in, tw)
        else:
            # Reference path: materialize the twiddle tile, multiply in
            # memory, then load the product.
            staged = np.empty_like(x_in)
            staged[...] = complex_mul_pairs(x_in, tw)
            xt = staged
        # Row 0 twiddles are exactly (1, 0); only rows 1..15 cost real work.
        self.counters.scalar_flops += _FLOPS_CMUL * 15 * w_real

        out = np.empty((16, w, 2), dtype=np.float16)
        for j in range(0, w, 16):
            frag_xr = self.warp.load_matrix_sync(
                np.ascontiguousarray(xt[:, j : j + 16, 0]), self.fmap, "matrix_b"
            )
            frag_xi = self.warp.load_matrix_sync(
                np.ascontiguousarray(xt[:, j : j + 16, 1]), self.fmap, "matrix_b"
            )
            acc_re = self.warp.mma_sync(self._frag_f_re, frag_xr, self._frag_zero)
            frag_re = self.warp.mma_sync(self._frag_f_im_neg, frag_xi, acc_re)
            acc_im = self.warp.mma_sync(self._frag_f_im, frag_xr, self._frag_zero)
            frag_im = self.warp.mma_sync(self._frag_f_re, frag_xi, acc_im)
            self.warp.store_matrix_sync(frag_re, out[:, j : j + 16, 0])
            self.warp.store_matrix_sync(frag_im, out[:, j : j + 16, 1])
        self.counters.mma_calls += 4 * (w // 16)
        self.counters.mma_flops += 4 * _FLOPS_PER_MMA * (w // 16)
        self.counters.add_butterflies(16, w_real)
        return out[:, :w_real]

    def _twiddled(self, x_in, twiddle_cols, n_merged, radix):
        tw = twiddle_block(
            np.arange(radix)[:, None], twiddle_cols[None, :], n_merged,
            dtype=self.dtype,
        )
        if self.mode == "double":
            return (x_in[..., 0] + 1j * x_in[..., 1]) * (tw[..., 0] + 1j * tw[..., 1])
        if self.fused_twiddle:
            u = complex_mul_pairs(x_in, tw)
        else:
            u = np.empty_like(x_in)
            u[...] = complex_mul_pairs(x_in, tw)
        # Row 0 twiddles are exactly (1, 0) and cost nothing.
        self.counters.scalar_flops += _FLOPS_CMUL * (radix - 1) * x_in.shape[1]
        return u

    def radix2_submerge(self, x_in: np.ndarray, twiddle_cols: np.ndarray,
                        n_merged: int) -> np.ndarray:
        """Scalar-path radix-2 butterflies over (2, W, 2) column pairs."""
        if x_in.ndim != 3 or x_in.shape[0] != 2 or x_in.shape[2] != 2:
            raise ShapeError(f"expected (2, W, 2) input, got {x_in.shape}")
        u = self._twiddled(x_in, twiddle_cols, n_merged, 2)
        out = np.empty_like(x_in)
        if self.mode == "double":
            out[..., 0] = np.stack([(u[0] + u[1]).real, (u[0] - u[1]).real])
            out[..., 1] = np.stack([(u[0] + u[1]).imag, (u[0] - u[1]).imag])
        else:
            u32 = u.astype(np.float32)
            out[0] = (u32[0] + u32[1]).astype(np.float16)
            out[1] = (u32[0] - u32[1]).astype(np.float16)
        self.counters.scalar_flops += 2 * _FLOPS_CADD * x_in.shape[1]
        self.counters.add_butterflies(2, x_in.shape[1])
        return out

    def radix4_submerge(self, x_in: np.ndarray, twiddle_cols: np.ndarray,
                        n_merged: int) -> np.ndarray:
        """Scalar-path radix-4 butterflies: the F_4 product is adds,
        negations, and real/imag swaps only (entries are 0, +-1, +-i)."""
        if x_in.ndim != 3 or x_in.shape[0] != 4 or x_in.shape[2] != 2:
            raise ShapeError(f"expected (4, W, 2) input, got {x_in.shape}")
        u = self._twiddled(x_in, twiddle_cols, n_merged, 4)
        if self.mode == "double":
            a, b = u[0] + u[2], u[1] + u[3]
            c, d = u[0] - u[2], u[1] - u[3]
            y = np.stack([a + b, c - 1j * d, a - b, c + 1j * d])
            out = np.empty_like(x_in)
            out[..., 0] = y.real
            out[..., 1] = y.imag
        else:
            u32 = u.astype(np.float32)
            a, b = u32[0] + u32[2], u32[1] + u32[3]
            c, d = u32[0] - u32[2], u32[1] - u32[3]
            out = np.empty_like(x_in)
            out[0] = (a + b).astype(np.float16)
            out[2] = (a - b).astype(np.float16)
            # -i*d = (d.im, -d.re); +i*d = (-d.im, d.re)
            out[1, :, 0] = (c[:, 0] + d[:, 1]).astype(np.float16)
            out[1, :, 1] = (c[:, 1] - d[:, 0]).astype(np.float16)
            out[3, :, 0] = (c[:, 0] - d[:, 1]).astype(np.float16)
            out[3, :, 1] = (c[:, 1] + d[:, 0]).astype(np.float16)
        self.counters.scalar_flops += 8 * _FLOPS_CADD * x_in.shape[1]
        self.counters.add_butterflies(4, x_in.shape[1])
        return out

    def submerge(self, radix, x_in, twiddle_cols, n_merged):
        if radix == 16:
            return self.radix16_submerge(x_in, twiddle_cols, n_merged)
        if radix == 4:
            return self.radix4_submerge(x_in, twiddle_cols, n_merged)
        if radix == 2:
            return self.radix2_submerge(x_in, twiddle_cols, n_merged)
        raise ValueError(f"no sub-merge for radix {radix}")

    # -- strided in-place stage application ------------------------------

    def apply_stage(self, flat: np.ndarray, offsets: np.ndarray, stride: int,
                    n_seq: int, radix: int, n2: int) -> None:
        """One sub-merge over every stream, in place.

        flat is the (total, 2) storage array; stream s's logical element j
        lives at flat[offsets[s] + j*stride]. Butterfly columns are chunked
        so live scratch stays within two CHUNK_ELEMS buffers.
        """
        if n_seq % (radix * n2):
            raise ShapeError(
                f"sequence length {n_seq} not divisible by {radix}*{n2}"
            )
        n_cols = n_seq // radix
        runs = gather_continuous(n_cols, n2, self.continuous_size)
        run = runs.shape[1]
        max_cols = max(run, (CHUNK_ELEMS // radix) // run * run)
        lane_off = (np.arange(radix) * (n2 * stride))[:, None, None]
        max_streams = max(1, CHUNK_ELEMS // (radix * min(max_cols, n_cols)))
        n_merged = radix * n2
        for s0 in range(0, len(offsets), max_streams):
            offs = offsets[s0 : s0 + max_streams]
            for c0 in range(0, n_cols, max_cols):
                cols = runs.reshape(-1)[c0 : c0 + max_cols]
                k = cols % n2
                base = (cols // n2) * n_merged + k
                idx = (offs[:, None] + base[None, :] * stride)[None, :, :] + lane_off
                idx = idx.reshape(radix, -1)
                if idx.max() >= len(flat):
                    raise ShapeError("stage gather out of bounds")
                tw_k = np.broadcast_to(k, (len(offs), len(cols))).reshape(-1)
                with tracker.borrow(4 * idx.size + TILE_SCRATCH_ELEMS):
                    x_in = flat[idx]
                    out = self.submerge(radix, x_in, tw_k, n_merged)
                    flat[idx] = out


def run_merge_kernel(kernel: MergeKernel, runner: StageRunner, flat: np.ndarray,
                     offsets: np.ndarray, stride: int, n_seq: int,
                     n2_start: int) -> int:
    """Run one composed merging kernel: sub-merges in order, each growing
    the merged sub-FFT length by its radix. Returns the new n2."""
    n2 = n2_start
    for sub in kernel.sub_merges:
        runner.apply_stage(flat, offsets, stride, n_seq, sub.radix, n2)
        n2 *= sub.radix
    assert n2 == kernel.radix * n2_start
    return n2
