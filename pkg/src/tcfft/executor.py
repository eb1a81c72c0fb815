"""Plan execution: in-place batched transforms over strided buffers.

The data layout follows the in-place changing-order scheme: inputs are
digit-reversal permuted once up front (per the flat sub-radix sequence of
the schedule), then every merging kernel runs in place, so outputs land in
natural index order. 2D transforms run the contiguous dimension (ny, rows)
first, then the strided dimension (nx) as a strided batched pass down the
columns. Scratch is bounded: all gathers are chunked and accounted by the
tracking hook.
"""

import struct

import numpy as np

from .kernels import CHUNK_ELEMS, StageRunner, run_merge_kernel
from .plan import Plan, digit_reversal_destinations
from .tracking import tracker


class ExecuteError(ValueError):
    pass


class BatchedTensor:
    """Strided view over a flat array of complex pairs.

    Logical element j of sequence b lives at pairs[b*batch_stride + j*stride].
    ``pairs`` has shape (total, 2) with re at [..., 0] and im at [..., 1];
    dtype float16 for the half pipeline, float64 for the reference mode.
    """

    def __init__(self, pairs: np.ndarray, batch: int, length: int,
                 stride: int = 1, batch_stride: int | None = None):
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ExecuteError(f"pairs must be (total, 2), got {pairs.shape}")
        if batch_stride is None:
            batch_stride = length * stride
        needed = batch_stride * (batch - 1) + stride * (length - 1) + 1
        if len(pairs) < needed:
            raise ExecuteError(
                f"buffer of {len(pairs)} elements too small for "
                f"batch={batch} len={length} stride={stride}"
            )
        if stride < 1 or (batch > 1 and batch_stride < stride * length):
            raise ExecuteError("logical elements must not alias")
        self.pairs = pairs
        self.batch = batch
        self.length = length
        self.stride = stride
        self.batch_stride = batch_stride

    @classmethod
    def zeros(cls, batch: int, length: int, dtype=np.float16) -> "BatchedTensor":
        return cls(np.zeros((batch * length, 2), dtype=dtype), batch, length)

    @classmethod
    def from_complex(cls, z, dtype=np.float16) -> "BatchedTensor":
        """Pack a (batch, length) complex array, rounding to the dtype."""
        z = np.atleast_2d(np.asarray(z))
        batch, length = z.shape
        pairs = np.empty((batch * length, 2), dtype=dtype)
        pairs[:, 0] = z.real.reshape(-1).astype(dtype)
        pairs[:, 1] = z.imag.reshape(-1).astype(dtype)
        return cls(pairs, batch, length)

    def offsets(self) -> np.ndarray:
        return np.arange(self.batch, dtype=np.int64) * self.batch_stride

    def to_complex(self) -> np.ndarray:
        """Gather the logical (batch, length) sequences as complex128."""
        idx = self.offsets()[:, None] + np.arange(self.length) * self.stride
        vals = self.pairs[idx]
        return vals[..., 0].astype(np.float64) + 1j * vals[..., 1].astype(np.float64)


# -- digit-reversal permutation ------------------------------------------


def _rotate_cycles(flat, offsets, cycles, stride):
    """Shift values one step along each permutation cycle, chunked so live
    scratch stays within one CHUNK_ELEMS buffer."""
    for length, cycs in sorted(cycles.items()):
        if length <= CHUNK_ELEMS:
            rows_per = max(1, CHUNK_ELEMS // length)
            streams_per = max(
                1, CHUNK_ELEMS // (length * min(rows_per, len(cycs)))
            )
            for s0 in range(0, len(offsets), streams_per):
                offs = offsets[s0 : s0 + streams_per]
                for r0 in range(0, len(cycs), rows_per):
                    rows = cycs[r0 : r0 + rows_per]
                    src = offs[:, None, None] + rows[None, :, :] * stride
                    dst = offs[:, None, None] + np.roll(rows, -1, axis=1)[None] * stride
                    with tracker.borrow(src.size):
                        flat[dst] = flat[src]
        else:
            for off in offsets:
                for cyc in cycs:
                    _rotate_long_cycle(flat, off, cyc, stride)


def _rotate_long_cycle(flat, off, cyc, stride):
    # new[cyc[i+1]] = old[cyc[i]], tail-first so sources are still unread.
    last = flat[off + cyc[-1] * stride].copy()
    n = len(cyc)
    hi = n
    while hi > 1:
        lo = max(1, hi - CHUNK_ELEMS)
        src = off + cyc[lo - 1 : hi - 1] * stride
        dst = off + cyc[lo:hi] * stride
        with tracker.borrow(hi - lo):
            flat[dst] = flat[src]
        hi = lo
    flat[off + cyc[0] * stride] = last


def digit_reversal_permute(data: BatchedTensor, sub_radices) -> BatchedTensor:
    """Permute each sequence so element (d_m ... d_1) moves to (d_1 ... d_m)
    under the schedule's digit decomposition. In place; self-inverse when
    all radices are equal."""
    dest = digit_reversal_destinations(data.length, sub_radices)
    from .plan import _cycles_by_length

    cycles = _cycles_by_length(dest)
    _rotate_cycles(data.pairs, data.offsets(), cycles, data.stride)
    return data


# -- execution -----------------------------------------------------------


def _run_dim(plan: Plan, runner: StageRunner, flat, offsets, stride, n_seq,
             schedule) -> None:
    cycles = plan.permutation_cycles(schedule)
    _rotate_cycles(flat, offsets, cycles, stride)
    n2 = 1
    for kernel in plan.kernels(schedule):
        n2 = run_merge_kernel(kernel, runner, flat, offsets, stride, n_seq, n2)
    assert n2 == n_seq


def make_runner(plan: Plan, **overrides) -> StageRunner:
    kwargs = {
        "mode": plan.precision,
        "continuous_size": plan.continuous_size,
    }
    kwargs.update(overrides)
    return StageRunner(**kwargs)


def execute(plan: Plan, data: BatchedTensor,
            runner: StageRunner | None = None) -> BatchedTensor:
    """Run the planned forward transform in place.

    Each sequence ends up holding its DFT in natural index order. Pass a
    runner to reuse fragment state or to read work counters afterwards.
    """
    expected_dtype = np.float16 if plan.precision == "half" else np.float64
    if data.pairs.dtype != expected_dtype:
        raise ExecuteError(
            f"plan precision {plan.precision} needs {expected_dtype} storage, "
            f"got {data.pairs.dtype}"
        )
    n_logical = plan.nx if plan.dims == 1 else plan.nx * plan.ny
    if data.batch != plan.batch or data.length != n_logical:
        raise ExecuteError(
            f"data shape (batch={data.batch}, len={data.length}) does not "
            f"match plan (batch={plan.batch}, len={n_logical})"
        )
    if runner is None:
        runner = make_runner(plan)
    tracker.reset()
    flat = data.pairs
    if plan.dims == 1:
        _run_dim(plan, runner, flat, data.offsets(), data.stride, plan.nx,
                 plan.schedule_x)
        return data

    if data.stride != 1:
        raise ExecuteError("2D execution requires contiguous row-major data")
    nx, ny = plan.nx, plan.ny
    base = data.offsets()
    # Contiguous dimension first: batch*nx rows of length ny.
    row_offsets = (base[:, None] + (np.arange(nx) * ny)[None, :]).reshape(-1)
    _run_dim(plan, runner, flat, row_offsets, 1, ny, plan.schedule_y)
    # Then the strided dimension: batch*ny columns of length nx, stride ny.
    col_offsets = (base[:, None] + np.arange(ny)[None, :]).reshape(-1)
    _run_dim(plan, runner, flat, col_offsets, ny, nx, plan.schedule_x)
    return data


def strided_pass(plan: Plan, runner: StageRunner, flat, offsets, stride,
                 n_seq, schedule) -> None:
    """One dimension's worth of batched strided 1D transforms (the building
    block of the 2D path); stride 1 degenerates to the contiguous pass."""
    _run_dim(plan, runner, flat, np.asarray(offsets, dtype=np.int64), stride,
             n_seq, schedule)


# -- binary interchange format -------------------------------------------

TCF_MAGIC = b"TCF1"
_HEADER = struct.Struct("<4sIIII")


def write_tcf(path, pairs: np.ndarray, dims: int, nx: int, ny: int = 1) -> None:
    """Write (batch, n, 2) binary16 data: 'TCF1' header then little-endian
    16-bit (re, im) pairs."""
    arr = np.ascontiguousarray(pairs, dtype=np.float16)
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[1] != nx * ny:
        raise ExecuteError(f"expected (batch, {nx * ny}, 2) data, got {arr.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(TCF_MAGIC, dims, nx, ny, arr.shape[0]))
        fh.write(arr.view(np.uint16).astype("<u2").tobytes())


def read_tcf(path):
    """Read a TCF1 file; returns (pairs (batch, n, 2) float16, dims, nx, ny)."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        magic, dims, nx, ny, batch = _HEADER.unpack(head)
        if magic != TCF_MAGIC:
            raise ExecuteError(f"bad magic {magic!r}, expected {TCF_MAGIC!r}")
        payload = np.frombuffer(fh.read(), dtype="<u2")
    n = nx * ny
    if payload.size != batch * n * 2:
        raise ExecuteError("truncated TCF payload")
    pairs = payload.astype(np.uint16).view(np.float16).reshape(batch, n, 2)
    return pairs, dims, nx, ny
