"""tcfft: an emulated tensor-core FFT library.

Cooley-Tukey merging expressed as 16x16 mixed-precision matrix multiplies
on a warp-level MMA emulator, with a cuFFT-style plan/execute interface,
in-place changing-order data layout, and a double-precision reference mode.
"""

from .backend import active_backend, available_backends, set_backend
from .executor import BatchedTensor, execute, make_runner, read_tcf, write_tcf
from .fragments import FragmentMap, Warp, default_map, probe_map
from .half import ComplexHalf, complex_mul_half, round_to_half
from .kernels import MergeCounters, MergeKernel, StageRunner
from .oracle import naive_dft, radix2_equiv_tflops, reference_fft64, relative_error
from .plan import Plan, plan_1d, plan_2d, schedule_radices
from .twiddle import dft_matrix, twiddle_at, twiddle_tile

__version__ = "0.1.0"

__all__ = [
    "BatchedTensor",
    "ComplexHalf",
    "FragmentMap",
    "MergeCounters",
    "MergeKernel",
    "Plan",
    "StageRunner",
    "Warp",
    "active_backend",
    "available_backends",
    "complex_mul_half",
    "default_map",
    "dft_matrix",
    "execute",
    "make_runner",
    "naive_dft",
    "plan_1d",
    "plan_2d",
    "probe_map",
    "radix2_equiv_tflops",
    "read_tcf",
    "reference_fft64",
    "relative_error",
    "round_to_half",
    "schedule_radices",
    "set_backend",
    "twiddle_at",
    "twiddle_tile",
    "write_tcf",
]
