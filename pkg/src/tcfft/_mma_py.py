"""Pure-python fallback for the 16x16x16 MMA inner loop.

Bit-identical to the compiled kernel in _core.pyx: float32 arithmetic,
ascending-k accumulation, no fused multiply-add.
"""

import numpy as np


def mma16(a, b, c, d):
    """d = a @ b + c on 16x16 float32 tiles, ascending-k accumulation."""
    np.copyto(d, c)
    for k in range(16):
        d += a[:, k, None] * b[None, k, :]
