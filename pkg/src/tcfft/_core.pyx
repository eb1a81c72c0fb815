# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernel: the 16x16x16 matrix-multiply-accumulate inner loop.

The accumulation order (ascending k, one float32 rounding per multiply and
per add, no FMA contraction) must stay bit-identical to the pure-python
fallback in _mma_py.py; both are exercised by the backend equivalence tests.
"""


def mma16(const float[:, :] a, const float[:, :] b, const float[:, :] c,
          float[:, :] d):
    """d = a @ b + c on 16x16 float32 tiles, ascending-k accumulation."""
    cdef int m, n, k
    cdef float acc
    for m in range(16):
        for n in range(16):
            acc = c[m, n]
            for k in range(16):
                acc = acc + a[m, k] * b[k, n]
            d[m, n] = acc
