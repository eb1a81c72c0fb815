"""IEEE binary16 storage arithmetic.

All intermediate data in the half-precision pipeline is stored as binary16
(1 sign, 5 exponent, 10 mantissa bits) and computed through float32, with a
single round-to-nearest-even conversion back to binary16 per output
component. This mirrors a GPU half2 FMA pipeline: products and sums are
formed in 32-bit registers and rounded once on store.

Complex values are kept as (..., 2) arrays with the real part at index 0 and
the imaginary part at index 1 of the last axis.
"""

from typing import NamedTuple

import numpy as np

HALF = np.float16
MAX_FINITE = 65504.0


class ComplexHalf(NamedTuple):
    """A complex number stored as two binary16 components."""

    re: np.float16
    im: np.float16

    @classmethod
    def from_complex(cls, z):
        return cls(round_to_half(z.real), round_to_half(z.imag))

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))


def round_to_half(x):
    """Round to the nearest binary16 value, ties to even.

    Overflow yields signed infinity, underflow a signed zero or subnormal.
    NaNs canonicalize (payloads are not preserved).
    """
    with np.errstate(over="ignore", under="ignore"):
        out = np.asarray(x).astype(np.float16)
    return out if out.ndim else out[()]


def half_to_bits(h):
    """Raw 16-bit pattern of a binary16 value (or array of them)."""
    return np.asarray(h, dtype=np.float16).view(np.uint16)


def bits_to_half(b):
    """Binary16 value for a raw 16-bit pattern (or array of them)."""
    return np.asarray(b, dtype=np.uint16).view(np.float16)


def complex_mul_half(a: ComplexHalf, b: ComplexHalf) -> ComplexHalf:
    """Complex product of two binary16 pairs.

    Each component is computed in float32 (products of halves are exact
    there) and rounded once to binary16.
    """
    ar, ai = np.float32(a.re), np.float32(a.im)
    br, bi = np.float32(b.re), np.float32(b.im)
    return ComplexHalf(
        round_to_half(ar * br - ai * bi),
        round_to_half(ar * bi + ai * br),
    )


def complex_mul_pairs(a, b):
    """Elementwise complex product of (..., 2) binary16 pair arrays.

    Returns a (..., 2) binary16 array; one rounding per component.
    """
    ar = a[..., 0].astype(np.float32)
    ai = a[..., 1].astype(np.float32)
    br = b[..., 0].astype(np.float32)
    bi = b[..., 1].astype(np.float32)
    out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=np.float16)
    out[..., 0] = round_to_half(ar * br - ai * bi)
    out[..., 1] = round_to_half(ar * bi + ai * br)
    return out
