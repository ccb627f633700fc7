"""RGB <-> YCbCr conversions.

Two flavors:

* integer ("lib-style"): the 16-bit fixed-point arithmetic of the common C
  JPEG library, including its rounding fudge on the chroma channels.  Not
  invertible.
* exact: the plain conversion matrix in float64 with its true inverse;
  lossless up to machine epsilon.

Arrays are channel-first: shape (..., 3, 8, 8) or any (..., 3, h, w).
"""

from __future__ import annotations

import numpy as np

SCALEBITS = 16
ONE_HALF = 1 << (SCALEBITS - 1)
CBCR_OFFSET = 128 << SCALEBITS


def _fix(x: float) -> int:
    return int(x * (1 << SCALEBITS) + 0.5)


# Forward matrix of the standard conversion; rows: Y, Cb, Cr.
MATRIX = np.array([
    [0.299, 0.587, 0.114],
    [-0.168736, -0.331264, 0.5],
    [0.5, -0.418688, -0.081312],
])
MATRIX_INV = np.linalg.inv(MATRIX)
OFFSET = np.array([0.0, 128.0, 128.0])


def rgb_to_ycc_int(rgb):
    """Fixed-point RGB -> YCbCr, bit-identical to the C encoder."""
    r = np.asarray(rgb[..., 0, :, :], dtype=np.int64)
    g = np.asarray(rgb[..., 1, :, :], dtype=np.int64)
    b = np.asarray(rgb[..., 2, :, :], dtype=np.int64)
    y = (_fix(0.29900) * r + _fix(0.58700) * g
         + _fix(0.11400) * b + ONE_HALF) >> SCALEBITS
    cb = (-_fix(0.16874) * r - _fix(0.33126) * g
          + _fix(0.50000) * b + CBCR_OFFSET + ONE_HALF - 1) >> SCALEBITS
    cr = (_fix(0.50000) * r - _fix(0.41869) * g
          - _fix(0.08131) * b + CBCR_OFFSET + ONE_HALF - 1) >> SCALEBITS
    return np.stack([y, cb, cr], axis=-3)


def ycc_to_rgb_int(ycc):
    """Fixed-point YCbCr -> RGB with clamping, bit-identical to the C decoder."""
    y = np.asarray(ycc[..., 0, :, :], dtype=np.int64)
    cb = np.asarray(ycc[..., 1, :, :], dtype=np.int64) - 128
    cr = np.asarray(ycc[..., 2, :, :], dtype=np.int64) - 128
    r = y + ((_fix(1.40200) * cr + ONE_HALF) >> SCALEBITS)
    g = y + ((-_fix(0.34414) * cb + ONE_HALF - _fix(0.71414) * cr) >> SCALEBITS)
    b = y + ((_fix(1.77200) * cb + ONE_HALF) >> SCALEBITS)
    out = np.stack([r, g, b], axis=-3)
    return np.clip(out, 0, 255)


def rgb_to_ycc_exact(rgb):
    """Float RGB -> YCbCr using the exact matrix, no rounding."""
    x = np.asarray(rgb, dtype=np.float64)
    out = np.einsum("ij,...jhw->...ihw", MATRIX, x)
    return out + OFFSET[:, None, None]


def ycc_to_rgb_exact(ycc):
    """Float YCbCr -> RGB, exact inverse of :func:`rgb_to_ycc_exact`."""
    x = np.asarray(ycc, dtype=np.float64) - OFFSET[:, None, None]
    return np.einsum("ij,...jhw->...ihw", MATRIX_INV, x)
