"""8x8 DCT transforms: bit-faithful integer and float variants plus the exact
orthonormal transform.

All functions are vectorized over a leading batch dimension: inputs have shape
(..., 8, 8) and are processed independently per 8x8 plane.

Three implementations live here:

* ``fdct_islow`` / ``idct_islow`` -- the 13-bit fixed-point slow integer
  transform used by the common C JPEG library ("islow").  Outputs of the
  forward transform are scaled up by a factor of 8 relative to the true DCT;
  the inverse consumes plain dequantized coefficients and produces clamped
  uint8 samples.
* ``fdct_float`` / ``idct_float`` -- the AAN floating-point transform
  ("float"), reproduced in strict float32 arithmetic with the same operation
  order so results agree with the C library bit for bit.
* ``dct_ortho`` / ``idct_ortho`` -- the mathematical orthonormal 2-D DCT-II,
  unitary to machine precision.  Used by the exact backward pipeline.
"""

from __future__ import annotations

import numpy as np

CONST_BITS = 13
PASS1_BITS = 2

FIX_0_298631336 = 2446
FIX_0_390180644 = 3196
FIX_0_541196100 = 4433
FIX_0_765366865 = 6270
FIX_0_899976223 = 7373
FIX_1_175875602 = 9633
FIX_1_501321110 = 12299
FIX_1_847759065 = 15137
FIX_1_961570560 = 16069
FIX_2_053119869 = 16819
FIX_2_562915447 = 20995
FIX_3_072711026 = 25172

# AAN scale factors: scalefactor[0]=1, scalefactor[k]=cos(k*pi/16)*sqrt(2)
AAN_SCALE = np.array([1.0, 1.387039845, 1.306562965, 1.175875602,
                      1.0, 0.785694958, 0.541196100, 0.275899379])


def _build_range_limit_tables():
    # Post-IDCT table: index is (value & 1023) where value is centered at 0;
    # wraps exactly like the C library's masked table lookup.
    post = np.empty(1024, dtype=np.uint8)
    idx = np.arange(1024)
    post[idx <= 127] = (idx[idx <= 127] + 128).astype(np.uint8)
    post[(idx >= 128) & (idx <= 511)] = 255
    post[(idx >= 512) & (idx <= 895)] = 0
    post[idx >= 896] = (idx[idx >= 896] - 896).astype(np.uint8)
    # Table indexed from sample_range_limit (used by the float IDCT, which
    # folds the +128 offset into its DC term before truncating).
    plain = np.empty(1024, dtype=np.uint8)
    plain[idx <= 255] = idx[idx <= 255].astype(np.uint8)
    plain[(idx >= 256) & (idx <= 639)] = 255
    plain[idx >= 640] = 0
    return post, plain


_RANGE_LIMIT_POST, _RANGE_LIMIT_PLAIN = _build_range_limit_tables()


# Each islow pass is a linear butterfly followed by a per-output descale
# (round-and-shift).  The butterflies below compute the pre-descale values;
# probing them with the identity yields 8x8 matrices, so a full pass becomes
# one matmul plus elementwise rounding.  All intermediates stay far below
# 2**53, so float64 matmuls are exact and the results match the reference
# integer arithmetic bit for bit (verified against the C-library fixtures).


def _fdct_pass_butterfly(d):
    # pre-descale linear part of one forward pass, along the last axis;
    # outputs 0 and 4 carry no FIX multiplications and are shifted, not
    # rounded, by the caller
    tmp0 = d[..., 0] + d[..., 7]
    tmp7 = d[..., 0] - d[..., 7]
    tmp1 = d[..., 1] + d[..., 6]
    tmp6 = d[..., 1] - d[..., 6]
    tmp2 = d[..., 2] + d[..., 5]
    tmp5 = d[..., 2] - d[..., 5]
    tmp3 = d[..., 3] + d[..., 4]
    tmp4 = d[..., 3] - d[..., 4]

    tmp10 = tmp0 + tmp3
    tmp13 = tmp0 - tmp3
    tmp11 = tmp1 + tmp2
    tmp12 = tmp1 - tmp2

    o0 = tmp10 + tmp11
    o4 = tmp10 - tmp11

    z1 = (tmp12 + tmp13) * FIX_0_541196100
    o2 = z1 + tmp13 * FIX_0_765366865
    o6 = z1 - tmp12 * FIX_1_847759065

    z1 = tmp4 + tmp7
    z2 = tmp5 + tmp6
    z3 = tmp4 + tmp6
    z4 = tmp5 + tmp7
    z5 = (z3 + z4) * FIX_1_175875602

    tmp4 = tmp4 * FIX_0_298631336
    tmp5 = tmp5 * FIX_2_053119869
    tmp6 = tmp6 * FIX_3_072711026
    tmp7 = tmp7 * FIX_1_501321110
    z1 = z1 * -FIX_0_899976223
    z2 = z2 * -FIX_2_562915447
    z3 = z3 * -FIX_1_961570560 + z5
    z4 = z4 * -FIX_0_390180644 + z5

    o7 = tmp4 + z1 + z3
    o5 = tmp5 + z2 + z4
    o3 = tmp6 + z2 + z3
    o1 = tmp7 + z1 + z4
    return np.stack([o0, o1, o2, o3, o4, o5, o6, o7], axis=-1)


def _idct_pass_butterfly(d):
    # pre-descale linear part of one inverse pass, along the last axis
    z2 = d[..., 2]
    z3 = d[..., 6]
    z1 = (z2 + z3) * FIX_0_541196100
    tmp2 = z1 - z3 * FIX_1_847759065
    tmp3 = z1 + z2 * FIX_0_765366865

    tmp0 = (d[..., 0] + d[..., 4]) * (1 << CONST_BITS)
    tmp1 = (d[..., 0] - d[..., 4]) * (1 << CONST_BITS)

    tmp10 = tmp0 + tmp3
    tmp13 = tmp0 - tmp3
    tmp11 = tmp1 + tmp2
    tmp12 = tmp1 - tmp2

    t0 = d[..., 7]
    t1 = d[..., 5]
    t2 = d[..., 3]
    t3 = d[..., 1]
    z1 = t0 + t3
    z2 = t1 + t2
    z3 = t0 + t2
    z4 = t1 + t3
    z5 = (z3 + z4) * FIX_1_175875602

    t0 = t0 * FIX_0_298631336
    t1 = t1 * FIX_2_053119869
    t2 = t2 * FIX_3_072711026
    t3 = t3 * FIX_1_501321110
    z1 = z1 * -FIX_0_899976223
    z2 = z2 * -FIX_2_562915447
    z3 = z3 * -FIX_1_961570560 + z5
    z4 = z4 * -FIX_0_390180644 + z5

    t0 = t0 + z1 + z3
    t1 = t1 + z2 + z4
    t2 = t2 + z2 + z3
    t3 = t3 + z1 + z4
    return np.stack([tmp10 + t3, tmp11 + t2, tmp12 + t1, tmp13 + t0,
                     tmp13 - t0, tmp12 - t1, tmp11 - t2, tmp10 - t3],
                    axis=-1)


_FDCT_M = _fdct_pass_butterfly(np.eye(8))
_IDCT_M = _idct_pass_butterfly(np.eye(8))
_K04 = np.array([0, 4])
_KODD = np.array([1, 2, 3, 5, 6, 7])


def _round_shift(y, shift):
    # float-exact equivalent of _descale on integer-valued y
    return np.floor((y + (1 << (shift - 1))) * (1.0 / (1 << shift)))


def fdct_islow(samples):
    """Forward slow-integer DCT of level-shifted samples.

    ``samples`` is an integer array (..., 8, 8) of values in [-128, 127].
    Returns int64 coefficients scaled up by 8 relative to the true DCT.
    """
    d = np.asarray(samples, dtype=np.float64)
    # Pass 1: rows; results scaled up by 2**PASS1_BITS.
    y = d @ _FDCT_M
    p1 = np.empty_like(y)
    p1[..., _K04] = y[..., _K04] * (1 << PASS1_BITS)
    p1[..., _KODD] = _round_shift(y[..., _KODD], CONST_BITS - PASS1_BITS)
    # Pass 2: columns; removes PASS1_BITS, leaves overall factor of 8.
    y = np.swapaxes(np.swapaxes(p1, -1, -2) @ _FDCT_M, -1, -2)
    out = np.empty_like(y)
    out[..., _K04, :] = _round_shift(y[..., _K04, :], PASS1_BITS)
    out[..., _KODD, :] = _round_shift(y[..., _KODD, :],
                                      CONST_BITS + PASS1_BITS)
    return out.astype(np.int64)


def idct_islow(dequantized):
    """Inverse slow-integer DCT of dequantized coefficients.

    ``dequantized`` is an integer array (..., 8, 8) of coefficient * step
    products.  Returns uint8 samples after rounding and range limiting
    (including the masked wraparound the C library applies to out-of-range
    intermediate values).
    """
    d = np.asarray(dequantized, dtype=np.float64)
    # Pass 1: columns.
    y = np.swapaxes(np.swapaxes(d, -1, -2) @ _IDCT_M, -1, -2)
    ws = _round_shift(y, CONST_BITS - PASS1_BITS)
    # Pass 2: rows, final descale and range limit.
    y = ws @ _IDCT_M
    idx = _round_shift(y, CONST_BITS + PASS1_BITS + 3).astype(np.int64)
    return _RANGE_LIMIT_POST[idx & 1023]


def _aan_fdct_1d(d0, d1, d2, d3, d4, d5, d6, d7, f):
    tmp0 = d0 + d7
    tmp7 = d0 - d7
    tmp1 = d1 + d6
    tmp6 = d1 - d6
    tmp2 = d2 + d5
    tmp5 = d2 - d5
    tmp3 = d3 + d4
    tmp4 = d3 - d4

    tmp10 = tmp0 + tmp3
    tmp13 = tmp0 - tmp3
    tmp11 = tmp1 + tmp2
    tmp12 = tmp1 - tmp2

    o0 = tmp10 + tmp11
    o4 = tmp10 - tmp11

    z1 = (tmp12 + tmp13) * f(0.707106781)
    o2 = tmp13 + z1
    o6 = tmp13 - z1

    tmp10 = tmp4 + tmp5
    tmp11 = tmp5 + tmp6
    tmp12 = tmp6 + tmp7

    z5 = (tmp10 - tmp12) * f(0.382683433)
    z2 = f(0.541196100) * tmp10 + z5
    z4 = f(1.306562965) * tmp12 + z5
    z3 = tmp11 * f(0.707106781)

    z11 = tmp7 + z3
    z13 = tmp7 - z3

    o5 = z13 + z2
    o3 = z13 - z2
    o1 = z11 + z4
    o7 = z11 - z4
    return o0, o1, o2, o3, o4, o5, o6, o7


def fdct_float(samples):
    """Forward AAN float DCT of level-shifted samples, strict float32.

    Output carries the AAN scale factors (overall factor 8 * aan_r * aan_c
    relative to the true DCT); the matching quantization divisors absorb
    them.
    """
    d = np.asarray(samples, dtype=np.float32)
    f = np.float32
    rows = _aan_fdct_1d(*(d[..., j] for j in range(8)), f)
    d = np.stack(rows, axis=-1)
    cols = _aan_fdct_1d(*(d[..., j, :] for j in range(8)), f)
    return np.stack(cols, axis=-2)


def idct_float(coefs, quant):
    """Inverse AAN float DCT, strict float32, matching the C library.

    ``coefs`` are quantized integer coefficients (..., 8, 8); ``quant`` is
    the (8, 8) quantization table.  Dequantization multipliers are
    quant * aan_r * aan_c computed in double then cast to float32, further
    scaled by 0.125 at use, exactly as in the reference decoder.
    """
    f = np.float32
    mult = (np.asarray(quant, dtype=np.float64)
            * AAN_SCALE[:, None] * AAN_SCALE[None, :]).astype(np.float32)
    d = np.asarray(coefs, dtype=np.float32) * (mult * f(0.125))

    # Pass 1: columns.
    tmp0 = d[..., 0, :]
    tmp1 = d[..., 2, :]
    tmp2 = d[..., 4, :]
    tmp3 = d[..., 6, :]

    tmp10 = tmp0 + tmp2
    tmp11 = tmp0 - tmp2
    tmp13 = tmp1 + tmp3
    tmp12 = (tmp1 - tmp3) * f(1.414213562) - tmp13

    tmp0 = tmp10 + tmp13
    tmp3 = tmp10 - tmp13
    tmp1 = tmp11 + tmp12
    tmp2 = tmp11 - tmp12

    tmp4 = d[..., 1, :]
    tmp5 = d[..., 3, :]
    tmp6 = d[..., 5, :]
    tmp7 = d[..., 7, :]

    z13 = tmp6 + tmp5
    z10 = tmp6 - tmp5
    z11 = tmp4 + tmp7
    z12 = tmp4 - tmp7

    tmp7 = z11 + z13
    tmp11 = (z11 - z13) * f(1.414213562)

    z5 = (z10 + z12) * f(1.847759065)
    tmp10 = z5 - z12 * f(1.082392200)
    tmp12 = z5 - z10 * f(2.613125930)

    tmp6 = tmp12 - tmp7
    tmp5 = tmp11 - tmp6
    tmp4 = tmp10 - tmp5

    ws = np.stack([tmp0 + tmp7, tmp1 + tmp6, tmp2 + tmp5, tmp3 + tmp4,
                   tmp3 - tmp4, tmp2 - tmp5, tmp1 - tmp6, tmp0 - tmp7],
                  axis=-2)

    # Pass 2: rows; +128.5 folded into the DC term, then truncation.
    z5 = ws[..., 0] + f(128.5)
    tmp10 = z5 + ws[..., 4]
    tmp11 = z5 - ws[..., 4]

    tmp13 = ws[..., 2] + ws[..., 6]
    tmp12 = (ws[..., 2] - ws[..., 6]) * f(1.414213562) - tmp13

    tmp0 = tmp10 + tmp13
    tmp3 = tmp10 - tmp13
    tmp1 = tmp11 + tmp12
    tmp2 = tmp11 - tmp12

    z13 = ws[..., 5] + ws[..., 3]
    z10 = ws[..., 5] - ws[..., 3]
    z11 = ws[..., 1] + ws[..., 7]
    z12 = ws[..., 1] - ws[..., 7]

    tmp7 = z11 + z13
    tmp11 = (z11 - z13) * f(1.414213562)

    z5 = (z10 + z12) * f(1.847759065)
    tmp10 = z5 - z12 * f(1.082392200)
    tmp12 = z5 - z10 * f(2.613125930)

    tmp6 = tmp12 - tmp7
    tmp5 = tmp11 - tmp6
    tmp4 = tmp10 - tmp5

    vals = np.stack([tmp0 + tmp7, tmp1 + tmp6, tmp2 + tmp5, tmp3 + tmp4,
                     tmp3 - tmp4, tmp2 - tmp5, tmp1 - tmp6, tmp0 - tmp7],
                    axis=-1)
    idx = np.trunc(vals).astype(np.int64) & 1023
    return _RANGE_LIMIT_PLAIN[idx]


def _ortho_matrix():
    k = np.arange(8)
    m = np.cos((2 * k[None, :] + 1) * k[:, None] * np.pi / 16) / 2.0
    m[0, :] /= np.sqrt(2)
    return m


_ORTHO = _ortho_matrix()


def dct_ortho(x):
    """Exact orthonormal 2-D DCT-II of (..., 8, 8) float input."""
    return _ORTHO @ np.asarray(x, dtype=np.float64) @ _ORTHO.T


def idct_ortho(X):
    """Exact inverse of :func:`dct_ortho`."""
    return _ORTHO.T @ np.asarray(X, dtype=np.float64) @ _ORTHO
