"""Single-stage JPEG compression and decompression of 8x8 blocks.

Blocks are integer numpy arrays of shape (c, 8, 8) with c in {1, 3}; batched
operations take (n, c, 8, 8).  Quantization tables have shape (c, 8, 8).

Implementation choices are explicit: the integer slow DCT and fixed-point
color transform reproduce the common C JPEG library bit for bit; the float
variant reproduces its AAN float path; the exact variants use the
mathematical transforms with a single rounding at the very end (or none at
all, for the backward pipeline which calls into :mod:`jpegcompat.dct` and
:mod:`jpegcompat.color` directly).
"""

from __future__ import annotations

import enum

import numpy as np

from . import color, dct


class DctImpl(enum.Enum):
    INTEGER_SLOW = "islow"
    FLOAT_FAST = "float"
    EXACT_ORTHO = "exact"


class ColorImpl(enum.Enum):
    INTEGER_LIB = "int"
    EXACT_MATRIX = "exact"


def round_half_away(x):
    """Round to nearest integer, halves away from zero, as int64."""
    x = np.asarray(x, dtype=np.float64)
    return np.trunc(x + np.copysign(0.5, x)).astype(np.int64)


def _check_block_shape(arr, table):
    arr = np.asarray(arr)
    if arr.ndim < 3 or arr.shape[-2:] != (8, 8) or arr.shape[-3] not in (1, 3):
        raise ValueError(f"expected (..., c, 8, 8) with c in {{1, 3}}, got {arr.shape}")
    table = np.asarray(table)
    if table.shape != (arr.shape[-3], 8, 8):
        raise ValueError(
            f"quantization table shape {table.shape} does not match block "
            f"channel count {arr.shape[-3]}")
    return arr, table


def _check_impls(dct_impl, color_impl):
    if color_impl is ColorImpl.EXACT_MATRIX and dct_impl is not DctImpl.EXACT_ORTHO:
        raise ValueError("the exact color transform is only meaningful with "
                         "the exact DCT")


def quantize_islow(scaled_coefs, table):
    """Quantize 8x-scaled integer DCT output, rounding half away from zero."""
    v = np.asarray(scaled_coefs, dtype=np.int64)
    q8 = np.asarray(table, dtype=np.int64) * 8
    return np.sign(v) * ((np.abs(v) + (q8 >> 1)) // q8)


def quantize_float(workspace, table):
    """Quantize AAN float DCT output with the reference float divisors."""
    div = (1.0 / (np.asarray(table, dtype=np.float64)
                  * dct.AAN_SCALE[:, None] * dct.AAN_SCALE[None, :] * 8.0)
           ).astype(np.float32)
    temp = np.asarray(workspace, dtype=np.float32) * div
    return np.trunc(temp + np.float32(16384.5)).astype(np.int64) - 16384


def forward_dct(plane, impl: DctImpl):
    """Level-shift and transform one or more 8x8 sample planes.

    Integer slow output is scaled up by 8 (fixed-point contract); float
    output carries the AAN scale factors; exact output is the true DCT.
    """
    plane = np.asarray(plane)
    if impl is DctImpl.INTEGER_SLOW:
        return dct.fdct_islow(plane.astype(np.int64) - 128)
    if impl is DctImpl.FLOAT_FAST:
        return dct.fdct_float(plane.astype(np.float32) - np.float32(128))
    return dct.dct_ortho(np.asarray(plane, dtype=np.float64) - 128.0)


def inverse_dct(dequantized, impl: DctImpl):
    """Inverse transform of dequantized coefficients.

    Integer and float variants return uint8 samples (rounding and range
    limiting included); the exact variant returns unrounded float samples
    shifted back to the [0, 255] range.
    """
    if impl is DctImpl.INTEGER_SLOW:
        return dct.idct_islow(np.asarray(dequantized, dtype=np.int64))
    if impl is DctImpl.FLOAT_FAST:
        raise ValueError("the float inverse needs the quantization table; "
                         "use decompress_blocks")
    return dct.idct_ortho(np.asarray(dequantized, dtype=np.float64)) + 128.0


def color_transform(pixels, direction: str, impl: ColorImpl):
    """Convert (..., 3, h, w) pixels between RGB and YCbCr.

    ``direction`` is "rgb_to_ycc" or "ycc_to_rgb".  The integer variant
    returns clamped integers; the exact variant returns floats.
    """
    pixels = np.asarray(pixels)
    if pixels.ndim < 3 or pixels.shape[-3] != 3:
        raise ValueError("color transform requires 3-channel input")
    if direction == "rgb_to_ycc":
        if impl is ColorImpl.INTEGER_LIB:
            return color.rgb_to_ycc_int(pixels)
        return color.rgb_to_ycc_exact(pixels)
    if direction == "ycc_to_rgb":
        if impl is ColorImpl.INTEGER_LIB:
            return color.ycc_to_rgb_int(pixels)
        return color.ycc_to_rgb_exact(pixels)
    raise ValueError(f"unknown direction {direction!r}")


def compress_blocks(pixels, table, dct_impl: DctImpl, color_impl: ColorImpl):
    """Compress pixel blocks (..., c, 8, 8) to quantized coefficients."""
    pixels, table = _check_block_shape(pixels, table)
    _check_impls(dct_impl, color_impl)
    channels = pixels.shape[-3]
    if channels == 3:
        planes = color_transform(pixels, "rgb_to_ycc", color_impl)
    else:
        planes = pixels
    if dct_impl is DctImpl.INTEGER_SLOW:
        return quantize_islow(forward_dct(planes, dct_impl), table)
    if dct_impl is DctImpl.FLOAT_FAST:
        return quantize_float(forward_dct(planes, dct_impl), table)
    return round_half_away(forward_dct(planes, dct_impl) / table)


def decompress_blocks(coefs, table, dct_impl: DctImpl, color_impl: ColorImpl):
    """Decompress quantized coefficients (..., c, 8, 8) to pixel blocks."""
    coefs, table = _check_block_shape(coefs, table)
    _check_impls(dct_impl, color_impl)
    channels = coefs.shape[-3]
    if dct_impl is DctImpl.INTEGER_SLOW:
        planes = dct.idct_islow(np.asarray(coefs, dtype=np.int64) * table)
    elif dct_impl is DctImpl.FLOAT_FAST:
        planes = np.empty(coefs.shape, dtype=np.uint8)
        for ch in range(channels):
            planes[..., ch, :, :] = dct.idct_float(coefs[..., ch, :, :],
                                                   table[ch])
    else:
        planes = inverse_dct(np.asarray(coefs, dtype=np.int64) * table,
                             dct_impl)
    if channels == 3:
        if color_impl is ColorImpl.INTEGER_LIB:
            out = color_transform(planes.astype(np.int64), "ycc_to_rgb",
                                  color_impl)
        else:
            out = np.clip(round_half_away(
                color_transform(planes, "ycc_to_rgb", color_impl)), 0, 255)
        return out.astype(np.int64)
    if dct_impl is DctImpl.EXACT_ORTHO:
        return np.clip(round_half_away(planes), 0, 255)
    return planes.astype(np.int64)


def compress_block(pixels, table, dct_impl=DctImpl.INTEGER_SLOW,
                   color_impl=ColorImpl.INTEGER_LIB):
    """Single-block convenience wrapper around :func:`compress_blocks`."""
    return compress_blocks(pixels, table, dct_impl, color_impl)


def decompress_block(coefs, table, dct_impl=DctImpl.INTEGER_SLOW,
                     color_impl=ColorImpl.INTEGER_LIB):
    """Single-block convenience wrapper around :func:`decompress_blocks`."""
    return decompress_blocks(coefs, table, dct_impl, color_impl)
