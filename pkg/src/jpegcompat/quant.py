"""Quantization tables and quality-factor scaling."""

from __future__ import annotations

import numpy as np

# Standard base tables (Annex K of the JPEG standard).
BASE_LUMA = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.int64)

BASE_CHROMA = np.array([
    [17, 18, 24, 47, 99, 99, 99, 99],
    [18, 21, 26, 66, 99, 99, 99, 99],
    [24, 26, 56, 99, 99, 99, 99, 99],
    [47, 66, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
], dtype=np.int64)


def scale_base_table(base, qf: int):
    """Linear quality scaling of a base table, clamped to baseline range."""
    if not 1 <= qf <= 100:
        raise ValueError(f"quality factor must be in [1, 100], got {qf}")
    scale = 5000 // qf if qf < 50 else 200 - 2 * qf
    table = (base * scale + 50) // 100
    return np.clip(table, 1, 255)


def quant_table_from_qf(qf: int, channels: int = 1):
    """Quantization tables for a quality factor, shape (channels, 8, 8).

    Channel 0 uses the luminance base table; channels 1-2 the chrominance
    one.  At qf=100 every step is 1.
    """
    if channels not in (1, 3):
        raise ValueError(f"channels must be 1 or 3, got {channels}")
    luma = scale_base_table(BASE_LUMA, qf)
    if channels == 1:
        return luma[None]
    chroma = scale_base_table(BASE_CHROMA, qf)
    return np.stack([luma, chroma, chroma])
