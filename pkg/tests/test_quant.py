import io

import numpy as np
import pytest
from PIL import Image

from jpegcompat.quant import (BASE_CHROMA, BASE_LUMA, quant_table_from_qf,
                              scale_base_table)


def pil_tables(qf, mode):
    """Quantization tables libjpeg writes for this quality, via Pillow."""
    img = Image.new(mode, (8, 8))
    buf = io.BytesIO()
    img.save(buf, "JPEG", quality=qf)
    q = Image.open(buf).quantization  # {slot: 64 ints, natural order}
    return {slot: np.asarray(vals, dtype=np.int64).reshape(8, 8)
            for slot, vals in q.items()}


@pytest.mark.parametrize("qf", [10, 25, 50, 60, 75, 90, 95, 100])
def test_luma_table_matches_libjpeg(qf):
    ours = quant_table_from_qf(qf, 1)
    theirs = pil_tables(qf, "L")[0]
    assert np.array_equal(ours[0], theirs)


@pytest.mark.parametrize("qf", [50, 75, 90])
def test_chroma_table_matches_libjpeg(qf):
    ours = quant_table_from_qf(qf, 3)
    theirs = pil_tables(qf, "RGB")
    assert np.array_equal(ours[0], theirs[0])
    assert np.array_equal(ours[1], theirs[1])
    assert np.array_equal(ours[2], theirs[1])


def test_qf50_is_base_table():
    assert np.array_equal(scale_base_table(BASE_LUMA, 50), BASE_LUMA)
    assert np.array_equal(scale_base_table(BASE_CHROMA, 50), BASE_CHROMA)


def test_qf100_is_all_ones():
    assert np.all(quant_table_from_qf(100, 3) == 1)


def test_entries_clipped_to_valid_range():
    for qf in (1, 5, 99, 100):
        t = quant_table_from_qf(qf, 3)
        assert t.min() >= 1 and t.max() <= 255


def test_monotone_in_quality():
    # lower quality must never use a finer step anywhere
    prev = quant_table_from_qf(10, 1)
    for qf in (30, 50, 70, 90, 100):
        cur = quant_table_from_qf(qf, 1)
        assert np.all(cur <= prev)
        prev = cur


def test_channel_shapes():
    assert quant_table_from_qf(75, 1).shape == (1, 8, 8)
    assert quant_table_from_qf(75, 3).shape == (3, 8, 8)
