import numpy as np
import pytest

from jpegcompat.codec import DctImpl
from jpegcompat.experiments import make_single_compressed
from jpegcompat.forensics import split_into_blocks
from jpegcompat.pipeline import COEF_DOMAIN, PIXEL_DOMAIN
from jpegcompat.quant import quant_table_from_qf
from jpegcompat.scenarios import (Blur, CopyMove, ForgerySpec, GridShift,
                                  MismatchClass, Rect, Splice, forge,
                                  recompress_scenario, synth_image)


def base_image(seed=0, size=64, qf=75):
    img, _ = make_single_compressed(seed, qf, size=size)
    return img


def test_rect_validation():
    with pytest.raises(ValueError):
        Rect(0, 0, 0, 8)
    assert Rect(8, 16, 24, 8).grid_aligned
    assert not Rect(8, 17, 24, 8).grid_aligned


def test_grid_shift_rejects_zero_phase():
    with pytest.raises(ValueError):
        GridShift(0, 0)
    with pytest.raises(ValueError):
        GridShift(8, -16)
    GridShift(3, 0)  # ok


def test_forge_reproducible():
    img = base_image()
    spec = ForgerySpec(Blur(radius=2), Rect(10, 10, 30, 25))
    d1, t1 = forge(img, spec)
    d2, t2 = forge(img, spec)
    assert np.array_equal(d1.samples, d2.samples)
    assert np.array_equal(t1.manipulated, t2.manipulated)


def test_blur_truth_covers_touched_blocks():
    img = base_image()
    region = Rect(10, 18, 30, 21)
    _, truth = forge(img, ForgerySpec(Blur(radius=2), region))
    expect = np.zeros((8, 8), dtype=bool)
    expect[18 // 8:(18 + 21 + 7) // 8, 10 // 8:(10 + 30 + 7) // 8] = True
    assert np.array_equal(truth.manipulated, expect)
    assert np.all(truth.classes[expect] == MismatchClass.GRID)
    assert np.all(truth.classes[~expect] == MismatchClass.NONE)


def test_blur_changes_only_region():
    img = base_image()
    region = Rect(16, 16, 16, 16)
    d, _ = forge(img, ForgerySpec(Blur(radius=2), region))
    outside = np.ones((64, 64), dtype=bool)
    outside[16:32, 16:32] = False
    assert np.array_equal(d.samples[0][outside], img.samples[0][outside])
    assert not np.array_equal(d.samples[0][16:32, 16:32],
                              img.samples[0][16:32, 16:32])


def test_shift_copies_from_offset_source():
    img = base_image(seed=1)
    region = Rect(16, 16, 16, 16)
    d, _ = forge(img, ForgerySpec(GridShift(3, 2), region))
    assert np.array_equal(d.samples[0][16:32, 16:32],
                          img.samples[0][18:34, 19:35])


def test_aligned_copy_move_class_none():
    img = base_image(seed=2)
    spec = ForgerySpec(CopyMove(Rect(0, 0, 16, 16), Rect(32, 32, 16, 16),
                                aligned=True), Rect(32, 32, 16, 16))
    d, truth = forge(img, spec)
    assert np.array_equal(d.samples[0][32:48, 32:48],
                          img.samples[0][0:16, 0:16])
    assert np.all(truth.classes[truth.manipulated] == MismatchClass.NONE)


def test_aligned_copy_move_requires_zero_phase():
    img = base_image()
    with pytest.raises(ValueError):
        forge(img, ForgerySpec(CopyMove(Rect(1, 0, 16, 16),
                                        Rect(32, 32, 16, 16), aligned=True),
                               Rect(32, 32, 16, 16)))


def test_splice_classes():
    img = base_image(seed=3, qf=75)
    host_q = quant_table_from_qf(75, 1)
    donor_q = quant_table_from_qf(50, 1)
    region = Rect(16, 16, 16, 16)
    spec = ForgerySpec(Splice(donor_table=donor_q, aligned=True,
                              host_table=host_q), region)
    _, truth = forge(img, spec)
    sel = truth.manipulated
    assert np.all(truth.classes[sel] == MismatchClass.QUANTIZATION)
    # unaligned region downgrades to a plain grid break
    spec2 = ForgerySpec(Splice(donor_table=donor_q, aligned=False,
                               host_table=host_q), Rect(17, 16, 16, 16))
    _, truth2 = forge(img, spec2)
    assert np.all(truth2.classes[truth2.manipulated] == MismatchClass.GRID)


def test_splice_partial_boundary_blocks_are_grid():
    img = base_image(seed=4)
    host_q = quant_table_from_qf(75, 1)
    donor_q = quant_table_from_qf(50, 1)
    region = Rect(16, 16, 20, 16)  # right edge cuts through a block column
    spec = ForgerySpec(Splice(donor_table=donor_q, aligned=True,
                              host_table=host_q), region)
    _, truth = forge(img, spec)
    assert truth.classes[2, 2] == MismatchClass.QUANTIZATION
    assert truth.classes[2, 4] == MismatchClass.GRID  # partial column


def test_recompress_scenario_consistency():
    img = base_image(seed=5)
    q2 = quant_table_from_qf(90, 1)
    e, f = recompress_scenario(img, q2)
    assert e.origin == COEF_DOMAIN and f.origin == PIXEL_DOMAIN
    # F is exactly the decompression of E
    from jpegcompat.codec import ColorImpl, decompress_blocks
    eb, _ = split_into_blocks(e)
    fb, _ = split_into_blocks(f)
    dec = decompress_blocks(eb, q2, DctImpl.INTEGER_SLOW,
                            ColorImpl.INTEGER_LIB)
    assert np.array_equal(dec, fb)


def test_synth_image_seeded_and_in_range():
    a = synth_image(11, 64, 48)
    b = synth_image(11, 64, 48)
    c = synth_image(12, 64, 48)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)
    assert a.samples.shape == (1, 64, 48)
    assert a.samples.min() >= 0 and a.samples.max() <= 255
