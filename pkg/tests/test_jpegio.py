import numpy as np
import pytest

from conftest import fixture_path
from jpegcompat.forensics import ImagePlane, Mask
from jpegcompat.jpegio import (MASK_PALETTE, ParseError, UnsupportedFormat,
                               encode_jpeg, parse_jpeg, read_raster,
                               write_binary_mask, write_mask, write_raster)
from jpegcompat.pipeline import PIXEL_DOMAIN
from jpegcompat.search import Verdict


def load_fixture(name):
    """(file bytes, reference coefs (c, gh, gw, 8, 8), tables (c, 8, 8))."""
    with open(fixture_path(name + ".jpg"), "rb") as f:
        data = f.read()
    ref = np.load(fixture_path(name + ".npz"))
    c = ref["qt"].shape[0]
    h, w = ref["decoded"].shape[:2]
    coefs = ref["coefs"].reshape(c, h // 8, w // 8, 8, 8).astype(np.int64)
    return data, coefs, ref["qt"].astype(np.int64), (w, h)


@pytest.mark.parametrize("name", ["sample_gray_q75", "sample_color_q90"])
def test_parse_matches_reference_decoder(name):
    data, coefs, qt, size = load_fixture(name)
    model = parse_jpeg(data)
    assert np.array_equal(model.coefs, coefs)
    assert np.array_equal(model.tables, qt)
    assert (model.width, model.height) == size


@pytest.mark.parametrize("name", ["sample_gray_q75", "sample_color_q90"])
def test_encode_round_trip(name):
    _, coefs, qt, _ = load_fixture(name)
    data = encode_jpeg(coefs, qt)
    model = parse_jpeg(data)
    assert np.array_equal(model.coefs, coefs)
    assert np.array_equal(model.tables, qt)


def test_truncated_stream_is_parse_error():
    data = load_fixture("sample_gray_q75")[0]
    with pytest.raises((ParseError, UnsupportedFormat)):
        parse_jpeg(data[: len(data) // 2])
    with pytest.raises(ParseError):
        parse_jpeg(b"\x00\x01")


def test_unsupported_variants_name_the_marker():
    import io
    from PIL import Image
    img = Image.fromarray(np.zeros((16, 16), dtype=np.uint8))
    buf = io.BytesIO()
    img.save(buf, "JPEG", progressive=True)
    with pytest.raises(UnsupportedFormat, match="SOF2"):
        parse_jpeg(buf.getvalue())


def test_subsampled_color_rejected():
    import io
    from PIL import Image
    rgb = Image.fromarray(np.zeros((16, 16, 3), dtype=np.uint8))
    buf = io.BytesIO()
    rgb.save(buf, "JPEG", subsampling=2)  # 4:2:0
    with pytest.raises(UnsupportedFormat, match="[Ss]ubsampl"):
        parse_jpeg(buf.getvalue())


def test_raster_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    img = ImagePlane(rng.integers(0, 256, (3, 24, 16)).astype(np.int64),
                     PIXEL_DOMAIN)
    path = tmp_path / "t.png"
    write_raster(img, path)
    back = read_raster(path)
    assert np.array_equal(back.samples, img.samples)
    assert back.origin == PIXEL_DOMAIN


def test_read_raster_rejects_odd_modes(tmp_path):
    from PIL import Image
    p = tmp_path / "p.png"
    Image.new("RGBA", (8, 8)).save(p)
    with pytest.raises(UnsupportedFormat):
        read_raster(p)


def test_mask_png_palette(tmp_path):
    from PIL import Image
    verdicts = np.array([[Verdict.COMPATIBLE, Verdict.INCOMPATIBLE],
                         [Verdict.UNSOLVED, Verdict.COMPATIBLE]],
                        dtype=object)
    mask = Mask(manipulated=(verdicts != Verdict.COMPATIBLE),
                tristate=verdicts)
    p = tmp_path / "m.png"
    write_mask(mask, p)
    px = np.asarray(Image.open(p).convert("RGB"))
    assert px.shape == (16, 16, 3)
    assert tuple(px[0, 0]) == MASK_PALETTE[Verdict.COMPATIBLE]
    assert tuple(px[0, 8]) == MASK_PALETTE[Verdict.INCOMPATIBLE]
    assert tuple(px[8, 0]) == MASK_PALETTE[Verdict.UNSOLVED]

    b = tmp_path / "b.png"
    write_binary_mask(mask, b)
    bpx = np.asarray(Image.open(b).convert("L"))
    assert bpx[0, 0] == 0 and bpx[0, 8] == 255 and bpx[8, 0] == 255
