"""Regenerate the frozen golden fixtures under tests/fixtures/.

Requires the compiled companion binary (build with
``gcc -O2 -o tools/golden_harness tools/golden_harness.c -ljpeg``).  The
fixtures pin the behavior of the system C JPEG library so the test suite
does not need libjpeg at run time.  JSIMD_FORCENONE keeps the library on
its portable scalar code paths while generating.
"""

import os
import pathlib
import subprocess

import numpy as np
from PIL import Image, ImageFilter

ROOT = pathlib.Path(__file__).resolve().parent.parent
HARNESS = ROOT / "tools" / "golden_harness"
OUT = ROOT / "tests" / "fixtures"
ENV = dict(os.environ, JSIMD_FORCENONE="1")
TMP = pathlib.Path("/tmp")

QFS = (50, 75, 90, 100)
DCT_CODES = {"islow": 0, "float": 2}


def run(*args):
    subprocess.run([str(HARNESS), *map(str, args)], check=True, env=ENV)


def make_image(rng, h, w, ch):
    """Half raw noise, half blurred noise, so coefficients span the realistic
    range instead of only the flat spectrum of white noise."""
    img = rng.integers(0, 256, (h, w, ch), dtype=np.uint8)
    smooth = np.stack([
        np.asarray(Image.fromarray(img[..., c]).filter(
            ImageFilter.GaussianBlur(3)))
        for c in range(ch)
    ], axis=-1)
    img[h // 2:] = smooth[h // 2:]
    return img


def to_blocks(img):
    h, w, ch = img.shape
    a = img.reshape(h // 8, 8, w // 8, 8, ch)
    return a.transpose(0, 2, 4, 1, 3).reshape(-1, ch, 8, 8)


def codec_fixture(rng, h, w, ch, name):
    img = make_image(rng, h, w, ch)
    raw = TMP / "fx_raw.bin"
    img.tofile(raw)
    nblocks = (h // 8) * (w // 8)
    data = {"pixels": to_blocks(img)}
    for qf in QFS:
        for dct_name, code in DCT_CODES.items():
            jpg = TMP / "fx.jpg"
            run("compress", w, h, ch, qf, code, raw, jpg)
            run("coefdump", jpg, TMP / "fx_c.bin", TMP / "fx_q.bin")
            coefs = np.fromfile(TMP / "fx_c.bin", dtype=np.int16)
            coefs = coefs.reshape(ch, nblocks, 8, 8).transpose(1, 0, 2, 3)
            run("decompress", jpg, code, TMP / "fx_d.bin")
            dec = np.fromfile(TMP / "fx_d.bin", dtype=np.uint8).reshape(h, w, ch)
            data[f"coef_{dct_name}_{qf}"] = coefs
            data[f"dec_{dct_name}_{qf}"] = to_blocks(dec)
        qt = np.fromfile(TMP / "fx_q.bin", dtype=np.uint16).reshape(ch, 8, 8)
        data[f"qt_{qf}"] = qt
    np.savez_compressed(OUT / name, **data)
    print(f"wrote {name}: {nblocks} blocks x {len(QFS)} qfs")


def jpeg_file_fixture(rng, h, w, ch, qf, name):
    """A small JPEG file plus its libjpeg-decoded coefficients and pixels,
    for cross-checking the pure-python container parser and encoder."""
    img = make_image(rng, h, w, ch)
    raw = TMP / "fx_raw.bin"
    img.tofile(raw)
    jpg = OUT / f"{name}.jpg"
    run("compress", w, h, ch, qf, 0, raw, jpg)
    run("coefdump", jpg, TMP / "fx_c.bin", TMP / "fx_q.bin")
    nblocks = (h // 8) * (w // 8)
    coefs = np.fromfile(TMP / "fx_c.bin", dtype=np.int16)
    coefs = coefs.reshape(ch, nblocks, 8, 8)
    qt = np.fromfile(TMP / "fx_q.bin", dtype=np.uint16).reshape(ch, 8, 8)
    run("decompress", jpg, 0, TMP / "fx_d.bin")
    dec = np.fromfile(TMP / "fx_d.bin", dtype=np.uint8).reshape(h, w, ch)
    np.savez_compressed(OUT / f"{name}.npz", coefs=coefs, qt=qt, decoded=dec)
    print(f"wrote {name}.jpg / {name}.npz")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20260823)
    codec_fixture(rng, 800, 800, 1, "codec_gray.npz")
    codec_fixture(rng, 400, 400, 3, "codec_color.npz")
    jpeg_file_fixture(rng, 64, 80, 1, 75, "sample_gray_q75")
    jpeg_file_fixture(rng, 64, 80, 3, 90, "sample_color_q90")


if __name__ == "__main__":
    main()
