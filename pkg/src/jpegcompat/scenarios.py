"""Deterministic forgery simulator with exact block-level ground truth.

Starting from a decompressed image C, apply a local manipulation (grid
shift, blur, copy-move or splice) to obtain the forged image D, then
optionally recompress D to get the coefficient image E and its decompressed
raster F.  Every generated forgery carries a ground-truth mask of touched
blocks and the mismatch class the manipulation induces there:

* ``grid``: the manipulation destroyed the 8x8 dependency structure
  (misaligned paste, blur, shift);
* ``quantization``: grid-aligned donor content quantized with different
  tables;
* ``pipeline``: grid-aligned donor content with the same tables but a
  different codec implementation;
* ``none``: a perfect (grid-aligned, same-codec) copy, undetectable by
  construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .codec import ColorImpl, DctImpl, compress_blocks, decompress_blocks
from .forensics import ImagePlane, split_into_blocks
from .pipeline import COEF_DOMAIN, PIXEL_DOMAIN


class MismatchClass(enum.Enum):
    GRID = "grid"
    QUANTIZATION = "quantization"
    PIPELINE = "pipeline"
    NONE = "none"


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError("rectangle must have positive size")

    @property
    def grid_aligned(self):
        return (self.x % 8 == 0 and self.y % 8 == 0
                and self.w % 8 == 0 and self.h % 8 == 0)


@dataclass(frozen=True)
class GridShift:
    dx: int
    dy: int

    def __post_init__(self):
        if self.dx % 8 == 0 and self.dy % 8 == 0:
            raise ValueError("shift must be nonzero modulo 8")


@dataclass(frozen=True)
class Blur:
    radius: int = 2

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("blur radius must be >= 1")


@dataclass(frozen=True)
class CopyMove:
    src: Rect
    dst: Rect
    aligned: bool = False

    def __post_init__(self):
        if (self.src.w, self.src.h) != (self.dst.w, self.dst.h):
            raise ValueError("copy-move source and destination sizes differ")


@dataclass(frozen=True)
class Splice:
    """Donor content = the region re-encoded through the donor codec."""
    donor_table: np.ndarray
    donor_dct: DctImpl = DctImpl.INTEGER_SLOW
    donor_color: ColorImpl = ColorImpl.INTEGER_LIB
    aligned: bool = False
    host_table: Optional[np.ndarray] = None
    host_dct: Optional[DctImpl] = None


@dataclass(frozen=True)
class ForgerySpec:
    kind: Union[GridShift, Blur, CopyMove, Splice]
    region: Rect
    seed: int = 0


@dataclass(frozen=True)
class GroundTruth:
    manipulated: np.ndarray   # (grid_h, grid_w) bool
    classes: np.ndarray       # (grid_h, grid_w) of MismatchClass


def _check_rect(r: Rect, img: ImagePlane):
    if r.x < 0 or r.y < 0 or r.x + r.w > img.width or r.y + r.h > img.height:
        raise ValueError(f"rectangle {r} outside {img.width}x{img.height}")


def _touched_blocks(r: Rect, gh, gw):
    mask = np.zeros((gh, gw), dtype=bool)
    mask[r.y // 8:(r.y + r.h + 7) // 8, r.x // 8:(r.x + r.w + 7) // 8] = True
    return mask


def _box_blur(img, region: Rect, radius):
    """Box blur of the region, windows drawn from the full image."""
    c, h, w = img.shape
    k = 2 * radius + 1
    padded = np.pad(img.astype(np.float64),
                    ((0, 0), (radius, radius), (radius, radius)), mode="edge")
    # summed-area table per channel
    cs = padded.cumsum(axis=1).cumsum(axis=2)
    cs = np.pad(cs, ((0, 0), (1, 0), (1, 0)))
    out = (cs[:, k:, k:] - cs[:, :-k, k:] - cs[:, k:, :-k]
           + cs[:, :-k, :-k]) / (k * k)
    res = img.copy()
    sl = (slice(None), slice(region.y, region.y + region.h),
          slice(region.x, region.x + region.w))
    res[sl] = np.clip(np.round(out[sl]), 0, 255).astype(np.int64)
    return res


def _reencode_region(img, region: Rect, kind: Splice):
    """Compress+decompress the region's own pixels on the region's grid.

    The donor lattice is anchored at the region corner.  The window is
    padded to whole blocks (edge replication past the image border) so
    partial boundary strips are replaced too, then exactly the region is
    pasted back.
    """
    c, ih, iw = img.shape
    ph, pw = -(-region.h // 8) * 8, -(-region.w // 8) * 8
    ys = np.clip(np.arange(region.y, region.y + ph), 0, ih - 1)
    xs = np.clip(np.arange(region.x, region.x + pw), 0, iw - 1)
    patch = img[:, ys[:, None], xs[None, :]]
    blocks, _ = split_into_blocks(ImagePlane(patch, PIXEL_DOMAIN))
    coefs = compress_blocks(blocks, kind.donor_table, kind.donor_dct,
                            kind.donor_color)
    dec = decompress_blocks(coefs, kind.donor_table, kind.donor_dct,
                            kind.donor_color)
    gh, gw = ph // 8, pw // 8
    raster = (dec.reshape(gh, gw, c, 8, 8)
              .transpose(2, 0, 3, 1, 4).reshape(c, ph, pw))
    res = img.copy()
    res[:, region.y:region.y + region.h, region.x:region.x + region.w] = \
        raster[:, :region.h, :region.w]
    return res


def _splice_class(kind: Splice):
    if not kind.aligned:
        return MismatchClass.GRID
    if (kind.host_table is not None
            and not np.array_equal(kind.host_table, kind.donor_table)):
        return MismatchClass.QUANTIZATION
    if kind.host_dct is not None and kind.host_dct is not kind.donor_dct:
        return MismatchClass.PIPELINE
    return MismatchClass.NONE


def forge(img_c: ImagePlane, spec: ForgerySpec):
    """Apply one manipulation to C; returns (D, GroundTruth)."""
    if img_c.origin != PIXEL_DOMAIN:
        raise ValueError("forgeries operate on decompressed pixel images")
    _check_rect(spec.region, img_c)
    gh, gw = img_c.height // 8, img_c.width // 8
    src = img_c.samples
    kind = spec.kind
    region = spec.region

    if isinstance(kind, GridShift):
        shifted = Rect(region.x + kind.dx, region.y + kind.dy,
                       region.w, region.h)
        _check_rect(shifted, img_c)
        out = src.copy()
        out[:, region.y:region.y + region.h, region.x:region.x + region.w] = \
            src[:, shifted.y:shifted.y + region.h,
                shifted.x:shifted.x + region.w]
        mask = _touched_blocks(region, gh, gw)
        cls = MismatchClass.GRID
    elif isinstance(kind, Blur):
        out = _box_blur(src, region, kind.radius)
        mask = _touched_blocks(region, gh, gw)
        cls = MismatchClass.GRID
    elif isinstance(kind, CopyMove):
        _check_rect(kind.src, img_c)
        _check_rect(kind.dst, img_c)
        phase_ok = ((kind.dst.x - kind.src.x) % 8 == 0
                    and (kind.dst.y - kind.src.y) % 8 == 0)
        if kind.aligned and not (kind.dst.grid_aligned and phase_ok):
            raise ValueError("aligned copy-move requires grid-aligned "
                             "rectangles with zero relative offset")
        out = src.copy()
        out[:, kind.dst.y:kind.dst.y + kind.dst.h,
            kind.dst.x:kind.dst.x + kind.dst.w] = \
            src[:, kind.src.y:kind.src.y + kind.src.h,
                kind.src.x:kind.src.x + kind.src.w]
        mask = _touched_blocks(kind.dst, gh, gw)
        cls = MismatchClass.NONE if (kind.aligned and phase_ok) \
            else MismatchClass.GRID
    elif isinstance(kind, Splice):
        if kind.aligned and (region.x % 8 or region.y % 8):
            raise ValueError("aligned splice requires the region origin on "
                             "the block grid")
        out = _reencode_region(src, region, kind)
        mask = _touched_blocks(region, gh, gw)
        cls = _splice_class(kind)
    else:
        raise TypeError(f"unknown forgery kind {type(kind).__name__}")

    classes = np.full((gh, gw), MismatchClass.NONE, dtype=object)
    classes[mask] = cls
    if cls in (MismatchClass.QUANTIZATION, MismatchClass.PIPELINE):
        # boundary blocks only partially covered by the region carry a grid
        # break, whatever the class inside the region is
        inner = np.zeros_like(mask)
        r = spec.region
        inner[(r.y + 7) // 8:(r.y + r.h) // 8,
              (r.x + 7) // 8:(r.x + r.w) // 8] = True
        classes[mask & ~inner] = MismatchClass.GRID
    return ImagePlane(out, PIXEL_DOMAIN), GroundTruth(mask, classes)


def recompress_scenario(img_d: ImagePlane, q2,
                        dct_impl: DctImpl = DctImpl.INTEGER_SLOW,
                        color_impl: ColorImpl = ColorImpl.INTEGER_LIB):
    """Second compression of D: returns (coef image E, pixel image F)."""
    if img_d.origin != PIXEL_DOMAIN:
        raise ValueError("recompression starts from a pixel image")
    q2 = np.asarray(q2, dtype=np.int64)
    c, h, w = img_d.samples.shape
    blocks, _ = split_into_blocks(img_d)
    coefs = compress_blocks(blocks, q2, dct_impl, color_impl)
    dec = decompress_blocks(coefs, q2, dct_impl, color_impl)
    gh, gw = h // 8, w // 8
    e = (coefs.reshape(gh, gw, c, 8, 8)
         .transpose(2, 0, 3, 1, 4).reshape(c, h, w))
    f = (dec.reshape(gh, gw, c, 8, 8)
         .transpose(2, 0, 3, 1, 4).reshape(c, h, w))
    return ImagePlane(e, COEF_DOMAIN), ImagePlane(f, PIXEL_DOMAIN)


def synth_image(seed: int, height: int = 256, width: int = 256,
                channels: int = 1) -> ImagePlane:
    """Seeded smooth synthetic test image (sum of random low-frequency
    waves plus grain), kept away from the 0/255 rails so most blocks are
    non-clipped."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    img = np.zeros((channels, height, width))
    for ch in range(channels):
        acc = np.zeros((height, width))
        for _ in range(6):
            fx, fy = rng.uniform(0.002, 0.04, 2)
            phase = rng.uniform(0, 2 * np.pi)
            amp = rng.uniform(15, 45)
            acc += amp * np.sin(2 * np.pi * (fx * xx + fy * yy) + phase)
        acc += rng.normal(0, 6, (height, width))
        img[ch] = acc
    lo, hi = img.min(), img.max()
    img = 20 + (img - lo) / (hi - lo) * 215
    return ImagePlane(np.round(img).astype(np.int64), PIXEL_DOMAIN)
