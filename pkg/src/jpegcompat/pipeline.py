"""Composed compression/decompression pipelines.

A pipeline is a non-empty list of alternating compress/decompress stages.
It provides three things:

* the integer forward map (what a real encoder/decoder chain computes,
  rounding, clamping and all);
* the exact floating-point backward map, which inverts every stage with the
  orthonormal DCT and the exact color matrix and therefore reconstructs a
  real-valued preimage of the observation;
* an l2 radius around that preimage guaranteed (for non-clipped data) to
  contain every integer input the forward map could have started from.

The radius is measured in the pipeline's input domain: plain pixel l2 when
the input is a pixel block, quantization-weighted coefficient l2 (i.e.
``||Q c - Q c'||_2`` with Q the first stage's table) when the input is a
coefficient block.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import color, dct
from .codec import (ColorImpl, DctImpl, compress_blocks, decompress_blocks,
                    round_half_away)


class StageKind(enum.Enum):
    COMPRESS = "compress"
    DECOMPRESS = "decompress"


PIXEL_DOMAIN = "pixel"
COEF_DOMAIN = "coef"


@dataclass(frozen=True)
class Stage:
    kind: StageKind
    table: np.ndarray
    dct_impl: DctImpl = DctImpl.INTEGER_SLOW
    color_impl: ColorImpl = ColorImpl.INTEGER_LIB
    channels: int = 1

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int64)
        if self.channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {self.channels}")
        if table.shape != (self.channels, 8, 8):
            raise ValueError(f"table shape {table.shape} does not match "
                             f"{self.channels} channels")
        if (table < 1).any() or (table > 255).any():
            raise ValueError("quantization steps must lie in [1, 255]")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)


@dataclass(frozen=True)
class Pipeline:
    stages: tuple = field(default_factory=tuple)

    def __post_init__(self):
        stages = tuple(self.stages)
        if not stages:
            raise ValueError("pipeline needs at least one stage")
        channels = {s.channels for s in stages}
        if len(channels) != 1:
            raise ValueError("all stages must agree on channel count")
        for a, b in zip(stages, stages[1:]):
            if a.kind is b.kind:
                raise ValueError("stages must alternate compress/decompress")
        object.__setattr__(self, "stages", stages)

    @property
    def channels(self):
        return self.stages[0].channels

    @property
    def input_domain(self):
        return (PIXEL_DOMAIN if self.stages[0].kind is StageKind.COMPRESS
                else COEF_DOMAIN)

    @property
    def output_domain(self):
        return (COEF_DOMAIN if self.stages[-1].kind is StageKind.COMPRESS
                else PIXEL_DOMAIN)

    def input_metric_weight(self):
        """Per-position weights of the input-domain l2 metric: the first
        stage's quantization table for coefficient inputs, ones for pixels."""
        if self.input_domain == COEF_DOMAIN:
            return self.stages[0].table.astype(np.float64)
        return np.ones((self.channels, 8, 8))


def make_pipeline(stages) -> Pipeline:
    return Pipeline(tuple(stages))


def run_forward(p: Pipeline, blocks):
    """Integer forward map over (..., c, 8, 8) blocks."""
    blocks = np.asarray(blocks)
    if blocks.shape[-3] != p.channels:
        raise ValueError(f"pipeline expects {p.channels} channels, "
                         f"got {blocks.shape[-3]}")
    out = blocks
    for s in p.stages:
        if s.kind is StageKind.COMPRESS:
            out = compress_blocks(out, s.table, s.dct_impl, s.color_impl)
        else:
            out = decompress_blocks(out, s.table, s.dct_impl, s.color_impl)
    return out


def _exact_undo_compress(coefs, stage):
    # invert quantize + DCT (+ color) without any rounding
    planes = dct.idct_ortho(np.asarray(coefs, dtype=np.float64)
                            * stage.table) + 128.0
    if stage.channels == 3:
        planes = color.ycc_to_rgb_exact(planes)
    return planes


def _exact_undo_decompress(pixels, stage):
    planes = np.asarray(pixels, dtype=np.float64)
    if stage.channels == 3:
        planes = color.rgb_to_ycc_exact(planes)
    return dct.dct_ortho(planes - 128.0) / stage.table


def run_backward(p: Pipeline, observed):
    """Exact floating-point inverse of the whole chain, (..., c, 8, 8)."""
    return backward_start(p, observed)[0]


def backward_start(p: Pipeline, observed):
    """Backward pass plus a clipping flag for each block.

    Returns ``(x_b, clipped)`` where ``x_b`` is the real-valued preimage of
    ``observed`` and ``clipped`` is a boolean array over the batch dims,
    true when any pixel-domain value met along the way (the observation
    itself, or an intermediate plane of a multi-stage chain) rounds to 0 or
    255.  For such blocks the rounding-error analysis behind
    :func:`pipeline_bound` does not apply.
    """
    observed = np.asarray(observed)
    if observed.shape[-3] != p.channels:
        raise ValueError(f"pipeline expects {p.channels} channels, "
                         f"got {observed.shape[-3]}")
    clipped = np.zeros(observed.shape[:-3], dtype=bool)

    def note_pixels(arr):
        nonlocal clipped
        r = round_half_away(arr)
        clipped |= ((r <= 0) | (r >= 255)).any(axis=(-3, -2, -1))

    out = observed.astype(np.float64)
    domain = p.output_domain
    if domain == PIXEL_DOMAIN:
        note_pixels(out)
    for s in reversed(p.stages):
        if s.kind is StageKind.COMPRESS:
            out = _exact_undo_compress(out, s)
            domain = PIXEL_DOMAIN
            note_pixels(out)
        else:
            out = _exact_undo_decompress(out, s)
            domain = COEF_DOMAIN
    return out, clipped


def pipeline_bound(p: Pipeline) -> float:
    """l2 search radius around the backward start in the input-domain metric.

    Grayscale stages contribute the classic terms: 4 per decompression
    (half-unit rounding of 64 pixels) and ||Q/2||_2 per compression
    (quantizer rounding); the exact backward DCT is orthonormal, so the
    terms simply add.  Color stages are trickier: the color matrix is not
    orthogonal, so error accumulated on the far side of a color transform
    is amplified by the matrix's spectral norm when pulled back through it.
    Summing "+4 per color transform" is therefore unsound (counterexamples
    exist at qf 90); instead the bound is accumulated stage by stage in
    backward order, scaling by the appropriate spectral norm at each color
    crossing.  Each rounding of a full (3, 8, 8) tensor contributes
    sqrt(192)/2 before amplification.
    """
    sigma_fwd = np.linalg.norm(color.MATRIX, 2)        # ~0.80
    sigma_inv = np.linalg.norm(color.MATRIX_INV, 2)    # ~2.18
    m = 0.0
    for s in reversed(p.stages):
        is_color = s.channels == 3 and s.color_impl is ColorImpl.INTEGER_LIB
        round_192 = np.sqrt(192.0) / 2.0
        if s.kind is StageKind.COMPRESS:
            q_term = np.linalg.norm(s.table / 2.0)
            if is_color:
                # quantizer + color rounding live in YCbCr; undoing the
                # stage maps them (and everything upstream) to RGB
                m = sigma_inv * (m + q_term + round_192)
            else:
                m += q_term
        else:
            if is_color:
                # color rounding is in RGB, IDCT rounding in YCbCr
                m = sigma_fwd * (m + round_192) + round_192
            else:
                m += 4.0
    return float(m)
