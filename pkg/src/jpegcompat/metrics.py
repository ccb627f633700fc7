"""Block-level evaluation of localization masks.

Scores are computed on 8x8 blocks: a block counts as manipulated as soon as
one of its pixels is, identically for predictions and ground truth.  The
balanced accuracy is optionally "permuted": since verdicts carry no label
polarity, the prediction may be inverted wholesale if that scores better
(the truth never is).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int


def collapse_to_blocks(pixel_mask):
    """(h, w) binary raster -> (h/8, w/8) block mask, any-pixel rule."""
    m = np.asarray(pixel_mask).astype(bool)
    h, w = m.shape
    if h % 8 or w % 8:
        raise ValueError(f"mask dimensions {w}x{h} are not multiples of 8")
    return m.reshape(h // 8, 8, w // 8, 8).any(axis=(1, 3))


def _rate(num, den):
    # documented edge rule: an empty class scores 1.0 when nothing was
    # (mis)assigned to it, 0.0 otherwise
    if den == 0:
        return 1.0 if num == 0 else 0.0
    return num / den


def _score(pred, truth):
    tp = int((pred & truth).sum())
    fp = int((pred & ~truth).sum())
    tn = int((~pred & ~truth).sum())
    fn = int((~pred & truth).sum())
    tpr = _rate(tp, tp + fn)
    tnr = _rate(tn, fp + tn)
    fpr = 1.0 - tnr
    return {"acc": (tpr + tnr) / 2, "fpr": fpr,
            "counts": ConfusionCounts(tp, fp, tn, fn)}


def evaluate(pred, truth, permuted: bool = False):
    """Balanced accuracy and FPR of a block mask against ground truth.

    With ``permuted`` the prediction is replaced by its complement when
    that raises the accuracy; the reported FPR comes from the same
    assignment.
    """
    pred = np.asarray(pred).astype(bool)
    truth = np.asarray(truth).astype(bool)
    if pred.shape != truth.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {truth.shape}")
    out = _score(pred, truth)
    if permuted:
        inv = _score(~pred, truth)
        if inv["acc"] > out["acc"]:
            out = inv
    return out
