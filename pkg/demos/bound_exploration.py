"""Walkthrough: how tight is the backward rounding-error bound?

The search is exhaustive only because the true antecedent is guaranteed to
lie within a computable distance of the exact floating-point backward
image of the observation.  Here we push random blocks through several
pipeline shapes, measure the actual backward error in the input metric,
and compare it with the declared bound.

Run:  python demos/bound_exploration.py
"""

import numpy as np

from jpegcompat.codec import ColorImpl, DctImpl
from jpegcompat.pipeline import (Stage, StageKind, backward_start,
                                 make_pipeline, pipeline_bound, run_forward)
from jpegcompat.quant import quant_table_from_qf

rng = np.random.default_rng(0)
N = 2000


def stage(kind, qf, channels):
    return Stage(kind, quant_table_from_qf(qf, channels),
                 DctImpl.INTEGER_SLOW, ColorImpl.INTEGER_LIB, channels)


shapes = {
    "decompress@50 gray": [stage(StageKind.DECOMPRESS, 50, 1)],
    "compress@75 gray": [stage(StageKind.COMPRESS, 75, 1)],
    "decompress@50 color": [stage(StageKind.DECOMPRESS, 50, 3)],
    "double chain 60->90 gray": [stage(StageKind.DECOMPRESS, 60, 1),
                                 stage(StageKind.COMPRESS, 90, 1),
                                 stage(StageKind.DECOMPRESS, 90, 1)],
}

for name, stages in shapes.items():
    p = make_pipeline(stages)
    c = p.channels
    # keep sources away from the rails so most decodes stay non-clipped
    px = rng.integers(48, 208, size=(N, c, 8, 8)).astype(np.int64)
    if p.input_domain == "coef":
        enc = Stage(StageKind.COMPRESS, stages[0].table, stages[0].dct_impl,
                    stages[0].color_impl, c)
        src = run_forward(make_pipeline([enc]), px)
    else:
        src = px
    obs = run_forward(p, src)
    x_b, clipped = backward_start(p, obs)
    w = p.input_metric_weight().astype(np.float64)
    d = np.linalg.norm(((src - x_b) * w).reshape(N, -1), axis=1)[~clipped]
    m = pipeline_bound(p)
    print(f"{name:28s} bound {m:8.2f}   observed max {d.max():8.2f} "
          f"(p50 {np.percentile(d, 50):6.2f})  "
          f"slack {m - d.max():6.2f}  [{len(d)} non-clipped]")

print("\nthe observed error never exceeds the bound; the gap is the price "
      "of a worst-case guarantee.")
