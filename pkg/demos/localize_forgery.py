"""Walkthrough: localize a post-compression blur with a single image.

We build a single-compressed grayscale image, blur a rectangle of it (a
manipulation done *after* decompression), and ask every block whether it is
still compatible with the declared decompression pipeline.  Authentic
blocks resolve instantly; blurred blocks exhaust their search ball and come
back incompatible.

Run:  python demos/localize_forgery.py [outdir]
"""

import sys

import numpy as np

from jpegcompat.experiments import make_single_compressed
from jpegcompat.forensics import UnsolvedPolicy, analyze_image, build_mask
from jpegcompat.jpegio import write_mask, write_raster
from jpegcompat.pipeline import make_pipeline
from jpegcompat.scenarios import Blur, ForgerySpec, Rect, forge
from jpegcompat.search import SearchConfig, Verdict

outdir = sys.argv[1] if len(sys.argv) > 1 else "."

# a 256x256 image that went through one JPEG compression at quality 60
img_c, stage_d = make_single_compressed(seed=1, qf1=60, size=256)

# the forgery: blur a 72x56 rectangle, then pretend nothing happened
region = Rect(96, 104, 72, 56)
img_d, truth = forge(img_c, ForgerySpec(Blur(radius=2), region))
print(f"forged {int(truth.manipulated.sum())} of "
      f"{truth.manipulated.size} blocks")

# analyze against the declared pipeline: one decompression at quality 60
pipeline = make_pipeline([stage_d])
report = analyze_image(img_d, pipeline, SearchConfig(max_iterations=1000))

for v in Verdict:
    print(f"{v.value:>13}: {int((report.verdicts == v).sum())} blocks")

# compare the detection with the ground truth
mask = build_mask(report, UnsolvedPolicy.MANIPULATED)
hits = mask.manipulated & truth.manipulated
false = mask.manipulated & ~truth.manipulated
print(f"detected {int(hits.sum())}/{int(truth.manipulated.sum())} "
      f"manipulated blocks, {int(false.sum())} false alarms")

write_raster(img_d, f"{outdir}/forged.png")
write_mask(mask, f"{outdir}/verdicts.png")
print(f"wrote {outdir}/forged.png and {outdir}/verdicts.png")
