"""Whole-image analysis: per-block verdicts and localization masks.

Splits an observation (decompressed raster or coefficient plane) into 8x8
blocks, runs the antecedent search on each, and assembles a grid report.
Blocks whose rounded backward start already maps forward onto the
observation — the overwhelming majority in authentic images — are settled
in one vectorized pass; only the rest go through the full per-block search,
optionally across a process pool.  Results are keyed by grid coordinate, so
the report is identical for any worker count.
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .codec import round_half_away
from .pipeline import PIXEL_DOMAIN, Pipeline, backward_start, run_forward
from .search import SearchConfig, Verdict, find_antecedent


@dataclass(frozen=True)
class ImagePlane:
    """A (c, h, w) observation raster; origin says which domain it lives in."""
    samples: np.ndarray
    origin: str = PIXEL_DOMAIN

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 3 or s.shape[0] not in (1, 3):
            raise ValueError(f"expected (c, h, w) with c in {{1, 3}}, "
                             f"got {s.shape}")
        if self.origin == PIXEL_DOMAIN and ((s < 0).any() or (s > 255).any()):
            raise ValueError("pixel samples must lie in [0, 255]")
        s = s.astype(np.int64)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def height(self):
        return self.samples.shape[1]

    @property
    def width(self):
        return self.samples.shape[2]


@dataclass(frozen=True)
class AnalysisReport:
    """Per-block search results on a (grid_h, grid_w) grid."""
    grid_w: int
    grid_h: int
    verdicts: np.ndarray      # object array of Verdict
    iterations: np.ndarray    # int
    clipped: np.ndarray       # bool
    costs: np.ndarray         # float


class UnsolvedPolicy(enum.Enum):
    MANIPULATED = "manipulated"
    AUTHENTIC = "authentic"
    SEPARATE = "separate"


@dataclass(frozen=True)
class Mask:
    manipulated: np.ndarray   # (grid_h, grid_w) bool
    tristate: np.ndarray      # object array of Verdict


def split_into_blocks(img: ImagePlane, crop: bool = False):
    """Row-major 8x8 blocks with their (x, y) grid coordinates.

    Dimensions must be multiples of 8 unless ``crop`` trims the remainder.
    """
    s = img.samples
    c, h, w = s.shape
    if h % 8 or w % 8:
        if not crop:
            raise ValueError(f"dimensions {w}x{h} are not multiples of 8 "
                             "(pass crop=True to trim)")
        s = s[:, :h - h % 8, :w - w % 8]
        c, h, w = s.shape
    gh, gw = h // 8, w // 8
    blocks = (s.reshape(c, gh, 8, gw, 8)
              .transpose(1, 3, 0, 2, 4)
              .reshape(gh * gw, c, 8, 8))
    coords = [(x, y) for y in range(gh) for x in range(gw)]
    return blocks, coords


_WORKER = {}


def _init_worker(p, cfg):
    _WORKER["p"] = p
    _WORKER["cfg"] = cfg


def _search_one(args):
    idx, block = args
    out = find_antecedent(block, _WORKER["p"], _WORKER["cfg"])
    return idx, out


def analyze_image(img: ImagePlane, p: Pipeline, cfg: SearchConfig,
                  workers: int = 1) -> AnalysisReport:
    """Run the antecedent search over every block of an observation."""
    if img.origin != p.output_domain:
        raise ValueError(f"observation domain {img.origin!r} does not match "
                         f"pipeline codomain {p.output_domain!r}")
    if img.samples.shape[0] != p.channels:
        raise ValueError("channel count mismatch between image and pipeline")
    blocks, coords = split_into_blocks(img)
    gh, gw = img.height // 8, img.width // 8
    n = len(blocks)

    verdicts = np.empty(n, dtype=object)
    iterations = np.zeros(n, dtype=np.int64)
    clipped_arr = np.zeros(n, dtype=bool)
    costs = np.zeros(n, dtype=np.float64)

    # vectorized first pass: does the rounded backward start already work?
    x_b, clipped = backward_start(p, blocks)
    x_s = round_half_away(x_b)
    if p.input_domain == PIXEL_DOMAIN:
        x_s = np.clip(x_s, 0, 255)
    hit = (run_forward(p, x_s) == blocks).all(axis=(1, 2, 3))
    verdicts[hit] = Verdict.COMPATIBLE
    clipped_arr[:] = clipped

    rest = np.flatnonzero(~hit)
    if len(rest):
        tasks = [(int(i), blocks[i]) for i in rest]
        if workers <= 1:
            _init_worker(p, cfg)
            results = map(_search_one, tasks)
        else:
            pool = ProcessPoolExecutor(max_workers=workers,
                                       initializer=_init_worker,
                                       initargs=(p, cfg))
            results = pool.map(_search_one, tasks,
                               chunksize=max(1, len(tasks) // (4 * workers)))
        for i, out in results:
            verdicts[i] = out.verdict
            iterations[i] = out.iterations_used
            clipped_arr[i] = out.clipped
            costs[i] = out.best_cost
        if workers > 1:
            pool.shutdown()

    return AnalysisReport(grid_w=gw, grid_h=gh,
                          verdicts=verdicts.reshape(gh, gw),
                          iterations=iterations.reshape(gh, gw),
                          clipped=clipped_arr.reshape(gh, gw),
                          costs=costs.reshape(gh, gw))


def build_mask(report: AnalysisReport,
               unsolved_policy: UnsolvedPolicy = UnsolvedPolicy.MANIPULATED
               ) -> Mask:
    """Collapse the tri-state report into a binary manipulation mask."""
    tri = report.verdicts.copy()
    manipulated = tri == Verdict.INCOMPATIBLE
    if unsolved_policy is UnsolvedPolicy.MANIPULATED:
        manipulated |= tri == Verdict.UNSOLVED
    return Mask(manipulated=manipulated, tristate=tri)
