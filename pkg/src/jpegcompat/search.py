"""Bounded best-first search for a block antecedent.

Given an observed block and the pipeline that supposedly produced it, the
search starts from the rounded exact backward image of the observation and
explores +-1 moves, keeping candidates inside the l2 ball of radius
``pipeline_bound`` around the (unrounded) backward start.  Three outcomes:

* Compatible: a candidate maps forward exactly onto the observation;
* Incompatible: the ball is exhausted without a match — impossible for
  blocks genuinely produced by the pipeline, hence proof of manipulation;
* Unsolved: the iteration budget ran out first.

Clipped observations (any pixel at 0 or 255) void the rounding-error bound,
so for them the ball is the whole space and Incompatible is unreachable.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .codec import round_half_away
from .pipeline import (PIXEL_DOMAIN, Pipeline, backward_start,
                       pipeline_bound, run_forward)


class CostNorm(enum.Enum):
    L1 = "l1"
    LINF = "linf"


class BoundMode(enum.Enum):
    ENFORCED = "enforced"
    DISABLED = "disabled"


class Verdict(enum.Enum):
    COMPATIBLE = "compatible"
    INCOMPATIBLE = "incompatible"
    UNSOLVED = "unsolved"


@dataclass(frozen=True)
class SearchConfig:
    max_iterations: int = 5000
    cost_norm: CostNorm = CostNorm.L1
    bound_mode: BoundMode = BoundMode.ENFORCED

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class SearchOutcome:
    verdict: Verdict
    antecedent: Optional[np.ndarray]
    iterations_used: int
    clipped: bool
    visited_count: int
    best_cost: float


def is_clipped(block) -> bool:
    """True iff any sample sits at the range edge 0 or 255."""
    b = np.asarray(block)
    return bool(((b == 0) | (b == 255)).any())


def neighbors(x, x_b, m, observed_clipped, weight=None, pixel_domain=False):
    """All +-1 single-position moves of x within l2 distance m of x_b.

    ``weight`` is the per-position metric weight (quantization steps for
    coefficient-domain candidates); ``observed_clipped`` lifts the radius to
    infinity.  Pixel-domain candidates must stay within [0, 255].
    Returns an (k, c, 8, 8) array in a fixed deterministic order.
    """
    x = np.asarray(x, dtype=np.int64)
    n = x.size
    deltas = np.zeros((2 * n,) + x.shape, dtype=np.int64)
    flat = deltas.reshape(2 * n, n)
    idx = np.arange(n)
    flat[idx, idx] = 1
    flat[idx + n, idx] = -1
    cands = x[None] + deltas
    keep = np.ones(2 * n, dtype=bool)
    if pixel_domain:
        keep &= ((cands >= 0) & (cands <= 255)).all(axis=(1, 2, 3))
    if not observed_clipped:
        if weight is None:
            weight = np.ones(x.shape)
        d = np.linalg.norm(
            (weight[None] * (cands - x_b[None])).reshape(2 * n, -1), axis=1)
        keep &= d <= m
    return cands[keep]


def _costs(observed, fwd, norm):
    diff = np.abs(np.asarray(observed)[None] - fwd).reshape(len(fwd), -1)
    if norm is CostNorm.L1:
        return diff.sum(axis=1).astype(np.float64)
    return diff.max(axis=1).astype(np.float64)


def find_antecedent(observed, p: Pipeline, cfg: SearchConfig) -> SearchOutcome:
    """Best-first antecedent search for one observed block (c, 8, 8)."""
    observed = np.asarray(observed, dtype=np.int64)
    if observed.shape != (p.channels, 8, 8):
        raise ValueError(f"observed shape {observed.shape} does not match "
                         f"pipeline ({p.channels}, 8, 8) codomain")
    x_b, clipped = backward_start(p, observed)
    clipped = bool(clipped)
    pixel_domain = p.input_domain == PIXEL_DOMAIN
    x_s = round_half_away(x_b)
    if pixel_domain:
        x_s = np.clip(x_s, 0, 255)

    bound_off = clipped or cfg.bound_mode is BoundMode.DISABLED
    m = np.inf if bound_off else pipeline_bound(p)
    weight = p.input_metric_weight()

    fwd0 = run_forward(p, x_s)
    visited = {x_s.tobytes()}
    if np.array_equal(fwd0, observed):
        return SearchOutcome(Verdict.COMPATIBLE, x_s, 0, clipped, 1, 0.0)

    cost0 = float(_costs(observed, fwd0[None], cfg.cost_norm)[0])
    seq = 0
    heap = [(cost0, seq, x_s)]
    best_cost = cost0
    iterations = 0
    while heap and iterations < cfg.max_iterations:
        iterations += 1
        cost, _, x = heapq.heappop(heap)
        best_cost = min(best_cost, cost)
        cands = neighbors(x, x_b, m, bound_off, weight, pixel_domain)
        if len(cands) == 0:
            continue
        fresh = []
        for cand in cands:
            key = cand.tobytes()
            if key not in visited:
                visited.add(key)
                fresh.append(cand)
        if not fresh:
            continue
        fresh = np.stack(fresh)
        fwd = run_forward(p, fresh)
        hits = (fwd == observed[None]).all(axis=(1, 2, 3))
        if hits.any():
            ant = fresh[int(np.argmax(hits))]
            return SearchOutcome(Verdict.COMPATIBLE, ant, iterations, clipped,
                                 len(visited), 0.0)
        for cand, c in zip(fresh, _costs(observed, fwd, cfg.cost_norm)):
            seq += 1
            heapq.heappush(heap, (float(c), seq, cand))
    if heap:
        return SearchOutcome(Verdict.UNSOLVED, None, iterations, clipped,
                             len(visited), best_cost)
    if bound_off:
        # without the radius we cannot claim exhaustion
        return SearchOutcome(Verdict.UNSOLVED, None, iterations, clipped,
                             len(visited), best_cost)
    return SearchOutcome(Verdict.INCOMPATIBLE, None, iterations, clipped,
                         len(visited), best_cost)
