import numpy as np
import pytest

from jpegcompat.codec import ColorImpl, DctImpl
from jpegcompat.pipeline import (Stage, StageKind, make_pipeline,
                                 run_forward)
from jpegcompat.quant import quant_table_from_qf
from jpegcompat.search import (BoundMode, CostNorm, SearchConfig, Verdict,
                               find_antecedent, is_clipped, neighbors)


def stage(kind, qf=75, channels=1):
    return Stage(kind, quant_table_from_qf(qf, channels),
                 DctImpl.INTEGER_SLOW, ColorImpl.INTEGER_LIB, channels)


def decompress_pipeline(qf=75, channels=1):
    return make_pipeline([stage(StageKind.DECOMPRESS, qf, channels)])


def make_observation(p, seed=0, lo=40, hi=216):
    """Forward-map a random block so the observation is in-pipeline."""
    rng = np.random.default_rng(seed)
    px = rng.integers(lo, hi, size=(p.channels, 8, 8)).astype(np.int64)
    if p.input_domain == "coef":
        src = run_forward(make_pipeline([stage(StageKind.COMPRESS,
                                               channels=p.channels)]), px)
    else:
        src = px
    return run_forward(p, src), src


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(max_iterations=0)


def test_neighbor_count_unbounded():
    x = np.zeros((1, 8, 8), dtype=np.int64)
    out = neighbors(x, x.astype(float), np.inf, False)
    assert len(out) == 128
    # each neighbor differs from x in exactly one position by exactly 1
    diffs = [np.abs(n - x).sum() for n in out]
    assert all(d == 1 for d in diffs)


def test_neighbor_pixel_domain_respects_range():
    x = np.zeros((1, 8, 8), dtype=np.int64)  # all at the lower edge
    out = neighbors(x, x.astype(float), np.inf, False, pixel_domain=True)
    assert len(out) == 64  # only the +1 moves survive
    x2 = np.full((1, 8, 8), 255, dtype=np.int64)
    out2 = neighbors(x2, x2.astype(float), np.inf, False, pixel_domain=True)
    assert len(out2) == 64


def test_neighbor_radius_filter():
    x = np.zeros((1, 8, 8), dtype=np.int64)
    # centered at x itself, every +-1 move has distance exactly 1
    assert len(neighbors(x, x.astype(float), 1.0, False)) == 128
    assert len(neighbors(x, x.astype(float), 0.5, False)) == 0
    # a clipped observation disables the filter
    assert len(neighbors(x, x.astype(float), 0.5, True)) == 128


def test_weighted_radius_filter():
    x = np.zeros((1, 8, 8), dtype=np.int64)
    w = np.ones((1, 8, 8))
    w[0, 0, 0] = 10.0
    out = neighbors(x, x.astype(float), 2.0, False, weight=w)
    # the two moves touching the heavy position are filtered out
    assert len(out) == 126


def test_is_clipped():
    b = np.full((1, 8, 8), 100, dtype=np.int64)
    assert not is_clipped(b)
    b[0, 0, 0] = 255
    assert is_clipped(b)
    b[0, 0, 0] = 0
    assert is_clipped(b)


def test_in_pipeline_block_compatible_without_expansion():
    p = decompress_pipeline()
    obs, _ = make_observation(p, seed=1)
    out = find_antecedent(obs, p, SearchConfig(max_iterations=50))
    assert out.verdict is Verdict.COMPATIBLE
    assert out.iterations_used == 0
    assert np.array_equal(run_forward(p, out.antecedent), obs)


def test_compatible_antecedent_verifies():
    p = make_pipeline([stage(StageKind.DECOMPRESS, 60),
                       stage(StageKind.COMPRESS, 90),
                       stage(StageKind.DECOMPRESS, 90)])
    obs, _ = make_observation(p, seed=2)
    out = find_antecedent(obs, p, SearchConfig(max_iterations=500))
    assert out.verdict is Verdict.COMPATIBLE
    assert np.array_equal(run_forward(p, out.antecedent), obs)


def test_tampered_block_incompatible():
    # blur an in-pipeline block: at qf 50 the weighted ball is tiny and the
    # queue exhausts almost immediately
    p = decompress_pipeline(50)
    obs, _ = make_observation(p, seed=3)
    blurred = obs.copy().astype(np.float64)
    blurred[0, 2:6, 2:6] = blurred[0, 2:6, 2:6].mean()
    tampered = np.clip(np.round(blurred), 1, 254).astype(np.int64)
    out = find_antecedent(tampered, p, SearchConfig(max_iterations=2000))
    assert out.verdict is Verdict.INCOMPATIBLE
    assert out.antecedent is None


def test_bound_disabled_never_incompatible():
    p = decompress_pipeline(50)
    obs, _ = make_observation(p, seed=3)
    tampered = obs.copy()
    tampered[0, 4, 4] = min(254, tampered[0, 4, 4] + 30)
    cfg = SearchConfig(max_iterations=30, bound_mode=BoundMode.DISABLED)
    out = find_antecedent(tampered, p, cfg)
    assert out.verdict is not Verdict.INCOMPATIBLE


def test_clipped_block_never_incompatible():
    p = decompress_pipeline(50)
    rng = np.random.default_rng(4)
    tampered = rng.integers(0, 256, size=(1, 8, 8)).astype(np.int64)
    tampered[0, 0, 0] = 255
    out = find_antecedent(tampered, p, SearchConfig(max_iterations=25))
    assert out.clipped
    assert out.verdict in (Verdict.COMPATIBLE, Verdict.UNSOLVED)


def test_determinism():
    p = decompress_pipeline(75)
    obs, _ = make_observation(p, seed=5)
    tampered = obs.copy()
    tampered[0, 3, 3] = min(254, tampered[0, 3, 3] + 2)
    cfg = SearchConfig(max_iterations=200)
    a = find_antecedent(tampered, p, cfg)
    b = find_antecedent(tampered, p, cfg)
    assert a.verdict is b.verdict
    assert a.iterations_used == b.iterations_used
    assert a.visited_count == b.visited_count
    if a.antecedent is not None:
        assert np.array_equal(a.antecedent, b.antecedent)


def test_budget_monotone():
    # a larger budget can only refine Unsolved into a definite verdict
    p = decompress_pipeline(90)
    obs, _ = make_observation(p, seed=6)
    tampered = obs.copy()
    tampered[0, 1, 1] = min(254, tampered[0, 1, 1] + 1)
    small = find_antecedent(tampered, p, SearchConfig(max_iterations=2))
    big = find_antecedent(tampered, p, SearchConfig(max_iterations=3000))
    if small.verdict is not Verdict.UNSOLVED:
        assert big.verdict is small.verdict


def test_reachable_constant_block_compatible():
    # a constant block that a decompression can actually produce
    p = decompress_pipeline(60)
    coefs = np.zeros((1, 1, 8, 8), dtype=np.int64)
    coefs[0, 0, 0, 0] = 3
    obs = run_forward(p, coefs)[0]
    assert np.all(obs == obs.ravel()[0])  # DC-only block is constant
    out = find_antecedent(obs, p, SearchConfig(max_iterations=10))
    assert out.verdict is Verdict.COMPATIBLE


def test_linf_cost_norm_runs():
    p = decompress_pipeline(75)
    obs, _ = make_observation(p, seed=7)
    tampered = obs.copy()
    tampered[0, 5, 5] = min(254, tampered[0, 5, 5] + 1)
    cfg = SearchConfig(max_iterations=300, cost_norm=CostNorm.LINF)
    out = find_antecedent(tampered, p, cfg)
    assert out.verdict in tuple(Verdict)
