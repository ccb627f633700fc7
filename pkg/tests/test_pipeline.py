import numpy as np
import pytest

from jpegcompat.codec import ColorImpl, DctImpl
from jpegcompat.pipeline import (COEF_DOMAIN, PIXEL_DOMAIN, Pipeline, Stage,
                                 StageKind, backward_start, make_pipeline,
                                 pipeline_bound, run_backward, run_forward)
from jpegcompat.quant import quant_table_from_qf


def stage(kind, qf=75, channels=1, dct_impl=DctImpl.INTEGER_SLOW):
    return Stage(kind, quant_table_from_qf(qf, channels), dct_impl,
                 ColorImpl.INTEGER_LIB, channels)


def test_alternation_enforced():
    d = stage(StageKind.DECOMPRESS)
    c = stage(StageKind.COMPRESS)
    make_pipeline([d, c, stage(StageKind.DECOMPRESS, 90)])  # ok
    with pytest.raises(ValueError):
        make_pipeline([d, d])
    with pytest.raises(ValueError):
        make_pipeline([c, c])
    with pytest.raises(ValueError):
        make_pipeline([])


def test_channel_agreement_enforced():
    with pytest.raises(ValueError):
        make_pipeline([stage(StageKind.DECOMPRESS, channels=1),
                       stage(StageKind.COMPRESS, channels=3)])


def test_table_entries_validated():
    bad = np.zeros((1, 8, 8), dtype=np.int64)
    with pytest.raises(ValueError):
        Stage(StageKind.COMPRESS, bad, DctImpl.INTEGER_SLOW,
              ColorImpl.INTEGER_LIB, 1)


def test_domains():
    p = make_pipeline([stage(StageKind.DECOMPRESS)])
    assert p.input_domain == COEF_DOMAIN
    assert p.output_domain == PIXEL_DOMAIN
    p2 = make_pipeline([stage(StageKind.COMPRESS),
                        stage(StageKind.DECOMPRESS)])
    assert p2.input_domain == PIXEL_DOMAIN
    assert p2.output_domain == PIXEL_DOMAIN


def test_input_metric_weight():
    d = stage(StageKind.DECOMPRESS, qf=60)
    p = make_pipeline([d])
    assert np.array_equal(p.input_metric_weight(), d.table)
    p2 = make_pipeline([stage(StageKind.COMPRESS)])
    assert np.all(p2.input_metric_weight() == 1)


def test_run_forward_single_decompress_matches_codec():
    from jpegcompat.codec import decompress_blocks
    rng = np.random.default_rng(0)
    coefs = rng.integers(-20, 21, size=(40, 1, 8, 8)).astype(np.int64)
    coefs[..., 0, 0] += 40
    d = stage(StageKind.DECOMPRESS)
    got = run_forward(make_pipeline([d]), coefs)
    ref = decompress_blocks(coefs, d.table, d.dct_impl, d.color_impl)
    assert np.array_equal(got, ref)


def in_pipeline_blocks(p, seed=0, n=60):
    """Blocks guaranteed to be in the image of the forward map."""
    rng = np.random.default_rng(seed)
    src = rng.integers(20, 236, size=(n, p.channels, 8, 8)).astype(np.int64)
    if p.input_domain == COEF_DOMAIN:
        c = stage(StageKind.COMPRESS, channels=p.channels)
        src = run_forward(make_pipeline([c]), src)
    return run_forward(p, src), src


def test_backward_is_near_inverse():
    # for observations produced by the chain, the exact backward pass must
    # land within the pipeline bound of the true antecedent
    for stages in ([stage(StageKind.DECOMPRESS)],
                   [stage(StageKind.COMPRESS)],
                   [stage(StageKind.DECOMPRESS),
                    stage(StageKind.COMPRESS, 90)]):
        p = make_pipeline(stages)
        obs, src = in_pipeline_blocks(p)
        x_b, clipped = backward_start(p, obs)
        w = p.input_metric_weight().astype(np.float64)
        d = np.linalg.norm(((src - x_b) * w).reshape(len(src), -1), axis=1)
        m = pipeline_bound(p)
        assert np.all(d[~clipped] <= m)


def test_backward_start_flags_saturated_observation():
    d = stage(StageKind.DECOMPRESS)
    p = make_pipeline([d])
    coefs = np.zeros((1, 1, 8, 8), dtype=np.int64)
    coefs[0, 0, 0, 0] = 200  # drives pixels to 255
    obs = run_forward(p, coefs)
    assert obs.max() == 255
    _, clipped = backward_start(p, obs)
    assert clipped[0]
    mid = np.zeros((1, 1, 8, 8), dtype=np.int64)
    _, clipped2 = backward_start(p, run_forward(p, mid))
    assert not clipped2[0]


def test_gray_bound_values():
    # single decompression: coefficient metric, half-step of 1 per cell -> 4
    p = make_pipeline([stage(StageKind.DECOMPRESS, qf=60)])
    assert pipeline_bound(p) == pytest.approx(4.0)
    # single compression: pixel metric, half a quant step per coefficient
    c = stage(StageKind.COMPRESS, qf=75)
    q = c.table.astype(np.float64)
    assert pipeline_bound(make_pipeline([c])) == pytest.approx(
        np.linalg.norm(q / 2))


def test_bound_grows_with_chain_length():
    d1 = stage(StageKind.DECOMPRESS, qf=60)
    c2 = stage(StageKind.COMPRESS, qf=90)
    d2 = stage(StageKind.DECOMPRESS, qf=90)
    m1 = pipeline_bound(make_pipeline([d1]))
    m3 = pipeline_bound(make_pipeline([d1, c2, d2]))
    assert m3 > m1


def test_run_backward_returns_floats():
    p = make_pipeline([stage(StageKind.DECOMPRESS)])
    obs, _ = in_pipeline_blocks(p, seed=3, n=4)
    x_b = run_backward(p, obs)
    assert x_b.dtype == np.float64
    assert x_b.shape == obs.shape
