import json

import numpy as np
import pytest

from jpegcompat.cli import main
from jpegcompat.experiments import make_single_compressed
from jpegcompat.jpegio import write_raster

ANALYZE_YAML = """\
channels: 1
pipeline:
  - kind: decompress
    qf: 75
search:
  max_iterations: 100
"""


@pytest.fixture
def workdir(tmp_path):
    img, _ = make_single_compressed(9, 75, size=64)
    write_raster(img, tmp_path / "C.png")
    (tmp_path / "run.yaml").write_text(ANALYZE_YAML)
    return tmp_path


def test_analyze_report_schema(workdir, capsys):
    out = workdir / "out"
    rc = main(["analyze", str(workdir / "C.png"),
               "--config", str(workdir / "run.yaml"), "--out", str(out)])
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert report["schema_version"] == 1
    assert report["grid"] == {"w": 8, "h": 8}
    assert len(report["blocks"]) == 64
    b = report["blocks"][0]
    assert set(b) == {"x", "y", "verdict", "iterations", "clipped", "cost"}
    s = report["summary"]
    assert s["n_compatible"] + s["n_incompatible"] + s["n_unsolved"] == 64
    assert s["n_compatible"] == 64
    assert "wall_time_ms" in s
    assert report["config"]["pipeline"][0]["qf"] == 75
    assert (out / "mask_tristate.png").exists()
    assert (out / "mask_binary.png").exists()


def test_analyze_blocks_are_row_major(workdir):
    out = workdir / "out2"
    main(["analyze", str(workdir / "C.png"),
          "--config", str(workdir / "run.yaml"), "--out", str(out)])
    report = json.loads((out / "report.json").read_text())
    coords = [(b["x"], b["y"]) for b in report["blocks"]]
    assert coords == [(x, y) for y in range(8) for x in range(8)]


def test_config_error_exit_code(workdir):
    (workdir / "bad.yaml").write_text("pipeline: []\n")
    rc = main(["analyze", str(workdir / "C.png"),
               "--config", str(workdir / "bad.yaml"),
               "--out", str(workdir / "x")])
    assert rc == 2


def test_missing_input_exit_code(workdir):
    rc = main(["analyze", str(workdir / "nope.png"),
               "--config", str(workdir / "run.yaml"),
               "--out", str(workdir / "x")])
    assert rc == 3


def test_unsupported_format_exit_code(workdir):
    from PIL import Image
    p = workdir / "prog.jpg"
    Image.fromarray(np.zeros((16, 16), dtype=np.uint8)).save(
        p, progressive=True)
    rc = main(["analyze", str(p), "--config", str(workdir / "run.yaml"),
               "--out", str(workdir / "x")])
    assert rc == 4


def test_forge_then_analyze(workdir):
    (workdir / "forge.yaml").write_text(
        "channels: 1\n"
        "qf2: 90\n"
        "forgery:\n"
        "  kind: blur\n"
        "  region: {x: 16, y: 16, w: 24, h: 16}\n")
    fout = workdir / "forged"
    rc = main(["forge", str(workdir / "C.png"),
               "--config", str(workdir / "forge.yaml"), "--out", str(fout)])
    assert rc == 0
    for name in ("D.png", "truth_mask.png", "truth.json", "E.jpg", "F.png"):
        assert (fout / name).exists()
    # the doubly-compressed JPEG analyzed with the full declared chain
    (workdir / "chain.yaml").write_text(
        "channels: 1\n"
        "pipeline:\n"
        "  - {kind: decompress, qf: 75}\n"
        "  - {kind: compress, qf: 90}\n"
        "search: {max_iterations: 60}\n")
    aout = workdir / "a"
    rc = main(["analyze", str(fout / "E.jpg"),
               "--config", str(workdir / "chain.yaml"), "--out", str(aout)])
    assert rc == 0
    report = json.loads((aout / "report.json").read_text())
    truth = json.loads((fout / "truth.json").read_text())
    flagged = {(b["x"], b["y"]) for b in report["blocks"]
               if b["verdict"] != "compatible"}
    manip = {(x, y) for y, row in enumerate(truth["classes"])
             for x, c in enumerate(row) if c != "none"}
    assert manip and manip <= flagged
