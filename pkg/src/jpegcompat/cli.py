"""Command-line front end.

Subcommands:

* ``analyze``   — per-block verdicts + masks for a raster or JPEG input
* ``forge``     — generate a forgery (and optional recompression) with truth
* ``experiment``— (qf1, qf2) grid of forge/analyze/score runs
* ``bench``     — search throughput on a synthetic image

Configuration is a YAML document (see ``--help`` of each subcommand); every
report embeds the resolved config so runs are reproducible.  Exit codes:
0 success, 2 configuration error, 3 I/O error, 4 unsupported input format.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time

import numpy as np
import yaml

from . import experiments
from .codec import ColorImpl, DctImpl
from .forensics import (ImagePlane, UnsolvedPolicy, analyze_image,
                        build_mask)
from .jpegio import (UnsupportedFormat, encode_jpeg, parse_jpeg, read_raster,
                     write_binary_mask, write_mask, write_raster)
from .pipeline import (COEF_DOMAIN, PIXEL_DOMAIN, Stage, StageKind,
                       make_pipeline)
from .quant import quant_table_from_qf
from .scenarios import (Blur, CopyMove, ForgerySpec, GridShift, Rect, Splice,
                        forge, recompress_scenario)
from .search import BoundMode, CostNorm, SearchConfig, Verdict

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_FORMAT = 4


class ConfigError(Exception):
    pass


def _atomic_write(path, data: bytes):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_json(path, obj):
    _atomic_write(path, json.dumps(obj, indent=2).encode() + b"\n")


def _load_config(path):
    try:
        with open(path) as f:
            cfg = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {path}: {e}")
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return cfg


_DCT_NAMES = {"islow": DctImpl.INTEGER_SLOW, "float": DctImpl.FLOAT_FAST,
              "exact": DctImpl.EXACT_ORTHO}
_COLOR_NAMES = {"int": ColorImpl.INTEGER_LIB, "exact": ColorImpl.EXACT_MATRIX}


def _stage_from_config(entry, channels):
    if not isinstance(entry, dict) or "kind" not in entry:
        raise ConfigError(f"pipeline stage must be a mapping with 'kind': "
                          f"{entry!r}")
    kind = {"compress": StageKind.COMPRESS,
            "decompress": StageKind.DECOMPRESS}.get(entry["kind"])
    if kind is None:
        raise ConfigError(f"unknown stage kind {entry['kind']!r}")
    if "qf" in entry:
        table = quant_table_from_qf(int(entry["qf"]), channels)
    elif "table" in entry:
        flat = np.asarray(entry["table"], dtype=np.int64)
        if flat.size != 64 * channels:
            raise ConfigError(f"explicit table needs {64 * channels} "
                              f"entries, got {flat.size}")
        table = flat.reshape(channels, 8, 8)
    else:
        raise ConfigError("stage needs 'qf' or 'table'")
    dct_impl = _DCT_NAMES.get(entry.get("dct", "islow"))
    color_impl = _COLOR_NAMES.get(entry.get("color", "int"))
    if dct_impl is None or color_impl is None:
        raise ConfigError(f"unknown dct/color implementation in {entry!r}")
    return Stage(kind, table, dct_impl, color_impl, channels)


def _pipeline_from_config(cfg):
    channels = int(cfg.get("channels", 1))
    stages = cfg.get("pipeline")
    if not stages:
        raise ConfigError("config needs a non-empty 'pipeline' list")
    try:
        return make_pipeline([_stage_from_config(s, channels)
                              for s in stages])
    except ValueError as e:
        raise ConfigError(str(e))


def _search_from_config(cfg):
    s = cfg.get("search", {})
    try:
        norm = CostNorm(s.get("cost_norm", "l1"))
        bound = BoundMode(s.get("bound_mode", "enforced"))
        policy = UnsolvedPolicy(s.get("unsolved_policy", "manipulated"))
        sc = SearchConfig(max_iterations=int(s.get("max_iterations", 5000)),
                          cost_norm=norm, bound_mode=bound)
    except ValueError as e:
        raise ConfigError(f"bad search settings: {e}")
    return sc, policy


def _load_observation(path, input_type, channels):
    ext = os.path.splitext(path)[1].lower()
    if input_type == "auto":
        input_type = "jpeg" if ext in (".jpg", ".jpeg") else "raster"
    if input_type == "jpeg":
        with open(path, "rb") as f:
            model = parse_jpeg(f.read())
        c, gh, gw = model.coefs.shape[:3]
        raster = (model.coefs.transpose(0, 1, 3, 2, 4)
                  .reshape(c, gh * 8, gw * 8))
        return ImagePlane(raster, COEF_DOMAIN), model
    return read_raster(path), None


def _report_dict(report, config, wall_ms):
    blocks = []
    for y in range(report.grid_h):
        for x in range(report.grid_w):
            blocks.append({
                "x": x, "y": y,
                "verdict": report.verdicts[y, x].value,
                "iterations": int(report.iterations[y, x]),
                "clipped": bool(report.clipped[y, x]),
                "cost": float(report.costs[y, x]),
            })
    counts = {v: int((report.verdicts == v).sum()) for v in Verdict}
    return {
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "grid": {"w": report.grid_w, "h": report.grid_h},
        "blocks": blocks,
        "summary": {
            "n_compatible": counts[Verdict.COMPATIBLE],
            "n_incompatible": counts[Verdict.INCOMPATIBLE],
            "n_unsolved": counts[Verdict.UNSOLVED],
            "wall_time_ms": wall_ms,
        },
    }


def cmd_analyze(args):
    cfg = _load_config(args.config)
    p = _pipeline_from_config(cfg)
    search_cfg, policy = _search_from_config(cfg)
    workers = args.workers or int(cfg.get("workers", 1))
    img, _ = _load_observation(args.input, args.input_type, p.channels)
    t0 = time.time()
    try:
        report = analyze_image(img, p, search_cfg, workers)
    except ValueError as e:
        raise ConfigError(str(e))
    wall_ms = int((time.time() - t0) * 1000)
    os.makedirs(args.out, exist_ok=True)
    _atomic_json(os.path.join(args.out, "report.json"),
                 _report_dict(report, cfg, wall_ms))
    mask = build_mask(report, policy)
    write_mask(mask, os.path.join(args.out, "mask_tristate.png"))
    write_binary_mask(mask, os.path.join(args.out, "mask_binary.png"))
    s = _report_dict(report, cfg, wall_ms)["summary"]
    print(f"{report.grid_w}x{report.grid_h} blocks: "
          f"{s['n_compatible']} compatible, "
          f"{s['n_incompatible']} incompatible, "
          f"{s['n_unsolved']} unsolved ({wall_ms} ms)")
    return EXIT_OK


def _forgery_from_config(cfg, channels):
    f = cfg.get("forgery")
    if not isinstance(f, dict) or "kind" not in f:
        raise ConfigError("config needs a 'forgery' mapping with 'kind'")
    r = f.get("region")
    if not isinstance(r, dict):
        raise ConfigError("forgery needs a 'region' mapping x/y/w/h")
    try:
        region = Rect(int(r["x"]), int(r["y"]), int(r["w"]), int(r["h"]))
        kind_name = f["kind"]
        if kind_name == "blur":
            kind = Blur(radius=int(f.get("radius", 2)))
        elif kind_name == "shift":
            kind = GridShift(int(f["dx"]), int(f["dy"]))
        elif kind_name == "copymove":
            s = f["src"]
            kind = CopyMove(Rect(int(s["x"]), int(s["y"]), region.w,
                                 region.h),
                            region, aligned=bool(f.get("aligned", False)))
        elif kind_name == "splice":
            kind = Splice(
                donor_table=quant_table_from_qf(int(f["donor_qf"]), channels),
                donor_dct=_DCT_NAMES[f.get("donor_dct", "islow")],
                aligned=bool(f.get("aligned", False)))
        else:
            raise ConfigError(f"unknown forgery kind {kind_name!r}")
        return ForgerySpec(kind, region, seed=int(f.get("seed", 0)))
    except (KeyError, ValueError) as e:
        raise ConfigError(f"bad forgery spec: {e}")


def cmd_forge(args):
    cfg = _load_config(args.config)
    channels = int(cfg.get("channels", 1))
    img = read_raster(args.input)
    spec = _forgery_from_config(cfg, channels)
    try:
        forged, truth = forge(img, spec)
    except ValueError as e:
        raise ConfigError(str(e))
    os.makedirs(args.out, exist_ok=True)
    write_raster(forged, os.path.join(args.out, "D.png"))
    truth_px = np.kron(truth.manipulated.astype(np.uint8) * 255,
                       np.ones((8, 8), dtype=np.uint8))
    from PIL import Image
    Image.fromarray(truth_px, "L").save(
        os.path.join(args.out, "truth_mask.png"))
    sidecar = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "classes": [[c.value for c in row] for row in truth.classes],
    }
    q2 = cfg.get("qf2")
    if q2 is not None:
        table2 = quant_table_from_qf(int(q2), channels)
        img_e, img_f = recompress_scenario(forged, table2)
        c, h, w = img_e.samples.shape
        coefs = (img_e.samples.reshape(c, h // 8, 8, w // 8, 8)
                 .transpose(0, 1, 3, 2, 4))
        _atomic_write(os.path.join(args.out, "E.jpg"),
                      encode_jpeg(coefs, table2))
        write_raster(img_f, os.path.join(args.out, "F.png"))
    _atomic_json(os.path.join(args.out, "truth.json"), sidecar)
    print(f"forged {args.input}: {int(truth.manipulated.sum())} blocks "
          "manipulated")
    return EXIT_OK


def cmd_experiment(args):
    cfg = _load_config(args.config)
    qf1s = cfg.get("qf1", [60, 75, 90])
    qf2s = cfg.get("qf2")
    n_images = int(cfg.get("n_images", 20))
    n_iter = int(cfg.get("max_iterations", 5000))
    size = int(cfg.get("size", 256))
    seed = int(cfg.get("seed", 0))
    kind = cfg.get("forgery_kind", "blur")
    workers = args.workers or int(cfg.get("workers", 1))
    if n_images < 1:
        raise ConfigError("empty corpus: n_images must be >= 1")
    os.makedirs(args.out, exist_ok=True)
    if qf2s:
        cells = experiments.experiment_grid(
            n_images, qf1s, qf2s, n_iter, kind=kind, seed=seed, size=size,
            workers=workers)
        table = experiments.format_grid_table(cells)
    else:
        cells = [experiments.grid_mismatch_experiment(
            n_images, qf1, kind, n_iter, seed=seed, size=size,
            workers=workers) for qf1 in qf1s]
        table = "\n".join(f"qf1={c['qf1']}: ACC {100 * c['acc']:.2f} "
                          f"FPR {100 * c['fpr']:.2f}" for c in cells)
    _atomic_json(os.path.join(args.out, "cells.json"),
                 {"schema_version": SCHEMA_VERSION, "config": cfg,
                  "cells": cells})
    _atomic_write(os.path.join(args.out, "table.txt"),
                  table.encode() + b"\n")
    print(table)
    return EXIT_OK


def cmd_bench(args):
    from .experiments import authentic_experiment
    t0 = time.time()
    r = authentic_experiment(args.images, args.qf, args.iterations,
                             seed=args.seed, size=args.size)
    dt = time.time() - t0
    n = r["n_blocks"]
    print(f"{n} blocks in {dt:.2f}s ({n / dt:.0f} blocks/s), "
          f"{r['n_incompatible']} incompatible, "
          f"{r['nonclipped_compatible']}/{r['nonclipped']} non-clipped "
          "compatible")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="jpegcompat",
        description="Block-level JPEG compatibility forensics")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="per-block analysis of an image")
    a.add_argument("input", help="PNG raster or baseline JPEG")
    a.add_argument("--config", required=True, help="YAML run configuration")
    a.add_argument("--out", required=True, help="output directory")
    a.add_argument("--input-type", choices=("auto", "raster", "jpeg"),
                   default="auto")
    a.add_argument("--workers", type=int, default=0,
                   help="worker processes (default: config value or 1)")
    a.set_defaults(func=cmd_analyze)

    f = sub.add_parser("forge", help="generate a forgery with ground truth")
    f.add_argument("input", help="source PNG raster")
    f.add_argument("--config", required=True)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_forge)

    e = sub.add_parser("experiment", help="run a (qf1, qf2) metric grid")
    e.add_argument("--config", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--workers", type=int, default=0)
    e.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bench", help="search throughput benchmark")
    b.add_argument("--images", type=int, default=5)
    b.add_argument("--qf", type=int, default=75)
    b.add_argument("--iterations", type=int, default=2000)
    b.add_argument("--size", type=int, default=256)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except UnsupportedFormat as e:
        print(f"unsupported format: {e}", file=sys.stderr)
        return EXIT_FORMAT
    except FileNotFoundError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
