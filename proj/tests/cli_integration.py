#!/usr/bin/env python3
# Copyright 2026 The chord-layout Authors
# SPDX-License-Identifier: Apache-2.0

"""End-to-end checks of the chord command line.

usage: cli_integration.py <path-to-chord> <data-dir>
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

CHORD = sys.argv[1]
DATA = Path(sys.argv[2])
failures = []


def run(*args, expect=0):
    p = subprocess.run([CHORD, *map(str, args)], capture_output=True, text=True)
    if p.returncode != expect:
        raise SystemExit(f"{args}: exit {p.returncode}, stderr:\n{p.stderr}")
    return p


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def load(path):
    with open(path) as f:
        return json.load(f)


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    # Round trip: toy scene -> layout PNG -> detections -> metrics.
    piou = []
    for seed in (3, 4, 6, 8):
        scene = tmp / f"toy{seed}.json"
        scene.write_text(run("--seed", seed, "gen-toy", "-n", 1, "-o", "-").stdout)
        run("rasterize", scene, "-o", tmp / f"toy{seed}")
        run("detect", tmp / f"toy{seed}_layout.png", "-o", tmp / f"det{seed}.json")
        dets = load(tmp / f"det{seed}.json")
        truth = load(scene)
        check(len(dets["furniture"]) == len(truth["furniture"]),
              f"seed {seed}: {len(dets['furniture'])} detections for {len(truth['furniture'])} objects")
        report = json.loads(run("metrics", tmp / f"det{seed}.json").stdout)
        piou.append(report["results"][0]["metrics"]["piou"])
    check(max(piou) <= 0.005, f"decoded toy layouts keep PIoU <= 0.005 (max {max(piou):.4f})")

    # Errors are JSON on stderr with the documented exit codes.
    p = run("validate", tmp / "missing.json", expect=2)
    check(json.loads(p.stderr.strip().splitlines()[-1])["error"]["code"] == "usage_error",
          "missing input is a usage error")
    (tmp / "broken.json").write_text("{")
    p = run("validate", tmp / "broken.json", expect=1)
    check(json.loads(p.stderr.strip().splitlines()[-1])["error"]["code"] == "parse_error",
          "malformed scene is a parse error")

    # A tiny checkpoint; the pipeline must equal the chained commands.
    ckpt = tmp / "tiny.ckpt"
    run("--seed", 1, "train", "--toy", 2, "--steps", 10, "--widths", "4,4,4", "--time-dim", 8,
        "--width", 32, "--height", 32, "--margin", 2, "--epochs", 2, "--batch", 2,
        "--loss-csv", "", "-o", ckpt)
    scene = DATA / "list1_scene.json"
    assets = DATA / "assets_demo.json"
    run("--seed", 5, "pipeline", "-m", ckpt, "-s", scene, "-a", assets, "--margin", 2,
        "-o", tmp / "pipe")

    run("rasterize", scene, "--width", 32, "--height", 32, "--margin", 2, "-o", tmp / "chain")
    run("--seed", 5, "sample", "-m", ckpt, tmp / "chain_floorplan.png", "-o", tmp / "chain_layout.png")
    run("detect", tmp / "chain_layout.png", "-o", tmp / "chain_det.json")
    run("graph", "-d", tmp / "chain_det.json", "-s", scene, "-a", assets, "-o", tmp / "chain_graph.json")

    check((tmp / "pipe_floorplan.png").read_bytes() == (tmp / "chain_floorplan.png").read_bytes(),
          "pipeline floor plan equals rasterize")
    check((tmp / "pipe_layout.png").read_bytes() == (tmp / "chain_layout.png").read_bytes(),
          "pipeline layout equals sample")
    check(load(tmp / "pipe_detections.json")["furniture"] == load(tmp / "chain_det.json")["furniture"],
          "pipeline detections equal detect")
    check(load(tmp / "pipe_graph.json")["house"] == load(tmp / "chain_graph.json")["house"],
          "pipeline graph equals graph")
    check((tmp / "pipe.svg").read_text().count("<svg") == 1, "pipeline writes an SVG")

    # Same seed, same bytes.
    run("--seed", 5, "sample", "-m", ckpt, tmp / "chain_floorplan.png", "-o", tmp / "again.png")
    check((tmp / "again.png").read_bytes() == (tmp / "chain_layout.png").read_bytes(),
          "sampling is reproducible for a fixed seed")

sys.exit(1 if failures else 0)
