#!/usr/bin/env python3
"""Benchmark the spatio-temporal pipeline against a plain threshold.

Renders a set of seeded synthetic scenes (moving vehicles + static
clutter + bounded noise), runs the full pipeline on each, and compares
false positives, true-positive retention and F-score against a baseline
that thresholds the normalized frames at a fixed 0.5 with no
post-processing.

Usage:
    python3 scripts/run_benchmark.py [--scenes N] [--seed S] [--out DIR]
"""

import argparse
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from aerialdet import pipeline, synth
from aerialdet.config import load_config
from aerialdet.imagery import load_frame
from aerialdet.metrics import (
    DetectionTally,
    classify_detections,
    f1,
    load_gt_file,
    overlap_matrix,
    pwc,
)
from aerialdet.objects import label_components


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenes", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1000)
    ap.add_argument("--noise", type=float, default=0.15)
    ap.add_argument("--out", default=None, help="keep artifacts here (default: temp dir)")
    args = ap.parse_args()

    workdir = Path(args.out) if args.out else Path(tempfile.mkdtemp(prefix="aerialdet_bench_"))
    workdir.mkdir(parents=True, exist_ok=True)
    print(f"artifacts: {workdir}")

    baseline = DetectionTally()
    final = DetectionTally()
    for k in range(args.scenes):
        spec = synth.random_scene(
            seed=args.seed + k, n_vehicles=5, n_clutter=10, n_frames=10,
            noise_amplitude=args.noise,
        )
        frames_dir, gt_dir = synth.render_to_dir(spec, workdir / f"scene_{k:02d}")
        cfg = load_config(
            flag_values={
                "input_dir": str(frames_dir),
                "gt_dir": str(gt_dir),
                "output_dir": str(workdir / f"out_{k:02d}"),
            }
        )
        artifacts = pipeline.run(cfg)
        report = pipeline.evaluate_stage(
            artifacts["temporal"], gt_dir, None, cfg.overlap_threshold, cfg.beta2
        )
        final = final + report.aggregate

        gt_files = sorted(gt_dir.glob("*.txt"))
        for i, frame_path in enumerate(sorted(frames_dir.glob("*.pgm"))):
            img = load_frame(frame_path)
            det = label_components(img > 0.5, frame_index=i)
            gts = load_gt_file(gt_files[i], i, img.shape)
            baseline = baseline + classify_detections(
                overlap_matrix(gts, det), cfg.overlap_threshold
            )
        print(f"scene {k:02d}: baseline fp={baseline.fp} -> pipeline fp={final.fp}")

    print()
    print(f"{'':14s}{'tp':>8s}{'s':>6s}{'m':>6s}{'fn':>8s}{'fp':>8s}{'f1':>10s}{'pwc':>10s}")
    for name, t in (("baseline", baseline), ("pipeline", final)):
        print(
            f"{name:14s}{t.tp:8d}{t.s:6d}{t.m:6d}{t.fn:8d}{t.fp:8d}"
            f"{f1(t) if f1(t) is not None else float('nan'):10.4f}"
            f"{pwc(t) if pwc(t) is not None else float('nan'):10.2f}"
        )
    if baseline.fp:
        print(f"\nfalse-positive reduction: {100 * (1 - final.fp / baseline.fp):.1f}%")
    if baseline.tp:
        print(f"true-positive retention:  {100 * final.tp / baseline.tp:.1f}%")
    return 0


if __name__ == "__main__":
    sys.exit(main())
