"""Stage orchestration: directory-level pipeline stages, end-to-end runs,
and sensitivity sweeps.

Each stage maps an input directory to an output directory;
:func:`run` chains the stages through the same functions the stage
subcommands use, so running stages separately produces byte-identical
artifacts.  Frames are ordered lexicographically by filename (use
zero-padded numbering); ground-truth files pair with frames by sorted
position.

Spatial stages are pure per-frame work and can run on several worker
processes; serial and parallel runs produce identical artifacts.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import imagery, metrics, morphology, objects, temporal, thresholding
from .config import PipelineConfig
from .errors import ConfigError, DataError

__all__ = [
    "list_frames",
    "list_masks",
    "enhance_stage",
    "threshold_stage",
    "morph_stage",
    "temporal_stage",
    "evaluate_stage",
    "load_detection_sequence",
    "frame_matchings",
    "run",
    "sweep_lambda",
    "sweep_disk",
    "fmt",
]

_FRAME_SUFFIXES = (".pgm", ".png")


def fmt(value) -> str:
    """CSV cell: 6 significant digits, '.' decimal separator, '' if absent."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".6g")


def list_frames(directory) -> list[Path]:
    d = Path(directory)
    if not d.is_dir():
        raise FileNotFoundError(f"input directory not found: {d}")
    files = sorted(p for p in d.iterdir() if p.suffix.lower() in _FRAME_SUFFIXES)
    if not files:
        raise FileNotFoundError(f"no frames (*.pgm, *.png) in {d}")
    return files


def list_masks(directory) -> list[Path]:
    d = Path(directory)
    if not d.is_dir():
        raise FileNotFoundError(f"mask directory not found: {d}")
    files = sorted(d.glob("*.pgm"))
    if not files:
        raise FileNotFoundError(f"no masks (*.pgm) in {d}")
    return files


def _map_jobs(fn, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _check_uniform(shapes: Sequence[tuple[int, int]], what: str) -> tuple[int, int]:
    distinct = set(shapes)
    if len(distinct) > 1:
        raise DataError(f"{what}: mixed frame sizes {sorted(distinct)}")
    return shapes[0]


# ---------------------------------------------------------------------------
# Per-frame workers (top level so they pickle for process pools)
# ---------------------------------------------------------------------------


def _enhance_one(job) -> tuple[int, int]:
    src, dst = job
    img = imagery.load_frame(src)
    imagery.save_image(img, dst)
    return img.shape


def _threshold_one(job) -> tuple[int, int]:
    src, dst, cfg = job
    mask = thresholding.hysteresis_threshold(imagery.load_frame(src), cfg)
    imagery.save_mask(mask, dst)
    return mask.shape


def _morph_one(job) -> tuple[int, int]:
    src, dst, open_size, close_radius = job
    mask = imagery.load_mask(src)
    mask = morphology.open_mask(mask, morphology.make_square(open_size))
    mask = morphology.close_mask(mask, morphology.make_disk(close_radius))
    imagery.save_mask(mask, dst)
    return mask.shape


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def enhance_stage(in_dir, out_dir, workers: int = 1) -> list[tuple[int, int]]:
    """Normalize every frame to [0, 1] and write it as 8-bit PGM.

    This is the pass-through stand-in for an external saliency enhancer:
    downstream stages consume whatever normalized saliency images are in
    the input directory.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(src, out / (src.stem + ".pgm")) for src in list_frames(in_dir)]
    return _map_jobs(_enhance_one, jobs, workers)


def threshold_stage(
    in_dir, out_dir, cfg: thresholding.HysteresisConfig, workers: int = 1
) -> list[tuple[int, int]]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(src, out / (src.stem + ".pgm"), cfg) for src in list_frames(in_dir)]
    return _map_jobs(_threshold_one, jobs, workers)


def morph_stage(
    in_dir, out_dir, open_size: int, close_radius: int, workers: int = 1
) -> list[tuple[int, int]]:
    if open_size < 1:
        raise ValueError(f"opening size must be >= 1, got {open_size}")
    if close_radius < 1:
        raise ValueError(f"closing radius must be >= 1, got {close_radius}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(src, out / src.name, open_size, close_radius) for src in list_masks(in_dir)]
    return _map_jobs(_morph_one, jobs, workers)


def load_detection_sequence(mask_dir) -> list[objects.FrameDetections]:
    """Label every mask of a directory, in temporal (= filename) order."""
    frames = []
    shapes = []
    for index, path in enumerate(list_masks(mask_dir)):
        mask = imagery.load_mask(path)
        shapes.append(mask.shape)
        frames.append(objects.label_components(mask, frame_index=index))
    _check_uniform(shapes, str(mask_dir))
    return frames


def write_detections(path, frames: Sequence[objects.FrameDetections]) -> None:
    """One comma-separated line per object: frame, id, area, centroid
    (row, col), bbox (min_row, min_col, max_row, max_col)."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for frame in frames:
            for obj in frame.objects:
                fh.write(
                    f"{frame.frame_index},{obj.id},{obj.area},"
                    f"{fmt(obj.centroid[0])},{fmt(obj.centroid[1])},"
                    f"{obj.bbox[0]},{obj.bbox[1]},{obj.bbox[2]},{obj.bbox[3]}\n"
                )


def temporal_stage(
    in_dir, out_dir, cfg: temporal.TemporalConfig
) -> tuple[list[objects.FrameDetections], list[objects.FrameDetections]]:
    """Label the spatial masks, drop static detections, and write the
    surviving masks plus both detection listings.

    Writes one PGM per frame into *out_dir*, plus
    ``detections_pre_temporal.csv`` and ``detections_post_temporal.csv``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    mask_paths = list_masks(in_dir)
    pre = load_detection_sequence(in_dir)
    post = temporal.filter_static(pre, cfg)
    write_detections(out / "detections_pre_temporal.csv", pre)
    write_detections(out / "detections_post_temporal.csv", post)
    for path, frame in zip(mask_paths, post):
        imagery.save_mask(objects.detections_to_mask(frame), out / path.name)
    return pre, post


def _gt_for_masks(mask_paths: list[Path], gt_dir, shape) -> list[list[metrics.GroundTruthObject]]:
    d = Path(gt_dir)
    if not d.is_dir():
        raise FileNotFoundError(f"ground-truth directory not found: {d}")
    gt_paths = sorted(d.glob("*.txt"))
    if len(gt_paths) != len(mask_paths):
        raise DataError(
            f"{len(mask_paths)} frames but {len(gt_paths)} ground-truth files in {d}"
        )
    return [
        metrics.load_gt_file(p, frame_index=i, frame_shape=shape)
        for i, p in enumerate(gt_paths)
    ]


def frame_matchings(mask_dir, gt_dir) -> list[metrics.OverlapMatching]:
    """Greedy overlap matchings of every frame, independent of lambda."""
    detections = load_detection_sequence(mask_dir)
    shape = detections[0].shape
    gts = _gt_for_masks(list_masks(mask_dir), gt_dir, shape)
    return [
        metrics.match_overlaps(metrics.overlap_matrix(gt, det))
        for gt, det in zip(gts, detections)
    ]


def write_report_csv(path, report: metrics.MetricsReport) -> None:
    """Per-frame rows, then a count-pooled 'aggregate' row, then per-frame
    'mean' and 'ci95' rows."""
    names = metrics.MetricsReport.METRIC_NAMES
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("frame,tp,s,m,fn,fp," + ",".join(names) + "\n")

        def counts(t):
            return [t.tp, t.s, t.m, t.fn, t.fp]

        for index, tally in enumerate(report.frame_tallies):
            vals = report.metrics_of(tally)
            fh.write(
                ",".join([str(index)] + [fmt(c) for c in counts(tally)] + [fmt(vals[n]) for n in names])
                + "\n"
            )
        agg = report.aggregate
        vals = report.metrics_of(agg)
        fh.write(
            ",".join(["aggregate"] + [fmt(c) for c in counts(agg)] + [fmt(vals[n]) for n in names])
            + "\n"
        )
        count_series = list(zip(*(counts(t) for t in report.frame_tallies)))
        count_stats = [metrics.frame_statistics([float(v) for v in s]) for s in count_series]
        metric_stats = [report.mean_ci(n) for n in names]
        fh.write(
            ",".join(["mean"] + [fmt(m) for m, _ in count_stats] + [fmt(m) for m, _ in metric_stats])
            + "\n"
        )
        fh.write(
            ",".join(["ci95"] + [fmt(c) for _, c in count_stats] + [fmt(c) for _, c in metric_stats])
            + "\n"
        )


def evaluate_stage(
    mask_dir, gt_dir, out_csv, overlap_threshold: float, beta2: float = 0.3
) -> metrics.MetricsReport:
    """Score a directory of masks against ground truth and write the CSV."""
    matchings = frame_matchings(mask_dir, gt_dir)
    tallies = tuple(metrics.tally_at(m, overlap_threshold) for m in matchings)
    report = metrics.MetricsReport(frame_tallies=tallies, beta2=beta2)
    if out_csv is not None:
        write_report_csv(out_csv, report)
    return report


# ---------------------------------------------------------------------------
# End-to-end run and sweeps
# ---------------------------------------------------------------------------


def _require(cfg: PipelineConfig, *fields: str) -> None:
    missing = [f for f in fields if getattr(cfg, f) is None]
    if missing:
        raise ConfigError("missing required config keys: " + ", ".join(missing))


def run(cfg: PipelineConfig) -> dict[str, Path]:
    """Full pipeline: enhance, threshold, morphology, temporal filter,
    and (when a GT directory is configured) evaluation.

    Artifacts land under ``cfg.output_dir``:

    * ``enhanced/``   normalized saliency frames
    * ``threshold/``  post-threshold masks
    * ``morph/``      post-morphology masks
    * ``temporal/``   post-temporal masks + detection listings
    * ``metrics.csv`` evaluation of the post-temporal masks
    """
    _require(cfg, "input_dir", "output_dir")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: dict[str, Path] = {}

    shapes = enhance_stage(cfg.input_dir, out / "enhanced", cfg.workers)
    _check_uniform(shapes, cfg.input_dir)
    artifacts["enhanced"] = out / "enhanced"

    threshold_stage(out / "enhanced", out / "threshold", cfg.hysteresis(), cfg.workers)
    artifacts["threshold"] = out / "threshold"

    morph_stage(out / "threshold", out / "morph", cfg.open_size, cfg.close_radius, cfg.workers)
    artifacts["morph"] = out / "morph"

    temporal_stage(out / "morph", out / "temporal", cfg.temporal())
    artifacts["temporal"] = out / "temporal"
    artifacts["detections_pre"] = out / "temporal" / "detections_pre_temporal.csv"
    artifacts["detections_post"] = out / "temporal" / "detections_post_temporal.csv"

    if cfg.gt_dir is not None:
        evaluate_stage(
            out / "temporal", cfg.gt_dir, out / "metrics.csv", cfg.overlap_threshold, cfg.beta2
        )
        artifacts["metrics"] = out / "metrics.csv"
    return artifacts


def sweep_lambda(cfg: PipelineConfig, lambdas: Sequence[float]) -> list[tuple]:
    """Pooled precision/recall/F-scores of the finished pipeline under a
    range of overlap thresholds.

    The pipeline and the greedy matching run once; each lambda only
    re-tallies.  Rows are written to ``output_dir/sweep_lambda.csv`` in
    input order.
    """
    if len(lambdas) == 0:
        raise ValueError("empty lambda list")
    for lam in lambdas:
        if not 0.0 <= lam < 1.0:
            raise ValueError(f"lambda must be in [0, 1), got {lam}")
    _require(cfg, "input_dir", "gt_dir", "output_dir")
    run(cfg)
    out = Path(cfg.output_dir)
    matchings = frame_matchings(out / "temporal", cfg.gt_dir)
    rows = []
    for lam in lambdas:
        total = metrics.DetectionTally()
        for matching in matchings:
            total = total + metrics.tally_at(matching, lam)
        rows.append(
            (
                lam,
                metrics.precision(total),
                metrics.recall(total),
                metrics.f1(total),
                metrics.f_beta(total, cfg.beta2),
            )
        )
    with open(out / "sweep_lambda.csv", "w", encoding="ascii", newline="\n") as fh:
        fh.write("lambda,precision,recall,f1,f_beta\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return rows


def sweep_disk(cfg: PipelineConfig, radii: Sequence[int]) -> list[tuple]:
    """Pooled F-score of a full pipeline re-run per closing-disk radius.

    Each radius runs into ``output_dir/radius_<r>/``; rows are written to
    ``output_dir/sweep_disk.csv`` in input order.
    """
    if len(radii) == 0:
        raise ValueError("empty radius list")
    for radius in radii:
        if radius < 1:
            raise ValueError(f"disk radius must be >= 1, got {radius}")
    _require(cfg, "input_dir", "gt_dir", "output_dir")
    from dataclasses import replace

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for radius in radii:
        sub = replace(cfg, close_radius=radius, gt_dir=None, output_dir=str(out / f"radius_{radius}"))
        run(sub)
        report = evaluate_stage(
            Path(sub.output_dir) / "temporal",
            cfg.gt_dir,
            Path(sub.output_dir) / "metrics.csv",
            cfg.overlap_threshold,
            cfg.beta2,
        )
        rows.append((radius, metrics.f1(report.aggregate)))
    with open(out / "sweep_disk.csv", "w", encoding="ascii", newline="\n") as fh:
        fh.write("radius,f1\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return rows
