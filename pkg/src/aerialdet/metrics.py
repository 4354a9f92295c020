"""Detection scoring against rectangular ground truth.

Every (GT object, detection) pair gets a Jaccard overlap of its pixel
sets.  Detections are then classified into five classes:

* TP — the detection greedily matched to a GT object with overlap above
  the threshold lambda (largest overlaps match first, each GT and each
  detection at most once).
* FN — a GT object left without a TP.
* Split — a positive-overlap touch (GT, det) whose detection is nobody's
  TP: extra fragments on a GT object.
* Merge — a positive-overlap touch whose detection is the TP of some
  other GT object: one detection spanning several GT objects.
* FP — a detection that touches no GT object at all.

There are no true negatives in this scheme, so TN = 0 throughout.  The
greedy matching itself does not depend on lambda, which makes sweeping
lambda over a fixed detection set cheap: match once, re-tally per value.

Derived metrics: precision TP/(TP+FP), recall TP/(TP+FN), the weighted
harmonic mean F_beta with weight beta^2 (beta = 1 gives the plain
F-score), and the percentage of wrong classifications
PWC = 100 (FP+FN) / (TP+FN+FP+TN).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DataError
from .objects import FrameDetections

__all__ = [
    "GroundTruthObject",
    "DetectionTally",
    "OverlapMatching",
    "MetricsReport",
    "load_gt_file",
    "overlap_matrix",
    "match_overlaps",
    "tally_at",
    "classify_detections",
    "precision",
    "recall",
    "f1",
    "f_beta",
    "pwc",
    "frame_statistics",
]


@dataclass(frozen=True)
class GroundTruthObject:
    """A manually segmented vehicle: a filled rectangle of pixels."""

    frame_index: int
    rect: tuple[int, int, int, int]  # min_row, min_col, height, width
    pixels: frozenset[tuple[int, int]]

    @classmethod
    def from_rect(
        cls, frame_index: int, rect: tuple[int, int, int, int], frame_shape: tuple[int, int]
    ) -> "GroundTruthObject":
        r0, c0, h, w = rect
        if h < 1 or w < 1:
            raise DataError(f"GT rectangle must be at least 1x1, got {rect}")
        if r0 < 0 or c0 < 0 or r0 + h > frame_shape[0] or c0 + w > frame_shape[1]:
            raise DataError(f"GT rectangle {rect} outside {frame_shape[0]}x{frame_shape[1]} frame")
        pixels = frozenset((r, c) for r in range(r0, r0 + h) for c in range(c0, c0 + w))
        return cls(frame_index=frame_index, rect=tuple(rect), pixels=pixels)


def load_gt_file(path, frame_index: int, frame_shape: tuple[int, int]) -> list[GroundTruthObject]:
    """Read one frame's GT file: one 'min_row,min_col,height,width' line
    per vehicle; a blank file means no vehicles."""
    objects = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 comma-separated integers")
            try:
                rect = tuple(int(p) for p in parts)
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer GT field") from None
            objects.append(GroundTruthObject.from_rect(frame_index, rect, frame_shape))
    return objects


@dataclass(frozen=True)
class DetectionTally:
    """Per-frame or pooled detection counts; tn is identically zero."""

    tp: int = 0
    s: int = 0
    m: int = 0
    fn: int = 0
    fp: int = 0
    tn: int = 0

    def __add__(self, other: "DetectionTally") -> "DetectionTally":
        return DetectionTally(
            tp=self.tp + other.tp,
            s=self.s + other.s,
            m=self.m + other.m,
            fn=self.fn + other.fn,
            fp=self.fp + other.fp,
        )


def overlap_matrix(gts: Sequence[GroundTruthObject], detections: FrameDetections) -> np.ndarray:
    """Jaccard overlap of every GT pixel set against every detection.

    Row i, column j holds |GT_i n det_j| / |GT_i u det_j|; all positive
    overlaps are recorded, however small.
    """
    mat = np.zeros((len(gts), len(detections.objects)), dtype=np.float64)
    for i, gt in enumerate(gts):
        for j, obj in enumerate(detections.objects):
            inter = len(gt.pixels & obj.pixels)
            if inter:
                mat[i, j] = inter / (len(gt.pixels) + obj.area - inter)
    return mat


@dataclass(frozen=True)
class OverlapMatching:
    """Greedy max-overlap matching, independent of the lambda threshold.

    ``pairs`` holds (gt index, det index, overlap) for every matched
    pair; ``touches`` every positive matrix entry.  Re-tallying for a
    new lambda only re-tests the matched pairs.
    """

    n_gt: int
    n_det: int
    pairs: tuple[tuple[int, int, float], ...]
    touches: tuple[tuple[int, int, float], ...]

    @property
    def untouched_detections(self) -> int:
        touched = {j for _, j, _ in self.touches}
        return self.n_det - len(touched)


def match_overlaps(ovlp: np.ndarray) -> OverlapMatching:
    """Greedily pair GT objects and detections by descending overlap.

    Ties break toward the lower GT index, then the lower detection
    index, so the matching is deterministic.
    """
    ovlp = np.asarray(ovlp, dtype=np.float64)
    n_gt, n_det = ovlp.shape
    touches = [
        (i, j, float(ovlp[i, j])) for i in range(n_gt) for j in range(n_det) if ovlp[i, j] > 0.0
    ]
    order = sorted(touches, key=lambda t: (-t[2], t[0], t[1]))
    gt_taken = [False] * n_gt
    det_taken = [False] * n_det
    pairs = []
    for i, j, v in order:
        if not gt_taken[i] and not det_taken[j]:
            gt_taken[i] = True
            det_taken[j] = True
            pairs.append((i, j, v))
    return OverlapMatching(
        n_gt=n_gt, n_det=n_det, pairs=tuple(pairs), touches=tuple(touches)
    )


def tally_at(matching: OverlapMatching, overlap_threshold: float) -> DetectionTally:
    """Classify a cached matching at one overlap threshold."""
    if not 0.0 <= overlap_threshold < 1.0:
        raise ValueError(f"overlap threshold must be in [0, 1), got {overlap_threshold}")
    tp_det = {j: i for i, j, v in matching.pairs if v > overlap_threshold}
    tp = len(tp_det)
    splits = 0
    merges = 0
    for i, j, _ in matching.touches:
        if j in tp_det:
            if tp_det[j] != i:
                merges += 1
        else:
            splits += 1
    return DetectionTally(
        tp=tp,
        s=splits,
        m=merges,
        fn=matching.n_gt - tp,
        fp=matching.untouched_detections,
    )


def classify_detections(ovlp: np.ndarray, overlap_threshold: float) -> DetectionTally:
    """Five-class tally of one frame's overlap matrix."""
    return tally_at(match_overlaps(ovlp), overlap_threshold)


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def precision(t: DetectionTally) -> Optional[float]:
    return t.tp / (t.tp + t.fp) if t.tp + t.fp > 0 else None


def recall(t: DetectionTally) -> Optional[float]:
    return t.tp / (t.tp + t.fn) if t.tp + t.fn > 0 else None


def f1(t: DetectionTally) -> Optional[float]:
    """Harmonic mean of precision and recall: 2 TP / (2 TP + FP + FN)."""
    if t.tp + t.fp == 0 or t.tp + t.fn == 0:
        return None
    return 2 * t.tp / (2 * t.tp + t.fp + t.fn)


def f_beta(t: DetectionTally, beta2: float = 0.3) -> Optional[float]:
    """Weighted harmonic mean of precision and recall with weight beta^2."""
    if beta2 < 0:
        raise ValueError(f"beta2 must be >= 0, got {beta2}")
    p, r = precision(t), recall(t)
    if p is None or r is None:
        return None
    denom = beta2 * p + r
    if denom == 0.0:
        return 0.0
    return (1 + beta2) * p * r / denom


def pwc(t: DetectionTally) -> Optional[float]:
    """Percentage of wrong classifications: 100 (FP+FN) / (TP+FN+FP+TN)."""
    denom = t.tp + t.fn + t.fp + t.tn
    if denom == 0:
        return None
    return 100.0 * (t.fp + t.fn) / denom


def frame_statistics(values: Sequence[Optional[float]]) -> tuple[Optional[float], Optional[float]]:
    """Sample mean and 95% CI half-width (1.96 s / sqrt(n), normal
    approximation) of a per-frame metric series.

    Frames where the metric is undefined are excluded.  With fewer than
    two defined values the CI is absent; with none, so is the mean.
    """
    defined = [v for v in values if v is not None]
    if not defined:
        return None, None
    mean = sum(defined) / len(defined)
    if len(defined) < 2:
        return mean, None
    var = sum((v - mean) ** 2 for v in defined) / (len(defined) - 1)
    return mean, 1.96 * math.sqrt(var) / math.sqrt(len(defined))


@dataclass(frozen=True)
class MetricsReport:
    """Per-frame tallies plus both aggregation flavors.

    Count-pooled metrics (computed from the summed tally) and per-frame
    means with a 95% CI answer different questions, so both are exposed
    and reports carry both, clearly labeled.
    """

    frame_tallies: tuple[DetectionTally, ...]
    beta2: float = 0.3

    METRIC_NAMES = ("precision", "recall", "f1", "f_beta", "pwc")

    @property
    def aggregate(self) -> DetectionTally:
        total = DetectionTally()
        for t in self.frame_tallies:
            total = total + t
        return total

    def metrics_of(self, t: DetectionTally) -> dict[str, Optional[float]]:
        return {
            "precision": precision(t),
            "recall": recall(t),
            "f1": f1(t),
            "f_beta": f_beta(t, self.beta2),
            "pwc": pwc(t),
        }

    def series(self, name: str) -> list[Optional[float]]:
        return [self.metrics_of(t)[name] for t in self.frame_tallies]

    def mean_ci(self, name: str) -> tuple[Optional[float], Optional[float]]:
        return frame_statistics(self.series(name))
