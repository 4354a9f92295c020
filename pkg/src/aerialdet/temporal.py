"""Removal of static false detections across adjacent registered frames.

A detection is discarded when the next frame contains a detection that
(a) overlaps it with IoU strictly above ``iou_threshold`` and (b) has a
centroid strictly closer than ``delta`` pixels: an object that stays put
from one registered frame to the next is scenery, not a vehicle.  Both
criteria must hold.  The final frame, which has no successor, is compared
against its predecessor with the same criteria.

Decisions for every frame are made against the *original* detections of
the neighbor frame and applied afterwards (single pass, no fixpoint), so
the result is deterministic and order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .objects import DetectedObject, FrameDetections

__all__ = ["TemporalConfig", "iou", "filter_static"]


@dataclass(frozen=True)
class TemporalConfig:
    """iou_threshold is a ratio in (0, 1]; delta is in pixels."""

    iou_threshold: float = 0.75
    delta: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.iou_threshold <= 1.0:
            raise ValueError(f"iou_threshold must be in (0, 1], got {self.iou_threshold}")
        if not self.delta > 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")


def iou(a: DetectedObject, b: DetectedObject) -> float:
    """Intersection over union of the two objects' pixel sets."""
    inter = len(a.pixels & b.pixels)
    if inter == 0:
        return 0.0
    return inter / (a.area + b.area - inter)


def _is_static(obj: DetectedObject, neighbor: FrameDetections, cfg: TemporalConfig) -> bool:
    for other in neighbor.objects:
        if iou(obj, other) > cfg.iou_threshold:
            dist = math.hypot(
                obj.centroid[0] - other.centroid[0], obj.centroid[1] - other.centroid[1]
            )
            if dist < cfg.delta:
                return True
    return False


def filter_static(
    sequence: Sequence[FrameDetections], cfg: TemporalConfig = TemporalConfig()
) -> list[FrameDetections]:
    """Drop static detections from every frame of an ordered sequence.

    A single-frame sequence passes through unchanged.  Surviving objects
    keep their pixels and are relabeled densely, 1..n, in their original
    order.
    """
    if len(sequence) == 0:
        raise ValueError("empty frame sequence")
    if len(sequence) == 1:
        return list(sequence)
    out = []
    last = len(sequence) - 1
    for t, frame in enumerate(sequence):
        neighbor = sequence[t + 1] if t < last else sequence[last - 1]
        survivors = [obj for obj in frame.objects if not _is_static(obj, neighbor, cfg)]
        out.append(
            FrameDetections(
                frame_index=frame.frame_index,
                shape=frame.shape,
                objects=tuple(
                    DetectedObject(
                        id=k,
                        pixels=obj.pixels,
                        area=obj.area,
                        centroid=obj.centroid,
                        bbox=obj.bbox,
                    )
                    for k, obj in enumerate(survivors, start=1)
                ),
            )
        )
    return out
