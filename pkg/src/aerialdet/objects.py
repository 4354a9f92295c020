"""8-connected component labeling and per-object geometry.

Labeling uses a union-find (disjoint-set with path compression) over
horizontal foreground runs: runs in adjacent rows are unioned when their
column spans touch within one column, which is exactly 8-adjacency.
Labels are assigned densely, 1..n, in raster order of each component's
first pixel, so the labeling is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .imagery import as_mask

__all__ = ["DetectedObject", "FrameDetections", "label_components", "detections_to_mask"]


@dataclass(frozen=True)
class DetectedObject:
    """One 8-connected set of foreground pixels."""

    id: int
    pixels: frozenset[tuple[int, int]]
    area: int
    centroid: tuple[float, float]
    bbox: tuple[int, int, int, int]  # min_row, min_col, max_row, max_col

    @classmethod
    def from_pixels(cls, obj_id: int, pixels) -> "DetectedObject":
        pix = frozenset((int(r), int(c)) for r, c in pixels)
        if not pix:
            raise ValueError("detected object must contain at least one pixel")
        rows = [r for r, _ in pix]
        cols = [c for _, c in pix]
        return cls(
            id=obj_id,
            pixels=pix,
            area=len(pix),
            centroid=(sum(rows) / len(pix), sum(cols) / len(pix)),
            bbox=(min(rows), min(cols), max(rows), max(cols)),
        )


@dataclass(frozen=True)
class FrameDetections:
    """All detected objects of one frame, with the frame's pixel grid."""

    frame_index: int
    shape: tuple[int, int]
    objects: tuple[DetectedObject, ...] = field(default_factory=tuple)


def _row_runs(row: np.ndarray) -> list[tuple[int, int]]:
    """Maximal foreground runs of one mask row as (start, end) inclusive."""
    idx = np.flatnonzero(np.diff(np.concatenate(([False], row, [False])).astype(np.int8)))
    return [(int(idx[i]), int(idx[i + 1]) - 1) for i in range(0, len(idx), 2)]


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:  # path compression
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def label_components(mask: np.ndarray, frame_index: int = 0) -> FrameDetections:
    """Partition the foreground of *mask* into 8-connected objects."""
    mask = as_mask(mask)
    height, width = mask.shape

    runs: list[tuple[int, int, int]] = []  # (row, col_start, col_end)
    row_start: list[int] = []  # index of first run of each row
    for r in range(height):
        row_start.append(len(runs))
        if mask[r].any():
            runs.extend((r, c0, c1) for c0, c1 in _row_runs(mask[r]))
    row_start.append(len(runs))

    dsu = _DisjointSet(len(runs))
    for r in range(1, height):
        i, i_end = row_start[r - 1], row_start[r]
        j, j_end = row_start[r], row_start[r + 1]
        while i < i_end and j < j_end:
            _, a0, a1 = runs[i]
            _, b0, b1 = runs[j]
            # 8-connectivity: spans touching within one column connect
            if b0 <= a1 + 1 and a0 <= b1 + 1:
                dsu.union(i, j)
            if a1 <= b1:
                i += 1
            else:
                j += 1

    # Group pixels per root; roots first seen in raster order get labels 1..n.
    groups: dict[int, list[tuple[int, int]]] = {}
    for k, (r, c0, c1) in enumerate(runs):
        groups.setdefault(dsu.find(k), []).extend((r, c) for c in range(c0, c1 + 1))
    objects = tuple(
        DetectedObject.from_pixels(label, pix)
        for label, pix in enumerate(groups.values(), start=1)
    )
    return FrameDetections(frame_index=frame_index, shape=(height, width), objects=objects)


def detections_to_mask(frame: FrameDetections) -> np.ndarray:
    """Rebuild the binary mask whose foreground is the union of objects."""
    mask = np.zeros(frame.shape, dtype=bool)
    for obj in frame.objects:
        rows, cols = zip(*obj.pixels)
        mask[list(rows), list(cols)] = True
    return mask
