"""Binary morphology: erosion, dilation, opening, closing.

Structuring elements are explicit offset sets.  The pipeline uses a 2x2
square for opening (sieves out specks with no 2x2 all-foreground
placement) and a disk whose radius is a dataset parameter for closing
(bridges small gaps, smooths borders, fills holes).

Boundary conventions: erosion treats out-of-bounds as background, so
regions touching the border erode; dilation drops translated pixels that
leave the image.  Closing is evaluated on a background-padded canvas and
cropped back, which keeps it extensive (close(m) >= m) even at the
border; without the padding, the final erosion would eat foreground
pixels whose probes exit the image.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imagery import as_mask

__all__ = [
    "StructuringElement",
    "make_square",
    "make_disk",
    "dilate",
    "erode",
    "open_mask",
    "close_mask",
]


@dataclass(frozen=True)
class StructuringElement:
    """A binary footprint given as (row, col) offsets from the origin."""

    offsets: tuple[tuple[int, int], ...]
    shape: str

    def __post_init__(self):
        if not self.offsets:
            raise ValueError("structuring element footprint is empty")

    @property
    def extent(self) -> int:
        """Largest absolute offset along either axis."""
        return max(max(abs(dr), abs(dc)) for dr, dc in self.offsets)

    def reflected(self) -> "StructuringElement":
        offs = tuple(sorted((-dr, -dc) for dr, dc in self.offsets))
        return StructuringElement(offs, f"reflected({self.shape})")


def make_square(n: int) -> StructuringElement:
    """n x n square anchored at its top-left offset (0, 0).

    Even sizes have no central pixel, so the anchor is a convention; the
    dilation step compensates by translating with the same offsets, which
    keeps opening anti-extensive and closing extensive.
    """
    if n < 1:
        raise ValueError(f"square size must be >= 1, got {n}")
    offs = tuple((dr, dc) for dr in range(n) for dc in range(n))
    return StructuringElement(offs, f"square({n})")


def make_disk(radius: int) -> StructuringElement:
    """Disk of the given radius: all offsets with dr^2 + dc^2 <= radius^2.

    The footprint fits in a (2r+1) x (2r+1) box, so radius 1 is the 3x3
    disk (a plus shape) and radius 7 the 15x15 one.
    """
    if radius < 1:
        raise ValueError(f"disk radius must be >= 1, got {radius}")
    offs = tuple(
        (dr, dc)
        for dr in range(-radius, radius + 1)
        for dc in range(-radius, radius + 1)
        if dr * dr + dc * dc <= radius * radius
    )
    return StructuringElement(offs, f"disk({radius})")


def _shifted(mask: np.ndarray, dr: int, dc: int) -> np.ndarray:
    """Gather-shift: out[p] = mask[p + (dr, dc)], False outside the image."""
    height, width = mask.shape
    out = np.zeros_like(mask)
    dst_r = slice(max(0, -dr), height - max(0, dr))
    dst_c = slice(max(0, -dc), width - max(0, dc))
    src_r = slice(max(0, dr), height - max(0, -dr))
    src_c = slice(max(0, dc), width - max(0, -dc))
    out[dst_r, dst_c] = mask[src_r, src_c]
    return out


def dilate(mask: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Union of copies of the mask translated by each SE offset.

    Equivalently out[p] is foreground iff mask[p - o] is foreground for
    some offset o; translated pixels falling outside the image are
    dropped.
    """
    mask = as_mask(mask)
    out = np.zeros_like(mask)
    for dr, dc in se.offsets:
        out |= _shifted(mask, -dr, -dc)
    return out


def erode(mask: np.ndarray, se: StructuringElement) -> np.ndarray:
    """out[p] is foreground iff mask[p + o] is in bounds and foreground
    for every SE offset o."""
    mask = as_mask(mask)
    out = np.ones_like(mask)
    for dr, dc in se.offsets:
        out &= _shifted(mask, dr, dc)
    return out


def open_mask(mask: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Erosion followed by dilation; removes regions the SE cannot cover."""
    return dilate(erode(mask, se), se)


def close_mask(mask: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Dilation followed by erosion, computed on a background-padded
    canvas so border foreground survives; fills gaps the SE spans."""
    mask = as_mask(mask)
    pad = se.extent
    if pad == 0:  # SE is just the origin; closing is the identity
        return mask.copy()
    height, width = mask.shape
    canvas = np.zeros((height + 2 * pad, width + 2 * pad), dtype=bool)
    canvas[pad : pad + height, pad : pad + width] = mask
    closed = erode(dilate(canvas, se), se)
    return closed[pad : pad + height, pad : pad + width]
