"""Multi-neighborhood hysteresis thresholding.

A saliency image is converted to a foreground/background mask with a
two-level threshold whose undecided band is resolved by neighborhood
evidence: pixels above ``hi`` are foreground and pixels below ``lo`` are
background outright; a pixel in between is classified by the mean of its
3x3 neighborhood, and if that mean is itself inconclusive, by the means
over the axial (N/S/E/W) and diagonal neighbors.

Every rule is a strict comparison and monotone nondecreasing in the pixel
values, so the whole operator is monotone: brightening an image can only
grow the foreground.  Each output pixel depends only on the input values
in its 3x3 neighborhood; there is no iterative propagation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imagery import as_saliency

__all__ = ["HysteresisConfig", "neighborhood_mean", "hysteresis_threshold"]

# Neighbor offsets, center first then row-major.  The per-pixel and the
# vectorized mean accumulate values in exactly this order so both produce
# bit-identical IEEE sums.
_FULL8 = ((0, 0), (-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))
_PLUS4 = ((0, 0), (-1, 0), (0, -1), (0, 1), (1, 0))
_DIAG4 = ((0, 0), (-1, -1), (-1, 1), (1, -1), (1, 1))

_KINDS = {"full8": _FULL8, "plus4": _PLUS4, "diag4": _DIAG4}


@dataclass(frozen=True)
class HysteresisConfig:
    """Decision thresholds, all in [0, 1].

    The defaults suit bright vehicles on a darker background; datasets
    with different intensity or contrast can override any of them (for
    dark vehicles, invert via configuration rather than code).
    """

    hi: float = 5 / 8
    lo: float = 1 / 8
    nbhd_hi: float = 3 / 5
    nbhd_lo: float = 1 / 6
    sub_mean: float = 1 / 2

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi <= 1.0:
            raise ValueError(f"need 0 <= lo < hi <= 1, got lo={self.lo}, hi={self.hi}")
        if not 0.0 <= self.nbhd_lo < self.nbhd_hi <= 1.0:
            raise ValueError(
                f"need 0 <= nbhd_lo < nbhd_hi <= 1, got nbhd_lo={self.nbhd_lo}, nbhd_hi={self.nbhd_hi}"
            )
        if not 0.0 <= self.sub_mean <= 1.0:
            raise ValueError(f"need 0 <= sub_mean <= 1, got {self.sub_mean}")


def neighborhood_mean(img: np.ndarray, row: int, col: int, kind: str = "full8") -> float:
    """Mean of the pixel at (row, col) and its neighbors of the given kind.

    ``kind`` is one of ``"full8"`` (all 8 neighbors), ``"plus4"``
    (N/S/E/W) or ``"diag4"`` (diagonals).  Neighbors outside the image
    are excluded from both the sum and the count, so border pixels are
    averaged over their in-bounds neighborhood only.
    """
    img = np.asarray(img, dtype=np.float64)
    height, width = img.shape
    if not (0 <= row < height and 0 <= col < width):
        raise IndexError(f"pixel ({row}, {col}) outside {height}x{width} image")
    try:
        offsets = _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown neighborhood kind {kind!r}") from None
    total = 0.0
    count = 0
    for dr, dc in offsets:
        r, c = row + dr, col + dc
        if 0 <= r < height and 0 <= c < width:
            total += img[r, c]
            count += 1
    return total / count


def _mean_map(img: np.ndarray, offsets) -> np.ndarray:
    """Neighborhood mean of every pixel at once (out-of-bounds excluded)."""
    height, width = img.shape
    total = np.zeros((height, width), dtype=np.float64)
    count = np.zeros((height, width), dtype=np.float64)
    for dr, dc in offsets:
        dst_r = slice(max(0, -dr), height - max(0, dr))
        dst_c = slice(max(0, -dc), width - max(0, dc))
        src_r = slice(max(0, dr), height - max(0, -dr))
        src_c = slice(max(0, dc), width - max(0, -dc))
        total[dst_r, dst_c] += img[src_r, src_c]
        count[dst_r, dst_c] += 1.0
    return total / count


def hysteresis_threshold(img: np.ndarray, cfg: HysteresisConfig = HysteresisConfig()) -> np.ndarray:
    """Label every pixel of a saliency image as foreground or background.

    Per pixel with value v:

    * v > cfg.hi            -> foreground
    * v < cfg.lo            -> background
    * otherwise, with m8 the mean over the pixel and its 8 neighbors:
        - m8 > cfg.nbhd_hi  -> foreground
        - m8 < cfg.nbhd_lo  -> background
        - otherwise         -> foreground iff the mean over the pixel and
          its 4 axial neighbors exceeds cfg.sub_mean, or the mean over
          the pixel and its 4 diagonal neighbors does; else background.

    Values exactly equal to a threshold always fall through to the next
    rule (the in-between intervals are closed).
    """
    img = as_saliency(img)
    undecided = ~((img > cfg.hi) | (img < cfg.lo))
    out = img > cfg.hi
    if undecided.any():
        m8 = _mean_map(img, _FULL8)
        case3 = undecided & ~(m8 > cfg.nbhd_hi) & ~(m8 < cfg.nbhd_lo)
        out |= undecided & (m8 > cfg.nbhd_hi)
        if case3.any():
            m_plus = _mean_map(img, _PLUS4)
            m_diag = _mean_map(img, _DIAG4)
            out |= case3 & ((m_plus > cfg.sub_mean) | (m_diag > cfg.sub_mean))
    return out
