"""Image representation, linear normalization, and frame/mask file I/O.

Images are plain 2-D numpy arrays: a saliency image is float64 with
values in [0, 1] (row-major, height x width), a binary mask is bool with
True = foreground.  PGM (P2/P5, maxval <= 255) is the canonical on-disk
format because it round-trips bit-exactly without external dependencies;
8-bit grayscale PNG is accepted for input only.
"""

from __future__ import annotations

import numpy as np

from .errors import ImageFormatError, UnsupportedImageError

__all__ = [
    "normalize",
    "load_frame",
    "load_mask",
    "save_mask",
    "save_image",
    "read_pgm",
    "write_pgm",
    "as_saliency",
    "as_mask",
]


def as_saliency(img) -> np.ndarray:
    """Validate and return *img* as a float64 saliency image in [0, 1]."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"saliency image must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("saliency image contains non-finite values")
    lo, hi = float(arr.min()), float(arr.max())
    if lo < 0.0 or hi > 1.0:
        raise ValueError(f"saliency values must lie in [0, 1], got range [{lo}, {hi}]")
    return arr


def as_mask(mask) -> np.ndarray:
    """Validate and return *mask* as a 2-D bool array."""
    arr = np.asarray(mask)
    if arr.dtype != np.bool_:
        raise ValueError(f"mask must be a bool array, got dtype {arr.dtype}")
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"mask must be a non-empty 2-D array, got shape {arr.shape}")
    return arr


def normalize(raw) -> np.ndarray:
    """Linearly rescale *raw* so its intensity range becomes [0, 1].

    Output is (raw - min) / (max - min), pointwise.  A constant image maps
    to all zeros: a flat frame carries no detections, and zero is
    background under every threshold.
    """
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a non-empty 2-D image, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("image contains non-finite values")
    lo = arr.min()
    span = arr.max() - lo
    if span == 0.0:
        return np.zeros_like(arr)
    return (arr - lo) / span


# ---------------------------------------------------------------------------
# PGM codec (P2 ASCII / P5 binary, maxval 1..255)
# ---------------------------------------------------------------------------

_WHITESPACE = frozenset(b" \t\r\n\x0b\x0c")
_HASH = ord("#")


def _pgm_tokens(data: bytes, count: int, pos: int) -> tuple[list[int], int]:
    """Read *count* ASCII integer tokens starting at *pos*, skipping
    whitespace and '#' comments.  Returns (tokens, next position)."""
    tokens: list[int] = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and (data[pos] in _WHITESPACE or data[pos] == _HASH):
            if data[pos] == _HASH:
                nl = data.find(b"\n", pos)
                pos = n if nl < 0 else nl + 1
            else:
                pos += 1
        if pos >= n:
            raise ImageFormatError("truncated PGM data")
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != _HASH:
            pos += 1
        token = data[start:pos]
        try:
            tokens.append(int(token))
        except ValueError:
            raise ImageFormatError(f"invalid PGM header token {token!r}") from None
    return tokens, pos


def read_pgm(path) -> np.ndarray:
    """Read a P2 or P5 PGM file into a uint8 array of raw pixel values."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedImageError(f"{path}: not a P2/P5 PGM file (magic {magic!r})")
    (width, height, maxval), pos = _pgm_tokens(data, 3, 2)
    if width < 1 or height < 1:
        raise ImageFormatError(f"{path}: invalid PGM dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise UnsupportedImageError(f"{path}: unsupported PGM maxval {maxval} (8-bit only)")
    if magic == b"P5":
        pos += 1  # single whitespace byte separates header from raster
        body = data[pos : pos + width * height]
        if len(body) != width * height:
            raise ImageFormatError(f"{path}: truncated PGM body")
        pixels = np.frombuffer(body, dtype=np.uint8)
    else:
        values, _ = _pgm_tokens(data, width * height, pos)
        pixels = np.array(values, dtype=np.int64)
    if pixels.min() < 0 or pixels.max() > maxval:
        raise ImageFormatError(f"{path}: pixel value outside [0, {maxval}]")
    return pixels.astype(np.uint8).reshape(height, width)


def write_pgm(values: np.ndarray, path) -> None:
    """Write a uint8 array as a binary P5 PGM with maxval 255."""
    arr = np.ascontiguousarray(values, dtype=np.uint8)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a non-empty 2-D uint8 array, got shape {arr.shape}")
    height, width = arr.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(arr.tobytes())


# ---------------------------------------------------------------------------
# Frame / mask I/O
# ---------------------------------------------------------------------------


def _read_png(path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as img:
        if img.mode != "L":
            raise UnsupportedImageError(
                f"{path}: only 8-bit grayscale PNG is supported, got mode {img.mode!r}"
            )
        return np.asarray(img, dtype=np.uint8)


def load_frame(path) -> np.ndarray:
    """Load a grayscale frame (PGM P2/P5 or 8-bit grayscale PNG) and
    normalize it to [0, 1] per :func:`normalize`."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
    if magic.startswith(b"\x89PNG"):
        raw = _read_png(path)
    elif magic[:2] in (b"P2", b"P5"):
        raw = read_pgm(path)
    else:
        raise UnsupportedImageError(f"{path}: unrecognized image format")
    return normalize(raw)


def save_image(img: np.ndarray, path) -> None:
    """Quantize a [0, 1] saliency image to 8 bits and write it as P5 PGM."""
    arr = as_saliency(img)
    write_pgm(np.rint(arr * 255.0).astype(np.uint8), path)


def save_mask(mask: np.ndarray, path) -> None:
    """Write a binary mask as P5 PGM with background 0, foreground 255."""
    arr = as_mask(mask)
    write_pgm(np.where(arr, 255, 0).astype(np.uint8), path)


def load_mask(path) -> np.ndarray:
    """Read a PGM mask; any nonzero pixel is foreground."""
    return read_pgm(path) > 0
