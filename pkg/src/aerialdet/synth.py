"""Synthetic registered aerial scenes with exact ground truth.

A scene is a fixed-size frame sequence containing bright rectangular
vehicles that translate by an integer velocity every frame, static
clutter blobs that appear identically in every frame (registered scenery,
exactly what the temporal filter must discard), a uniform background,
and optional bounded uniform noise.  Rendering is deterministic for a
fixed seed: frame k draws its noise from a PCG64 generator seeded with
SeedSequence([seed, k]), so frames can be rendered independently and in
parallel.

Ground truth lists the vehicle rectangles only; clutter is deliberately
unlisted so it scores as a false positive for any detector that keeps it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .imagery import write_pgm

__all__ = [
    "VehicleSpec",
    "ClutterSpec",
    "SceneSpec",
    "render",
    "render_to_dir",
    "parse_scene_file",
    "write_scene_file",
    "random_scene",
]

RNG_ALGORITHM = "numpy-pcg64/seedseq(seed,frame)"


@dataclass(frozen=True)
class VehicleSpec:
    """A moving rectangle: position is (row + t*vel_row, col + t*vel_col)."""

    row: int
    col: int
    height: int
    width: int
    vel_row: int
    vel_col: int
    intensity: float

    def rect_at(self, t: int) -> tuple[int, int, int, int]:
        return (self.row + t * self.vel_row, self.col + t * self.vel_col, self.height, self.width)


@dataclass(frozen=True)
class ClutterSpec:
    """A static rectangle rendered identically in every frame."""

    row: int
    col: int
    height: int
    width: int
    intensity: float


@dataclass(frozen=True)
class SceneSpec:
    height: int
    width: int
    n_frames: int
    background: float
    noise_amplitude: float
    seed: int
    vehicles: tuple[VehicleSpec, ...] = field(default_factory=tuple)
    clutter: tuple[ClutterSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.height < 1 or self.width < 1 or self.n_frames < 1:
            raise ConfigError("scene dimensions and frame count must be positive")
        if not 0.0 <= self.background < 1.0:
            raise ConfigError(f"background intensity must be in [0, 1), got {self.background}")
        if self.noise_amplitude < 0.0:
            raise ConfigError(f"noise amplitude must be >= 0, got {self.noise_amplitude}")
        for v in self.vehicles:
            if not v.intensity > self.background:
                raise ConfigError(
                    f"vehicle intensity {v.intensity} must exceed background {self.background}"
                )
            for t in range(self.n_frames):
                self._check_rect(v.rect_at(t), f"vehicle at frame {t}")
        for c in self.clutter:
            self._check_rect((c.row, c.col, c.height, c.width), "clutter")

    def _check_rect(self, rect, what: str) -> None:
        r0, c0, h, w = rect
        if h < 1 or w < 1 or r0 < 0 or c0 < 0 or r0 + h > self.height or c0 + w > self.width:
            raise ConfigError(f"{what}: rectangle {rect} outside {self.height}x{self.width} frame")

    def gt_rects(self, t: int) -> list[tuple[int, int, int, int]]:
        return [v.rect_at(t) for v in self.vehicles]


def _render_frame(spec: SceneSpec, t: int) -> np.ndarray:
    img = np.full((spec.height, spec.width), spec.background, dtype=np.float64)
    for c in spec.clutter:
        img[c.row : c.row + c.height, c.col : c.col + c.width] = c.intensity
    for v in spec.vehicles:
        r0, c0, h, w = v.rect_at(t)
        img[r0 : r0 + h, c0 : c0 + w] = v.intensity
    if spec.noise_amplitude > 0.0:
        rng = np.random.default_rng(np.random.SeedSequence([spec.seed, t]))
        img += rng.uniform(-spec.noise_amplitude, spec.noise_amplitude, size=img.shape)
        np.clip(img, 0.0, 1.0, out=img)
    return img


def render(spec: SceneSpec) -> tuple[list[np.ndarray], list[list[tuple[int, int, int, int]]]]:
    """Render all frames plus the per-frame GT rectangle lists."""
    frames = [_render_frame(spec, t) for t in range(spec.n_frames)]
    return frames, [spec.gt_rects(t) for t in range(spec.n_frames)]


def render_to_dir(spec: SceneSpec, out_dir) -> tuple[Path, Path]:
    """Write frames/<frame_KKKK.pgm>, gt/<gt_KKKK.txt> and scene metadata.

    Frames are quantized to 8-bit PGM; filenames are zero-padded so that
    lexicographic order is temporal order.  Returns (frames dir, gt dir).
    """
    out = Path(out_dir)
    frames_dir = out / "frames"
    gt_dir = out / "gt"
    frames_dir.mkdir(parents=True, exist_ok=True)
    gt_dir.mkdir(parents=True, exist_ok=True)
    for t in range(spec.n_frames):
        img = _render_frame(spec, t)
        write_pgm(np.rint(img * 255.0).astype(np.uint8), frames_dir / f"frame_{t:04d}.pgm")
        with open(gt_dir / f"gt_{t:04d}.txt", "w", encoding="ascii", newline="\n") as fh:
            for rect in spec.gt_rects(t):
                fh.write("{},{},{},{}\n".format(*rect))
    with open(out / "metadata.txt", "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"rng={RNG_ALGORITHM}\n")
        fh.write(f"seed={spec.seed}\n")
        fh.write(f"frames={spec.n_frames}\n")
        fh.write(f"height={spec.height}\nwidth={spec.width}\n")
        fh.write(f"noise={spec.noise_amplitude!r}\n")
    return frames_dir, gt_dir


# ---------------------------------------------------------------------------
# Flat key=value scene files
# ---------------------------------------------------------------------------


def parse_scene_file(path) -> SceneSpec:
    """Parse a flat key=value scene description.

    Scalar keys: height, width, frames, background, noise, seed.
    Repeatable keys: ``vehicle=row,col,height,width,vel_row,vel_col,intensity``
    and ``clutter=row,col,height,width,intensity``.  Blank lines and
    '#' comments are ignored.
    """
    scalars: dict[str, str] = {}
    vehicles: list[VehicleSpec] = []
    clutter: list[ClutterSpec] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            try:
                if key == "vehicle":
                    f = value.split(",")
                    vehicles.append(
                        VehicleSpec(int(f[0]), int(f[1]), int(f[2]), int(f[3]), int(f[4]), int(f[5]), float(f[6]))
                    )
                elif key == "clutter":
                    f = value.split(",")
                    clutter.append(ClutterSpec(int(f[0]), int(f[1]), int(f[2]), int(f[3]), float(f[4])))
                elif key in ("height", "width", "frames", "seed"):
                    scalars[key] = value
                elif key in ("background", "noise"):
                    scalars[key] = value
                else:
                    raise ConfigError(f"{path}:{lineno}: unknown scene key {key!r}")
            except (ValueError, IndexError):
                raise ConfigError(f"{path}:{lineno}: malformed value for {key!r}") from None
    try:
        return SceneSpec(
            height=int(scalars["height"]),
            width=int(scalars["width"]),
            n_frames=int(scalars["frames"]),
            background=float(scalars.get("background", "0.2")),
            noise_amplitude=float(scalars.get("noise", "0.0")),
            seed=int(scalars.get("seed", "0")),
            vehicles=tuple(vehicles),
            clutter=tuple(clutter),
        )
    except KeyError as missing:
        raise ConfigError(f"{path}: missing required scene key {missing}") from None
    except ValueError:
        raise ConfigError(f"{path}: malformed scalar scene value") from None


def write_scene_file(spec: SceneSpec, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"height={spec.height}\nwidth={spec.width}\nframes={spec.n_frames}\n")
        fh.write(f"background={spec.background!r}\nnoise={spec.noise_amplitude!r}\n")
        fh.write(f"seed={spec.seed}\n")
        for v in spec.vehicles:
            fh.write(
                f"vehicle={v.row},{v.col},{v.height},{v.width},{v.vel_row},{v.vel_col},{v.intensity!r}\n"
            )
        for c in spec.clutter:
            fh.write(f"clutter={c.row},{c.col},{c.height},{c.width},{c.intensity!r}\n")


# ---------------------------------------------------------------------------
# Randomized benchmark scenes
# ---------------------------------------------------------------------------


def random_scene(
    seed: int,
    n_vehicles: int = 5,
    n_clutter: int = 10,
    n_frames: int = 10,
    noise_amplitude: float = 0.15,
    height: int = 144,
    width: int = 192,
) -> SceneSpec:
    """A laid-out random scene for benchmarking and tests.

    Vehicles drive in separate horizontal lanes in the upper part of the
    frame (one lane each, speeds >= 4 px/frame, alternating direction);
    clutter blobs sit on a jittered grid in the lower part.  Bands are
    spaced so that objects never touch or merge under a small closing.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xBEEF]))
    lane_pitch = 12
    if n_vehicles * lane_pitch + 8 > height // 2:
        raise ConfigError("frame too small for the requested vehicle lanes")
    vehicles = []
    for k in range(n_vehicles):
        vh = int(rng.integers(4, 7))
        vw = int(rng.integers(6, 10))
        speed = int(rng.integers(4, 7))
        row = 4 + k * lane_pitch + int(rng.integers(0, max(1, lane_pitch - vh - 4)))
        travel = speed * (n_frames - 1)
        rightward = k % 2 == 0
        if rightward:
            col = int(rng.integers(2, max(3, width - vw - travel - 2)))
            vel = (0, speed)
        else:
            col = int(rng.integers(min(width - vw - 3, 2 + travel), width - vw - 1))
            vel = (0, -speed)
        vehicles.append(VehicleSpec(row, col, vh, vw, vel[0], vel[1], 0.9))
    clutter_top = 8 + n_vehicles * lane_pitch
    cols_per_row = max(1, (width - 8) // 18)
    clutter = []
    for k in range(n_clutter):
        gr, gc = divmod(k, cols_per_row)
        ch = int(rng.integers(5, 8))
        cw = int(rng.integers(5, 8))
        row = clutter_top + gr * 14 + int(rng.integers(0, 3))
        col = 4 + gc * 18 + int(rng.integers(0, 3))
        if row + ch > height or col + cw > width:
            raise ConfigError("frame too small for the requested clutter grid")
        clutter.append(ClutterSpec(row, col, ch, cw, 0.8))
    return SceneSpec(
        height=height,
        width=width,
        n_frames=n_frames,
        background=0.2,
        noise_amplitude=noise_amplitude,
        seed=seed,
        vehicles=tuple(vehicles),
        clutter=tuple(clutter),
    )
