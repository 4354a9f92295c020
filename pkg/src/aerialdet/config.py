"""Pipeline configuration: dataset profiles, key=value files, overrides.

Every parameter is addressable by a dotted key (``threshold.hi``,
``morph.close_radius``, ...).  Values are resolved in precedence order
flag > config file > profile default.  The ``low_res`` profile closes
with a radius-1 disk, uses delta = 2 px and overlap threshold 0.1; the
``high_res`` profile uses radius 7, delta = 5 and 0.25.  The ``custom``
profile supplies no parameter defaults: every parameter key must then be
given explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError
from .thresholding import HysteresisConfig
from .temporal import TemporalConfig

__all__ = ["PipelineConfig", "load_config", "parse_config_file", "CONFIG_KEYS"]

_THRESHOLD_DEFAULTS = {
    "threshold.hi": 5 / 8,
    "threshold.lo": 1 / 8,
    "threshold.nbhd_hi": 3 / 5,
    "threshold.nbhd_lo": 1 / 6,
    "threshold.sub_mean": 1 / 2,
}

PROFILES = {
    "low_res": {
        **_THRESHOLD_DEFAULTS,
        "morph.open_size": 2,
        "morph.close_radius": 1,
        "temporal.iou_threshold": 0.75,
        "temporal.delta": 2.0,
        "eval.overlap_threshold": 0.1,
        "eval.beta2": 0.3,
    },
    "high_res": {
        **_THRESHOLD_DEFAULTS,
        "morph.open_size": 2,
        "morph.close_radius": 7,
        "temporal.iou_threshold": 0.75,
        "temporal.delta": 5.0,
        "eval.overlap_threshold": 0.25,
        "eval.beta2": 0.3,
    },
}

# key -> value parser; io keys are strings, everything else numeric
CONFIG_KEYS = {
    "profile": str,
    "input_dir": str,
    "gt_dir": str,
    "output_dir": str,
    "workers": int,
    "threshold.hi": float,
    "threshold.lo": float,
    "threshold.nbhd_hi": float,
    "threshold.nbhd_lo": float,
    "threshold.sub_mean": float,
    "morph.open_size": int,
    "morph.close_radius": int,
    "temporal.iou_threshold": float,
    "temporal.delta": float,
    "eval.overlap_threshold": float,
    "eval.beta2": float,
}

_PARAMETER_KEYS = [k for k in CONFIG_KEYS if "." in k]


@dataclass(frozen=True)
class PipelineConfig:
    profile: str
    input_dir: Optional[str]
    gt_dir: Optional[str]
    output_dir: Optional[str]
    workers: int
    hi: float
    lo: float
    nbhd_hi: float
    nbhd_lo: float
    sub_mean: float
    open_size: int
    close_radius: int
    iou_threshold: float
    delta: float
    overlap_threshold: float
    beta2: float

    def hysteresis(self) -> HysteresisConfig:
        try:
            return HysteresisConfig(
                hi=self.hi, lo=self.lo, nbhd_hi=self.nbhd_hi, nbhd_lo=self.nbhd_lo, sub_mean=self.sub_mean
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def temporal(self) -> TemporalConfig:
        try:
            return TemporalConfig(iou_threshold=self.iou_threshold, delta=self.delta)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def _parse_value(key: str, raw: str):
    parser = CONFIG_KEYS[key]
    try:
        return parser(raw)
    except ValueError:
        raise ConfigError(f"invalid value {raw!r} for key {key!r}") from None


def parse_config_file(path) -> dict:
    """Read a flat key=value config file ('#' comments, blank lines ok)."""
    values = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, raw = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _parse_value(key, raw)
    return values


def load_config(file_values: Optional[dict] = None, flag_values: Optional[dict] = None) -> PipelineConfig:
    """Merge profile defaults, config-file values and flag overrides.

    ``flag_values`` entries may be raw strings (from the command line) or
    already-typed values.
    """
    file_values = dict(file_values or {})
    flags = {}
    for key, raw in (flag_values or {}).items():
        if raw is None:
            continue
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        flags[key] = _parse_value(key, raw) if isinstance(raw, str) else raw

    merged = {**file_values, **flags}
    profile = merged.get("profile", "low_res")
    if profile in PROFILES:
        defaults = PROFILES[profile]
    elif profile == "custom":
        defaults = {}
        missing = [k for k in _PARAMETER_KEYS if k not in merged]
        if missing:
            raise ConfigError(
                "custom profile requires every parameter key; missing: " + ", ".join(missing)
            )
    else:
        raise ConfigError(f"unknown profile {profile!r} (low_res, high_res or custom)")

    def get(key, fallback=None):
        return merged.get(key, defaults.get(key, fallback))

    cfg = PipelineConfig(
        profile=profile,
        input_dir=get("input_dir"),
        gt_dir=get("gt_dir"),
        output_dir=get("output_dir"),
        workers=get("workers", 1),
        hi=get("threshold.hi"),
        lo=get("threshold.lo"),
        nbhd_hi=get("threshold.nbhd_hi"),
        nbhd_lo=get("threshold.nbhd_lo"),
        sub_mean=get("threshold.sub_mean"),
        open_size=get("morph.open_size"),
        close_radius=get("morph.close_radius"),
        iou_threshold=get("temporal.iou_threshold"),
        delta=get("temporal.delta"),
        overlap_threshold=get("eval.overlap_threshold"),
        beta2=get("eval.beta2"),
    )
    if cfg.workers < 1:
        raise ConfigError(f"workers must be >= 1, got {cfg.workers}")
    if cfg.open_size < 1:
        raise ConfigError(f"morph.open_size must be >= 1, got {cfg.open_size}")
    if cfg.close_radius < 1:
        raise ConfigError(f"morph.close_radius must be >= 1, got {cfg.close_radius}")
    if not 0.0 <= cfg.overlap_threshold < 1.0:
        raise ConfigError(f"eval.overlap_threshold must be in [0, 1), got {cfg.overlap_threshold}")
    if cfg.beta2 < 0.0:
        raise ConfigError(f"eval.beta2 must be >= 0, got {cfg.beta2}")
    cfg.hysteresis()  # validate threshold block eagerly
    cfg.temporal()
    return cfg
