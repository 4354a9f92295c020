"""Command-line interface.

Subcommands mirror the pipeline stages (gen-synth, enhance, threshold,
morph, temporal, evaluate), plus the end-to-end ``run`` and the two
sensitivity sweeps.  Every config key is exposed as a ``--key=value``
flag; precedence is flag > config file > profile default.

Exit codes: 0 success, 1 usage/config error, 2 I/O error, 3 inconsistent
input data.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import pipeline, synth
from .config import CONFIG_KEYS, load_config, parse_config_file
from .errors import ConfigError, DataError, ImageFormatError

__all__ = ["main", "entrypoint"]


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _parse_float_list(raw: str) -> list[float]:
    try:
        return [float(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of numbers, got {raw!r}") from None


def _parse_int_list(raw: str) -> list[int]:
    try:
        return [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of integers, got {raw!r}") from None


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="FILE", default=None, help="flat key=value config file")
    for key in CONFIG_KEYS:
        common.add_argument(f"--{key}", metavar="VALUE", dest=key, default=None)

    parser = _Parser(prog="aerialdet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-synth", help="render a synthetic scene with ground truth")
    p.add_argument("scene", help="scene description file (key=value)")
    p.add_argument("out", help="output directory (frames/, gt/, metadata.txt)")

    for name, help_text in [
        ("enhance", "normalize frames to [0,1] saliency PGMs (pass-through enhancer)"),
        ("threshold", "hysteresis-threshold saliency frames into masks"),
        ("morph", "morphological opening + closing of masks"),
        ("temporal", "drop static detections; write masks and detection listings"),
        ("evaluate", "score masks against ground truth into metrics.csv"),
        ("run", "full pipeline: enhance, threshold, morph, temporal, evaluate"),
    ]:
        sub.add_parser(name, parents=[common], help=help_text)

    p = sub.add_parser("sweep-lambda", parents=[common], help="metrics vs overlap threshold")
    p.add_argument("--lambdas", required=True, metavar="L0,L1,...", help="overlap thresholds")

    p = sub.add_parser("sweep-disk", parents=[common], help="F-score vs closing-disk radius")
    p.add_argument("--radii", required=True, metavar="R0,R1,...", help="closing-disk radii")

    return parser


def _config_from_args(args) -> "pipeline.PipelineConfig":
    values = vars(args)
    file_values = parse_config_file(values["config"]) if values.get("config") else {}
    flag_values = {k: values[k] for k in CONFIG_KEYS if values.get(k) is not None}
    return load_config(file_values, flag_values)


def _dispatch(args) -> None:
    if args.command == "gen-synth":
        spec = synth.parse_scene_file(args.scene)
        frames_dir, gt_dir = synth.render_to_dir(spec, args.out)
        print(f"frames: {frames_dir}")
        print(f"gt: {gt_dir}")
        return

    cfg = _config_from_args(args)
    if args.command == "enhance":
        _require(cfg, "input_dir", "output_dir")
        pipeline.enhance_stage(cfg.input_dir, cfg.output_dir, cfg.workers)
        print(f"enhanced frames: {cfg.output_dir}")
    elif args.command == "threshold":
        _require(cfg, "input_dir", "output_dir")
        pipeline.threshold_stage(cfg.input_dir, cfg.output_dir, cfg.hysteresis(), cfg.workers)
        print(f"threshold masks: {cfg.output_dir}")
    elif args.command == "morph":
        _require(cfg, "input_dir", "output_dir")
        pipeline.morph_stage(cfg.input_dir, cfg.output_dir, cfg.open_size, cfg.close_radius, cfg.workers)
        print(f"morphology masks: {cfg.output_dir}")
    elif args.command == "temporal":
        _require(cfg, "input_dir", "output_dir")
        pipeline.temporal_stage(cfg.input_dir, cfg.output_dir, cfg.temporal())
        print(f"temporal masks and detections: {cfg.output_dir}")
    elif args.command == "evaluate":
        _require(cfg, "input_dir", "gt_dir", "output_dir")
        Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
        out_csv = Path(cfg.output_dir) / "metrics.csv"
        pipeline.evaluate_stage(cfg.input_dir, cfg.gt_dir, out_csv, cfg.overlap_threshold, cfg.beta2)
        print(f"metrics: {out_csv}")
    elif args.command == "run":
        artifacts = pipeline.run(cfg)
        for name, path in artifacts.items():
            print(f"{name}: {path}")
    elif args.command == "sweep-lambda":
        pipeline.sweep_lambda(cfg, _parse_float_list(args.lambdas))
        print(f"sweep: {Path(cfg.output_dir) / 'sweep_lambda.csv'}")
    elif args.command == "sweep-disk":
        pipeline.sweep_disk(cfg, _parse_int_list(args.radii))
        print(f"sweep: {Path(cfg.output_dir) / 'sweep_disk.csv'}")
    else:  # pragma: no cover - argparse enforces the command set
        raise ConfigError(f"unknown command {args.command!r}")


def _require(cfg, *fields: str) -> None:
    missing = [f for f in fields if getattr(cfg, f) is None]
    if missing:
        raise ConfigError(
            "missing required config keys: "
            + ", ".join(missing)
            + " (pass --<key>=<value> or a --config file)"
        )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse --help exits 0, usage errors 1
        return int(exc.code or 0)
    try:
        _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ImageFormatError as exc:
        print(f"image error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


def entrypoint() -> None:
    sys.exit(main())
