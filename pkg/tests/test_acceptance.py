"""Acceptance suite.

Each test implements one acceptance criterion at its stated tolerance and
prints one ``ACCEPTANCE <n> ...: PASS`` line (run with ``pytest -s`` to
see them live; they also appear in captured output).
"""

import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

import oracles
from aerialdet import pipeline, synth
from aerialdet.config import load_config
from aerialdet.imagery import load_frame
from aerialdet.metrics import (
    DetectionTally,
    GroundTruthObject,
    classify_detections,
    f1,
    load_gt_file,
    match_overlaps,
    overlap_matrix,
    pwc,
    tally_at,
)
from aerialdet.morphology import close_mask, dilate, erode, make_disk, make_square, open_mask
from aerialdet.objects import FrameDetections, DetectedObject, label_components
from aerialdet.thresholding import HysteresisConfig, hysteresis_threshold


def _report(number: int, name: str, elapsed: float, budget: float) -> None:
    print(f"ACCEPTANCE {number} {name}: PASS ({elapsed:.2f}s / budget {budget:.0f}s)")
    assert elapsed < budget, f"criterion {number} exceeded its runtime budget"


# -- 1 ----------------------------------------------------------------------


def test_criterion_1_pwc_reproduces_published_means():
    t0 = time.perf_counter()
    published = [
        ("SR", DetectionTally(tp=3322, fn=435, fp=228), 16.64),
        ("FT", DetectionTally(tp=3704, fn=125, fp=1405), 29.23),
        ("LPT", DetectionTally(tp=3552, fn=424, fp=180), 14.53),
        ("MMA", DetectionTally(tp=3026, fn=340, fp=823), 27.76),
    ]
    for name, tally, expected in published:
        value = pwc(tally)
        assert abs(value - expected) <= 0.01, f"{name}: pwc {value} vs {expected}"
    _report(1, "metric-formula reproduction", time.perf_counter() - t0, 1.0)


# -- 2 ----------------------------------------------------------------------


def test_criterion_2_hysteresis_oracle_equivalence():
    t0 = time.perf_counter()
    cfg = HysteresisConfig()
    rng = np.random.default_rng(0xA11CE)
    lattice = np.array([0.0, 1 / 8, 1 / 6, 1 / 2, 3 / 5, 5 / 8, 1.0])
    mismatches = 0
    for k in range(10000):
        img = rng.choice(lattice, size=(8, 8)) if k % 5 == 0 else rng.uniform(0, 1, (8, 8))
        ref = oracles.hysteresis_ref(img, cfg.hi, cfg.lo, cfg.nbhd_hi, cfg.nbhd_lo, cfg.sub_mean)
        if not np.array_equal(hysteresis_threshold(img, cfg), ref):
            mismatches += 1
    assert mismatches == 0
    _report(2, "thresholding oracle equivalence (10000 images)", time.perf_counter() - t0, 10.0)


# -- 3 ----------------------------------------------------------------------


def test_criterion_3_morphology_oracles_and_identities():
    t0 = time.perf_counter()
    ses = (make_square(2), make_disk(1))
    bits = np.arange(16)
    for code in range(1 << 16):  # every 4x4 mask
        mask = ((code >> bits) & 1).astype(bool).reshape(4, 4)
        for se in ses:
            assert np.array_equal(dilate(mask, se), oracles.dilate_ref(mask, se.offsets))
            assert np.array_equal(erode(mask, se), oracles.erode_ref(mask, se.offsets))
    rng = np.random.default_rng(0xD15C)
    for _ in range(1000):
        mask = rng.random((32, 32)) < rng.uniform(0.05, 0.95)
        for se in ses:
            opened = open_mask(mask, se)
            closed = close_mask(mask, se)
            assert np.array_equal(open_mask(opened, se), opened)  # idempotent
            assert np.array_equal(close_mask(closed, se), closed)
            assert not (opened & ~mask).any()  # open(m) <= m
            assert not (mask & ~closed).any()  # m <= close(m)
    _report(3, "morphology oracle equivalence + identities", time.perf_counter() - t0, 60.0)


# -- 4 ----------------------------------------------------------------------


def test_criterion_4_labeling_matches_flood_fill():
    t0 = time.perf_counter()
    rng = np.random.default_rng(0x1ABE1)
    for _ in range(1000):
        mask = rng.random((16, 16)) < rng.uniform(0.1, 0.9)
        ours = {obj.pixels for obj in label_components(mask).objects}
        assert ours == oracles.flood_components_ref(mask)
    _report(4, "component labeling vs flood fill (1000 masks)", time.perf_counter() - t0, 10.0)


# -- 5 ----------------------------------------------------------------------


def test_criterion_5_temporal_filter_clean_scene(tmp_path):
    t0 = time.perf_counter()
    spec = synth.random_scene(
        seed=505, n_vehicles=3, n_clutter=5, n_frames=20, noise_amplitude=0.0
    )
    assert all(abs(v.vel_col) >= 4 for v in spec.vehicles)
    frames_dir, gt_dir = synth.render_to_dir(spec, tmp_path / "scene")
    cfg = load_config(
        flag_values={
            "input_dir": str(frames_dir),
            "gt_dir": str(gt_dir),
            "output_dir": str(tmp_path / "out"),
        }
    )
    assert cfg.delta == 2.0
    artifacts = pipeline.run(cfg)
    post = pipeline.load_detection_sequence(artifacts["temporal"])
    for t, frame in enumerate(post):
        vehicle_rects = {
            frozenset(
                (r, c) for r in range(r0, r0 + h) for c in range(c0, c0 + w)
            )
            for r0, c0, h, w in spec.gt_rects(t)
        }
        detected = {obj.pixels for obj in frame.objects}
        assert detected == vehicle_rects, f"frame {t}: vehicles lost or clutter kept"
        assert len(frame.objects) == 3
    _report(5, "temporal filter: 100% static removal, 0% TP loss", time.perf_counter() - t0, 5.0)


# -- 6 / 7 / 8 ---------------------------------------------------------------


N_SCENES = 10
BENCH_SEED = 1000


def _run_benchmark(root: Path) -> dict:
    """Ten noisy scenes through the full pipeline plus the plain
    fixed-0.5-threshold baseline."""
    root.mkdir(parents=True, exist_ok=True)
    baseline = DetectionTally()
    final = DetectionTally()
    out_dirs = []
    for k in range(N_SCENES):
        spec = synth.random_scene(
            seed=BENCH_SEED + k, n_vehicles=5, n_clutter=10, n_frames=10, noise_amplitude=0.15
        )
        frames_dir, gt_dir = synth.render_to_dir(spec, root / f"scene_{k:02d}")
        cfg = load_config(
            flag_values={
                "input_dir": str(frames_dir),
                "gt_dir": str(gt_dir),
                "output_dir": str(root / f"out_{k:02d}"),
            }
        )
        artifacts = pipeline.run(cfg)
        out_dirs.append(Path(cfg.output_dir))
        report = pipeline.evaluate_stage(
            artifacts["temporal"], gt_dir, None, cfg.overlap_threshold, cfg.beta2
        )
        final = final + report.aggregate
        gt_files = sorted(gt_dir.glob("*.txt"))
        for i, frame_path in enumerate(sorted(frames_dir.glob("*.pgm"))):
            img = load_frame(frame_path)
            det = label_components(img > 0.5, frame_index=i)
            gts = load_gt_file(gt_files[i], i, img.shape)
            baseline = baseline + classify_detections(
                overlap_matrix(gts, det), cfg.overlap_threshold
            )
    return {"baseline": baseline, "final": final, "out_dirs": out_dirs, "root": root}


@pytest.fixture(scope="module")
def benchmark(tmp_path_factory):
    return _run_benchmark(tmp_path_factory.mktemp("bench") / "a")


def test_criterion_6_end_to_end_fp_reduction(benchmark):
    t0 = time.perf_counter()
    base, final = benchmark["baseline"], benchmark["final"]
    assert base.fp > 0
    fp_reduction = 1.0 - final.fp / base.fp
    tp_retention = final.tp / base.tp
    score = f1(final)
    assert fp_reduction >= 0.80, f"FP reduction {fp_reduction:.3f} < 0.80"
    assert tp_retention >= 0.90, f"TP retention {tp_retention:.3f} < 0.90"
    assert score >= 0.80, f"aggregate F1 {score:.3f} < 0.80"
    elapsed = time.perf_counter() - t0
    print(
        f"ACCEPTANCE 6 end-to-end FP reduction: PASS "
        f"(fp_reduction={fp_reduction:.3f}, tp_retention={tp_retention:.3f}, f1={score:.3f})"
    )
    assert elapsed < 120.0


def test_criterion_7_lambda_sweep_monotonicity(benchmark):
    t0 = time.perf_counter()
    lambdas = [k * 0.05 for k in range(11)]  # 0, 0.05, ..., 0.5

    def check(matchings):
        tallies = []
        for lam in lambdas:
            total = DetectionTally()
            for m in matchings:
                total = total + tally_at(m, lam)
            tallies.append(total)
        for a, b in zip(tallies, tallies[1:]):
            assert b.tp <= a.tp, "tp increased with lambda"
            assert b.fn >= a.fn, "fn decreased with lambda"
        return tallies

    # the pipeline's own detections on the first benchmark scene
    out0 = benchmark["out_dirs"][0]
    scene0 = benchmark["root"] / "scene_00"
    check(pipeline.frame_matchings(out0 / "temporal", scene0 / "gt"))

    # a crafted detection set with overlaps spread across (0, 1): GT
    # squares against copies shifted by 0..4 columns
    shape = (12, 60)
    gts, dets = [], []
    for k in range(5):
        base_col = 10 * k
        gts.append(GroundTruthObject.from_rect(0, (2, base_col, 4, 4), shape))
        dets.append(
            DetectedObject.from_pixels(
                k + 1, [(r, c + k) for r in range(2, 6) for c in range(base_col, base_col + 4)]
            )
        )
    matrix = overlap_matrix(gts, FrameDetections(0, shape, tuple(dets)))
    tallies = check([match_overlaps(matrix)])
    assert tallies[0].tp == 4 and tallies[-1].tp == 2  # overlaps 1, .6, .33, .14, 0
    _report(7, "lambda-sweep monotonicity", time.perf_counter() - t0, 30.0)


def test_criterion_8_benchmark_determinism(benchmark, tmp_path_factory):
    t0 = time.perf_counter()
    rerun = _run_benchmark(tmp_path_factory.mktemp("bench_rerun") / "b")
    assert rerun["baseline"] == benchmark["baseline"]
    assert rerun["final"] == benchmark["final"]
    compared = 0
    for dir_a, dir_b in zip(benchmark["out_dirs"], rerun["out_dirs"]):
        files_a = sorted(p for p in dir_a.rglob("*") if p.is_file())
        files_b = sorted(p for p in dir_b.rglob("*") if p.is_file())
        assert [p.relative_to(dir_a) for p in files_a] == [p.relative_to(dir_b) for p in files_b]
        for a, b in zip(files_a, files_b):
            assert a.read_bytes() == b.read_bytes(), f"{a.relative_to(dir_a)} differs"
            compared += 1
    assert compared > 0
    elapsed = time.perf_counter() - t0
    print(f"ACCEPTANCE 8 determinism: PASS ({compared} files byte-identical)")
    assert elapsed < 240.0
