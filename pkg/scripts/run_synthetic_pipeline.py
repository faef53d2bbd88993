#!/usr/bin/env python3
"""Run the full pipeline on a generated dataset.

Generates a synthetic Car scenario, computes distance-binned score
statistics, fits the distance-adaptive threshold, filters the
detections with it, evaluates the raw, constant-threshold and adaptive
variants, and emits the delta table plus the threshold-curve report.
Everything is driven through the installed ``adathresh`` CLI, so this
doubles as an end-to-end smoke test of the command surface.

Usage:
    python3 scripts/run_synthetic_pipeline.py --out-dir runs/demo
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from adathresh.cli import main as adathresh_main

# Mid-range scenario: strong detector up close, noisy and fp-heavy far
# out, so a constant threshold has to sacrifice one end of the range.
SCENARIO = {
    "seed": 20250121,
    "n_frames": 200,
    "objects_per_frame": [2, 5],
    "distance_range": [2.0, 60.0],
    "score_model": {
        "a": -4e-05,
        "b": -0.0075,
        "c": 0.92,
        "noise_std": [0.01, 0.012, 0.015, 0.02, 0.035, 0.05],
    },
    "fp_rate_per_bin": [0.5, 0.4, 0.3, 0.2, 0.15, 0.1],
    "fn_rate_per_bin": [0.02, 0.03, 0.05, 0.08, 0.12, 0.18],
    "bin_spec": {"bin_width": 10.0, "max_distance": 60.0},
}


def run(argv: list[str]) -> None:
    code = adathresh_main(argv)
    if code != 0:
        raise SystemExit(f"adathresh {argv[0]} exited with {code}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="pipeline_out", help="directory for all outputs")
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument("--n-frames", type=int, help="override the scenario frame count")
    parser.add_argument(
        "--single", type=float, default=0.5, help="constant threshold to compare against (default 0.5)"
    )
    parser.add_argument("--iou-thr", type=float, default=0.7, help="matching IoU threshold (default 0.7)")
    args = parser.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    scenario = dict(SCENARIO)
    if args.seed is not None:
        scenario["seed"] = args.seed
    if args.n_frames is not None:
        scenario["n_frames"] = args.n_frames
    scenario_path = out / "scenario.json"
    scenario_path.write_text(json.dumps(scenario, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    data = out / "data"
    run(["synth", "--spec", str(scenario_path), "--out-dir", str(data)])

    stats_dir = out / "stats"
    run(
        [
            "stats",
            "--gt-dir", str(data / "gt"),
            "--det-dir", str(data / "det"),
            "--out-dir", str(stats_dir),
        ]
    )

    fit_dir = out / "fit"
    run(
        [
            "fit",
            "--gt-dir", str(data / "gt"),
            "--det-dir", str(data / "det"),
            "--out-dir", str(fit_dir),
            "--delta", "60",
            "--k", "continuity",
        ]
    )
    model_path = fit_dir / "model.json"

    filtered = out / "filtered"
    run(
        [
            "filter",
            "--det-dir", str(data / "det"),
            "--out-dir", str(filtered),
            "--threshold-mode", f"adaptive:{model_path}",
        ]
    )

    reports: dict[str, Path] = {}
    for name, mode in (
        ("raw", "none"),
        ("single", f"single:{args.single}"),
        ("adaptive", f"adaptive:{model_path}"),
    ):
        report_dir = out / f"eval_{name}"
        run(
            [
                "eval",
                "--gt-dir", str(data / "gt"),
                "--det-dir", str(data / "det"),
                "--out-dir", str(report_dir),
                "--iou-thr", str(args.iou_thr),
                "--threshold-mode", mode,
            ]
        )
        reports[name] = report_dir / "eval_report.json"

    compare_dir = out / "compare"
    run(
        [
            "compare",
            str(reports["single"]),
            str(reports["adaptive"]),
            "--out-dir", str(compare_dir),
        ]
    )

    report_dir = out / "report"
    run(
        [
            "report",
            "--model", str(model_path),
            "--stats", str(stats_dir / "bin_stats.json"),
            "--out-dir", str(report_dir),
        ]
    )

    model = json.loads(model_path.read_text(encoding="utf-8"))
    print()
    print(f"fitted model: alpha={model['alpha']:.6g} beta={model['beta']:.6g} "
          f"gamma={model['gamma']:.6g} delta={model['delta']:.6g} k={model['k']:.6g}")
    for name in ("raw", "single", "adaptive"):
        payload = json.loads(reports[name].read_text(encoding="utf-8"))
        print(
            f"{name:>8}: tp={payload['tp']} fp={payload['fp']} fn={payload['fn']} "
            f"recall={payload['recall']:.3f} precision={payload['precision']:.3f} "
            f"trade_off={payload['trade_off']:.3f}"
        )
    print()
    print(f"outputs under {out}/ (compare/compare.csv, report/threshold_curve.svg)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
