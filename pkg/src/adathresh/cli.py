"""Command-line interface.

Subcommands: stats, fit, filter, eval, compare, synth, report. Options
resolve with precedence CLI flag > config file (--config, JSON keyed by
the flag names with dashes as underscores) > built-in default. Exit
codes: 0 success, 1 usage error, 2 data or parse error, 3 numerical
failure. Every output file is written atomically (temp file + rename);
CSV uses RFC 4180 quoting and JSON a stable key order.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .bin_stats import BinSpec, BinStats, PreFilter, compute_bin_stats
from .evaluation import (
    EvalReport,
    EvaluationError,
    MatchConfig,
    compare_reports,
    evaluate,
)
from .kitti_io import (
    DatasetError,
    FramePair,
    KittiIOError,
    KittiRecord,
    LabelError,
    load_dataset,
    parse_label_file,
    write_label_file,
)
from .report import render_summary_md, render_threshold_svg
from .synthetic import ScenarioSpec, generate, scenario_totals
from .threshold import (
    FitError,
    ModelRangeError,
    ThresholdModel,
    apply_adaptive,
    apply_single,
    fit_quadratic,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_AP_MODES = {"11": "eleven_point", "40": "forty_point"}


class _UsageError(ValueError):
    """Bad flag or config value; maps to exit code 1."""


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings for one invocation."""

    gt_dir: Path | None
    det_dir: Path | None
    out_dir: Path | None
    class_name: str
    bin_spec: BinSpec
    pre_filter: PreFilter | None
    match_config: MatchConfig
    threshold_mode: tuple[str, object]
    jobs: int


def _err(message: object) -> None:
    print(f"adathresh: error: {message}", file=sys.stderr)


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _write_json(path: Path, payload: object) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list[object]]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(header)
    writer.writerows(rows)
    _write_text(path, buffer.getvalue())


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DatasetError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DatasetError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise DatasetError(f"config file {path} must hold a JSON object")
    return data


def _resolve(args: argparse.Namespace, file_cfg: dict, key: str, default=None, required=False):
    value = getattr(args, key, None)
    if value is None:
        value = file_cfg.get(key, default)
    if required and value is None:
        flag = "--" + key.replace("_", "-")
        raise _UsageError(f"missing required option {flag} (or config key '{key}')")
    return value


def _parse_pre_filter(value) -> PreFilter | None:
    if value is None:
        return PreFilter()
    if isinstance(value, dict):
        try:
            return PreFilter.from_dict(value)
        except (KeyError, TypeError, ValueError) as exc:
            raise _UsageError(f"bad pre_filter config value: {exc}") from exc
    text = str(value).strip()
    if text.lower() == "none":
        return None
    parts = text.split(":")
    if len(parts) != 3:
        raise _UsageError(
            f"--pre-filter expects 'CUTOFF:LOW:HIGH' or 'none', got {value!r}"
        )
    try:
        cutoff, low, high = (float(p) for p in parts)
        return PreFilter(distance_cutoff=cutoff, low_threshold=low, high_threshold=high)
    except ValueError as exc:
        raise _UsageError(f"bad --pre-filter value {value!r}: {exc}") from exc


def _parse_threshold_mode(value: str) -> tuple[str, object]:
    text = str(value).strip()
    if text.lower() == "none":
        return ("none", None)
    kind, sep, payload = text.partition(":")
    if not sep:
        raise _UsageError(
            f"--threshold-mode expects 'none', 'single:<t>' or 'adaptive:<model.json>', got {value!r}"
        )
    if kind == "single":
        try:
            threshold = float(payload)
        except ValueError as exc:
            raise _UsageError(f"bad single threshold {payload!r}") from exc
        if not 0.0 <= threshold <= 1.0:
            raise _UsageError(f"single threshold must lie in [0, 1], got {threshold}")
        return ("single", threshold)
    if kind == "adaptive":
        if not payload:
            raise _UsageError("adaptive mode needs a model file: adaptive:<model.json>")
        return ("adaptive", payload)
    raise _UsageError(f"unknown threshold mode {kind!r}")


def _load_model(path: str | Path) -> ThresholdModel:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DatasetError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DatasetError(f"model file {path} is not valid JSON: {exc}") from exc
    try:
        return ThresholdModel.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise DatasetError(f"model file {path} is missing or mistyping keys: {exc}") from exc


def _mode_filter(mode: tuple[str, object]):
    """Callable applying the threshold mode to a list of detection records."""
    kind, payload = mode
    if kind == "none":
        return lambda records: list(records)
    if kind == "single":
        return lambda records: apply_single(records, payload)
    model = _load_model(payload)
    return lambda records: apply_adaptive(records, model)


def _mode_label(mode: tuple[str, object]) -> str:
    kind, payload = mode
    if kind == "none":
        return "none"
    if kind == "single":
        return f"single:{payload}"
    return f"adaptive:{payload}"


def _bin_spec_from(args: argparse.Namespace, file_cfg: dict) -> BinSpec:
    width = float(_resolve(args, file_cfg, "bin_width", 10.0))
    max_distance = float(_resolve(args, file_cfg, "max_distance", 60.0))
    try:
        return BinSpec(bin_width=width, max_distance=max_distance)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


def _collect_samples(
    frames: list[FramePair], class_name: str, pre_filter: PreFilter | None
) -> list[tuple[float, float]]:
    samples: list[tuple[float, float]] = []
    for frame in frames:
        for record in frame.detections:
            if record.class_name != class_name:
                continue
            distance = record.ego_distance()
            if pre_filter is not None and not pre_filter.keeps(distance, record.score):
                continue
            samples.append((distance, record.score))
    return samples


def _stats_pipeline(args: argparse.Namespace, file_cfg: dict):
    gt_dir = Path(_resolve(args, file_cfg, "gt_dir", required=True))
    det_dir = Path(_resolve(args, file_cfg, "det_dir", required=True))
    class_name = str(_resolve(args, file_cfg, "class_name", "Car"))
    jobs = int(_resolve(args, file_cfg, "jobs", 1))
    spec = _bin_spec_from(args, file_cfg)
    pre_filter = _parse_pre_filter(_resolve(args, file_cfg, "pre_filter"))
    normalize = bool(_resolve(args, file_cfg, "normalized_std", False))
    frames = load_dataset(gt_dir, det_dir, jobs=jobs)
    samples = _collect_samples(frames, class_name, pre_filter)
    stats = compute_bin_stats(samples, spec, normalize_std=normalize)
    return stats, spec, pre_filter, class_name, normalize, len(samples)


def _stats_rows(stats: list[BinStats], spec: BinSpec) -> list[list[object]]:
    rows: list[list[object]] = []
    for entry in stats:
        lo, hi = spec.edges(entry.bin_index)
        rows.append(
            [
                entry.bin_index,
                lo,
                hi,
                entry.count,
                "" if entry.mean is None else repr(entry.mean),
                "" if entry.std is None else repr(entry.std),
            ]
        )
    return rows


def _stats_payload(stats, spec, pre_filter, class_name, normalize, n_used) -> dict:
    return {
        "class_name": class_name,
        "bin_width": spec.bin_width,
        "max_distance": spec.max_distance,
        "normalized_std": normalize,
        "pre_filter": None if pre_filter is None else pre_filter.to_dict(),
        "n_detections_used": n_used,
        "bins": [
            {
                "bin_index": entry.bin_index,
                "lo_m": spec.edges(entry.bin_index)[0],
                "hi_m": spec.edges(entry.bin_index)[1],
                "count": entry.count,
                "mean": entry.mean,
                "std": entry.std,
            }
            for entry in stats
        ],
    }


def cmd_stats(args: argparse.Namespace) -> int:
    file_cfg = _load_config_file(args.config)
    out_dir = Path(_resolve(args, file_cfg, "out_dir", required=True))
    stats, spec, pre_filter, class_name, normalize, n_used = _stats_pipeline(args, file_cfg)
    csv_path = out_dir / "bin_stats.csv"
    json_path = out_dir / "bin_stats.json"
    _write_csv(csv_path, ["bin_index", "lo_m", "hi_m", "count", "mean", "std"], _stats_rows(stats, spec))
    _write_json(json_path, _stats_payload(stats, spec, pre_filter, class_name, normalize, n_used))
    print(f"binned {n_used} {class_name} detections into {spec.n_bins} bins")
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    file_cfg = _load_config_file(args.config)
    out_dir = Path(_resolve(args, file_cfg, "out_dir", required=True))
    delta = float(_resolve(args, file_cfg, "delta", 60.0))
    k_raw = _resolve(args, file_cfg, "k", 0.6)
    if isinstance(k_raw, str) and k_raw.strip().lower() == "continuity":
        k = None
    else:
        try:
            k = float(k_raw)
        except (TypeError, ValueError) as exc:
            raise _UsageError(f"--k expects a number or 'continuity', got {k_raw!r}") from exc
    sigma_floor = float(_resolve(args, file_cfg, "sigma_floor", 1e-3))
    stats, spec, _, _, _, _ = _stats_pipeline(args, file_cfg)
    result = fit_quadratic(stats, spec, delta=delta, k=k, sigma_floor=sigma_floor)
    model_path = out_dir / "model.json"
    report_path = out_dir / "fit_report.csv"
    _write_json(model_path, result.model.to_dict())
    by_index = {entry.bin_index: entry for entry in stats}
    rows: list[list[object]] = []
    for bin_index, x, fitted, residual in zip(
        result.bin_indices, result.abscissas, result.fitted, result.residuals
    ):
        entry = by_index[bin_index]
        rows.append([bin_index, x, repr(entry.mean), repr(entry.std), repr(fitted), repr(residual)])
    _write_csv(report_path, ["bin_index", "x_m", "mean", "std", "fitted", "residual"], rows)
    model = result.model
    print(
        f"fit over {result.bins_used} bins: alpha={model.alpha:.6g} beta={model.beta:.6g} "
        f"gamma={model.gamma:.6g} delta={model.delta:.6g} k={model.k:.6g} "
        f"(weighted rmse {result.weighted_rmse:.6g})"
    )
    print(f"wrote {model_path} and {report_path}")
    return EXIT_OK


def cmd_filter(args: argparse.Namespace) -> int:
    file_cfg = _load_config_file(args.config)
    det_dir = Path(_resolve(args, file_cfg, "det_dir", required=True))
    out_dir = Path(_resolve(args, file_cfg, "out_dir", required=True))
    mode = _parse_threshold_mode(_resolve(args, file_cfg, "threshold_mode", required=True))
    if not det_dir.is_dir():
        raise DatasetError(f"detection directory not found: {det_dir}")
    apply_mode = _mode_filter(mode)
    total = kept = 0
    for path in sorted(det_dir.glob("*.txt")):
        try:
            records = parse_label_file(path.read_text(encoding="utf-8"), expect_score=True)
        except LabelError as exc:
            exc.path = str(path)
            raise
        survivors = apply_mode(records)
        total += len(records)
        kept += len(survivors)
        write_label_file(out_dir / path.name, survivors)
    print(f"kept {kept} of {total} detections under mode {_mode_label(mode)}; wrote {out_dir}")
    return EXIT_OK


def _apply_mode_to_frames(frames: list[FramePair], mode: tuple[str, object]) -> list[FramePair]:
    apply_mode = _mode_filter(mode)
    return [
        FramePair(frame.frame_id, frame.ground_truth, apply_mode(list(frame.detections)))
        for frame in frames
    ]


def cmd_eval(args: argparse.Namespace) -> int:
    file_cfg = _load_config_file(args.config)
    gt_dir = Path(_resolve(args, file_cfg, "gt_dir", required=True))
    det_dir = Path(_resolve(args, file_cfg, "det_dir", required=True))
    out_dir = Path(_resolve(args, file_cfg, "out_dir", required=True))
    jobs = int(_resolve(args, file_cfg, "jobs", 1))
    spec = _bin_spec_from(args, file_cfg)
    mode = _parse_threshold_mode(_resolve(args, file_cfg, "threshold_mode", "none"))
    ap_key = str(_resolve(args, file_cfg, "ap", "11"))
    if ap_key not in _AP_MODES:
        raise _UsageError(f"--ap must be 11 or 40, got {ap_key!r}")
    try:
        config = MatchConfig(
            iou_kind=str(_resolve(args, file_cfg, "iou", "bev")),
            iou_threshold=float(_resolve(args, file_cfg, "iou_thr", 0.7)),
            class_name=str(_resolve(args, file_cfg, "class_name", "Car")),
            ap_interpolation=_AP_MODES[ap_key],
            difficulty=_resolve(args, file_cfg, "difficulty"),
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    frames = load_dataset(gt_dir, det_dir, jobs=jobs)
    filtered = _apply_mode_to_frames(frames, mode)
    ap_frames = frames if mode[0] != "none" else None
    report = evaluate(filtered, config, spec, ap_frames=ap_frames)
    payload = report.to_dict()
    payload["threshold_mode"] = _mode_label(mode)
    payload["n_frames"] = len(frames)
    json_path = out_dir / "eval_report.json"
    csv_path = out_dir / "eval_report.csv"
    _write_json(json_path, payload)
    rows: list[list[object]] = [
        ["all", "", "", report.tp, report.fp, report.fn, repr(report.recall), repr(report.precision)]
    ]
    for row in report.per_bin:
        rows.append(
            [
                f"bin{row.bin_index}",
                row.lo_m,
                "" if row.hi_m is None else row.hi_m,
                row.tp,
                row.fp,
                row.fn,
                repr(row.recall),
                repr(row.precision),
            ]
        )
    _write_csv(csv_path, ["scope", "lo_m", "hi_m", "tp", "fp", "fn", "recall", "precision"], rows)
    filtered_note = (
        ""
        if report.average_precision_filtered is None
        else f" ap_filtered={report.average_precision_filtered:.2f}"
    )
    print(
        f"mode {_mode_label(mode)}: recall={report.recall:.3f} precision={report.precision:.3f} "
        f"trade_off={report.trade_off:.3f} ap={report.average_precision:.2f}{filtered_note}"
    )
    print(f"wrote {json_path} and {csv_path}")
    return EXIT_OK


def _load_report(path: str) -> EvalReport:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DatasetError(f"cannot read report file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DatasetError(f"report file {path} is not valid JSON: {exc}") from exc
    try:
        return EvalReport.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise DatasetError(f"report file {path} is missing keys: {exc}") from exc


def cmd_compare(args: argparse.Namespace) -> int:
    file_cfg = _load_config_file(args.config)
    out_dir = Path(_resolve(args, file_cfg, "out_dir", required=True))
    baseline = _load_report(args.baseline)
    candidate = _load_report(args.candidate)
    rows = compare_reports(baseline, candidate)
    csv_rows: list[list[object]] = []
    print(f"{'metric':<28}{'baseline':>12}{'candidate':>12}{'delta':>12}")
    for row in rows:
        is_count = row.metric in ("tp", "fp", "fn")
        base = int(row.baseline) if is_count else row.baseline
        cand = int(row.candidate) if is_count else row.candidate
        delta = cand - base
        formatted = f"({delta:+d})" if is_count else row.formatted_delta()
        csv_rows.append([row.metric, base, cand, delta, formatted])
        if is_count:
            print(f"{row.metric:<28}{base:>12d}{cand:>12d}{formatted:>12}")
        else:
            print(f"{row.metric:<28}{base:>12.3f}{cand:>12.3f}{formatted:>12}")
    csv_path = out_dir / "compare.csv"
    _write_csv(csv_path, ["metric", "baseline", "candidate", "delta", "formatted"], csv_rows)
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    file_cfg = _load_config_file(args.config)
    out_dir = Path(_resolve(args, file_cfg, "out_dir", required=True))
    spec_path = _resolve(args, file_cfg, "spec", required=True)
    try:
        data = json.loads(Path(spec_path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DatasetError(f"cannot read scenario file {spec_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DatasetError(f"scenario file {spec_path} is not valid JSON: {exc}") from exc
    try:
        spec = ScenarioSpec.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise DatasetError(f"scenario file {spec_path} is missing keys: {exc}") from exc
    frames = generate(spec)
    for frame in frames:
        write_label_file(out_dir / "gt" / f"{frame.frame_id}.txt", list(frame.ground_truth))
        write_label_file(out_dir / "det" / f"{frame.frame_id}.txt", list(frame.detections))
    _write_json(out_dir / "manifest.json", spec.to_dict())
    n_gt, n_det = scenario_totals(frames)
    print(
        f"generated {len(frames)} frames ({n_gt} ground-truth objects, {n_det} detections) "
        f"from seed {spec.seed}"
    )
    print(f"wrote {out_dir / 'gt'}, {out_dir / 'det'}, {out_dir / 'manifest.json'}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    file_cfg = _load_config_file(args.config)
    out_dir = Path(_resolve(args, file_cfg, "out_dir", required=True))
    model = _load_model(_resolve(args, file_cfg, "model", required=True))
    stats_path = _resolve(args, file_cfg, "stats")
    bins: list[BinStats] = []
    spec = BinSpec()
    if stats_path is not None:
        try:
            data = json.loads(Path(stats_path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise DatasetError(f"cannot read stats file {stats_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DatasetError(f"stats file {stats_path} is not valid JSON: {exc}") from exc
        try:
            spec = BinSpec(bin_width=float(data["bin_width"]), max_distance=float(data["max_distance"]))
            bins = [
                BinStats(
                    bin_index=int(entry["bin_index"]),
                    count=int(entry["count"]),
                    mean=entry["mean"],
                    std=entry["std"],
                )
                for entry in data["bins"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetError(f"stats file {stats_path} has an unexpected shape: {exc}") from exc
    svg_path = out_dir / "threshold_curve.svg"
    md_path = out_dir / "summary.md"
    _write_text(svg_path, render_threshold_svg(model, bins, spec))
    _write_text(md_path, render_summary_md(model, bins, spec))
    print(f"wrote {svg_path} and {md_path}")
    return EXIT_OK


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this project uses 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_io_flags(parser: argparse.ArgumentParser, *, gt: bool = True, det: bool = True) -> None:
    if gt:
        parser.add_argument("--gt-dir", dest="gt_dir", help="directory of ground-truth label files")
    if det:
        parser.add_argument("--det-dir", dest="det_dir", help="directory of detection files")
    parser.add_argument("--out-dir", dest="out_dir", help="directory for outputs")
    parser.add_argument("--config", help="JSON config file; CLI flags override its keys")


def _add_binning_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--class", dest="class_name", help="object class to use (default Car)")
    parser.add_argument("--bin-width", dest="bin_width", type=float, help="bin width in meters (default 10)")
    parser.add_argument(
        "--max-distance", dest="max_distance", type=float, help="binning range end in meters (default 60)"
    )
    parser.add_argument(
        "--pre-filter",
        dest="pre_filter",
        help="'CUTOFF:LOW:HIGH' score pre-filter (default 40:0.3:0.5) or 'none'",
    )
    parser.add_argument("--jobs", type=int, help="parallel file-loading workers (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="adathresh",
        description="Distance-adaptive confidence thresholding and evaluation for KITTI-format detections.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p_stats = sub.add_parser("stats", help="distance-binned score statistics")
    _add_io_flags(p_stats)
    _add_binning_flags(p_stats)
    p_stats.add_argument(
        "--normalized-std",
        dest="normalized_std",
        action="store_const",
        const=True,
        help="divide each bin's std by its mean",
    )

    p_fit = sub.add_parser("fit", help="fit the quadratic threshold to binned statistics")
    _add_io_flags(p_fit)
    _add_binning_flags(p_fit)
    p_fit.add_argument("--delta", type=float, help="quadratic/constant cutover distance (default 60)")
    p_fit.add_argument("--k", help="far-range constant threshold, or 'continuity' (default 0.6)")
    p_fit.add_argument("--sigma-floor", dest="sigma_floor", type=float, help="minimum std used in weights")

    p_filter = sub.add_parser("filter", help="write threshold-filtered copies of detection files")
    _add_io_flags(p_filter, gt=False)
    p_filter.add_argument(
        "--threshold-mode",
        dest="threshold_mode",
        help="'none', 'single:<t>' or 'adaptive:<model.json>'",
    )

    p_eval = sub.add_parser("eval", help="match detections against ground truth and report metrics")
    _add_io_flags(p_eval)
    _add_binning_flags(p_eval)
    p_eval.add_argument("--iou", choices=("bev", "3d"), help="IoU kind (default bev)")
    p_eval.add_argument("--iou-thr", dest="iou_thr", type=float, help="matching IoU threshold (default 0.7)")
    p_eval.add_argument("--ap", choices=("11", "40"), help="AP interpolation points (default 11)")
    p_eval.add_argument(
        "--difficulty", choices=("easy", "moderate", "hard"), help="optional ground-truth stratum filter"
    )
    p_eval.add_argument(
        "--threshold-mode",
        dest="threshold_mode",
        help="'none' (default), 'single:<t>' or 'adaptive:<model.json>'",
    )

    p_compare = sub.add_parser("compare", help="delta table between two eval reports")
    p_compare.add_argument("baseline", help="baseline eval_report.json")
    p_compare.add_argument("candidate", help="candidate eval_report.json")
    p_compare.add_argument("--out-dir", dest="out_dir", help="directory for compare.csv")
    p_compare.add_argument("--config", help="JSON config file")

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset from a scenario file")
    p_synth.add_argument("--spec", help="scenario JSON file")
    p_synth.add_argument("--out-dir", dest="out_dir", help="output directory (gt/, det/, manifest.json)")
    p_synth.add_argument("--config", help="JSON config file")

    p_report = sub.add_parser("report", help="render the threshold curve and a summary")
    p_report.add_argument("--model", help="model JSON file")
    p_report.add_argument("--stats", help="bin_stats.json to overlay (optional)")
    p_report.add_argument("--out-dir", dest="out_dir", help="directory for SVG and markdown")
    p_report.add_argument("--config", help="JSON config file")

    return parser


_COMMANDS = {
    "stats": cmd_stats,
    "fit": cmd_fit,
    "filter": cmd_filter,
    "eval": cmd_eval,
    "compare": cmd_compare,
    "synth": cmd_synth,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        _err(exc)
        return EXIT_USAGE
    except (FitError, ModelRangeError) as exc:
        _err(exc)
        return EXIT_NUMERIC
    except (KittiIOError, EvaluationError) as exc:
        _err(exc)
        return EXIT_DATA
    except OSError as exc:
        _err(exc)
        return EXIT_DATA
    except ValueError as exc:
        _err(exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
