"""Detection-vs-ground-truth matching and metrics.

Matching is greedy per frame: detections in descending score order each
take the unmatched ground-truth box of highest IoU, provided that IoU
reaches the configured threshold. Ties break toward the lower ground
truth index, and equal scores toward the lower detection index, so the
result is deterministic.

Recall, precision, and the recall/precision trade-off are micro-averaged
over frames. Average precision sweeps the full score range over a global
score-sorted detection list (no pre-thresholding) and interpolates at 11
or 40 recall points; it is reported as a percentage.

Per-bin rows attribute matched pairs and misses to the ground-truth
box's distance bin and false positives to the detection's bin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .bin_stats import BinSpec, assign_bin
from .geometry import Box3D, iou_3d, iou_bev
from .kitti_io import DONT_CARE, FramePair, KittiRecord, MissingScoreError

ELEVEN_POINT = "eleven_point"
FORTY_POINT = "forty_point"

# Minimum 2D box height (pixels), maximum occlusion, maximum truncation.
_DIFFICULTY_LIMITS = {
    "easy": (40.0, 0, 0.15),
    "moderate": (25.0, 1, 0.30),
    "hard": (25.0, 2, 0.50),
}


class EvaluationError(ValueError):
    """Evaluation was asked for something undefined (e.g. AP without gt)."""


@dataclass(frozen=True)
class MatchConfig:
    """Matching and AP settings shared by all evaluation entry points."""

    iou_kind: str = "bev"
    iou_threshold: float = 0.7
    class_name: str = "Car"
    ap_interpolation: str = ELEVEN_POINT
    difficulty: str | None = None

    def __post_init__(self) -> None:
        if self.iou_kind not in ("bev", "3d"):
            raise ValueError(f"iou_kind must be 'bev' or '3d', got {self.iou_kind!r}")
        if not 0.0 < self.iou_threshold <= 1.0:
            raise ValueError(f"iou_threshold must be in (0, 1], got {self.iou_threshold}")
        if not self.class_name:
            raise ValueError("class_name must be non-empty")
        if self.ap_interpolation not in (ELEVEN_POINT, FORTY_POINT):
            raise ValueError(f"unknown ap_interpolation {self.ap_interpolation!r}")
        if self.difficulty is not None and self.difficulty not in _DIFFICULTY_LIMITS:
            raise ValueError(f"unknown difficulty {self.difficulty!r}")

    def iou_fn(self) -> Callable[[Box3D, Box3D], float]:
        return iou_bev if self.iou_kind == "bev" else iou_3d

    def to_dict(self) -> dict:
        return {
            "iou_kind": self.iou_kind,
            "iou_threshold": self.iou_threshold,
            "class_name": self.class_name,
            "ap_interpolation": self.ap_interpolation,
            "difficulty": self.difficulty,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MatchConfig":
        return cls(
            iou_kind=data["iou_kind"],
            iou_threshold=float(data["iou_threshold"]),
            class_name=data["class_name"],
            ap_interpolation=data["ap_interpolation"],
            difficulty=data.get("difficulty"),
        )


@dataclass(frozen=True)
class FrameMatch:
    """Greedy matching outcome for one frame; indices are list positions."""

    matches: tuple[tuple[int, int, float], ...]  # (det_idx, gt_idx, iou)
    unmatched_gt: tuple[int, ...]
    unmatched_det: tuple[int, ...]


def trade_off(recall: float, precision: float) -> float:
    """Absolute recall/precision gap; 0 means perfectly balanced."""
    return abs(recall - precision)


def _passes_difficulty(record: KittiRecord, difficulty: str | None) -> bool:
    if difficulty is None:
        return True
    min_height, max_occlusion, max_truncation = _DIFFICULTY_LIMITS[difficulty]
    height = record.bbox_2d[3] - record.bbox_2d[1]
    return (
        height >= min_height
        and record.occluded <= max_occlusion
        and record.truncated <= max_truncation
    )


def eval_lists(
    frame: FramePair, config: MatchConfig
) -> tuple[list[KittiRecord], list[KittiRecord]]:
    """Ground truth and detections of the configured class.

    DontCare rows and, when a difficulty stratum is set, ground truth
    outside it are dropped from the ground-truth list.
    """
    gt = [
        r
        for r in frame.ground_truth
        if r.class_name == config.class_name
        and r.class_name != DONT_CARE
        and _passes_difficulty(r, config.difficulty)
    ]
    det = [r for r in frame.detections if r.class_name == config.class_name]
    return gt, det


def _score_of(record: KittiRecord) -> float:
    if record.score is None:
        raise MissingScoreError("detection record has no score")
    return record.score


def match_frame(
    gt: Sequence[KittiRecord], det: Sequence[KittiRecord], config: MatchConfig
) -> FrameMatch:
    """Greedy score-descending matching of one frame.

    Both lists must already be filtered to the class under evaluation
    (see eval_lists); DontCare rows are not expected here.
    """
    iou = config.iou_fn()
    gt_boxes = [r.to_box3d() for r in gt]
    det_boxes = [r.to_box3d() for r in det]
    order = sorted(range(len(det)), key=lambda i: (-_score_of(det[i]), i))
    taken = [False] * len(gt)
    matches: list[tuple[int, int, float]] = []
    for det_idx in order:
        best_gt = -1
        best_iou = 0.0
        for gt_idx in range(len(gt)):
            if taken[gt_idx]:
                continue
            value = iou(det_boxes[det_idx], gt_boxes[gt_idx])
            if value >= config.iou_threshold and value > best_iou:
                best_gt = gt_idx
                best_iou = value
        if best_gt >= 0:
            taken[best_gt] = True
            matches.append((det_idx, best_gt, best_iou))
    matched_dets = {m[0] for m in matches}
    return FrameMatch(
        matches=tuple(matches),
        unmatched_gt=tuple(i for i in range(len(gt)) if not taken[i]),
        unmatched_det=tuple(i for i in range(len(det)) if i not in matched_dets),
    )


def _ratio(numerator: int, denominator: int) -> float:
    """tp / (tp + misses); an empty denominator counts as perfect."""
    return numerator / denominator if denominator > 0 else 1.0


def point_metrics(
    frames: Sequence[FramePair], config: MatchConfig
) -> tuple[float, float, float]:
    """Micro-averaged (recall, precision, trade_off) over all frames.

    Detections are evaluated as given; apply a threshold first if one is
    under test. With no ground truth and no detections at all, recall
    and precision are both 1.0.
    """
    tp = fp = fn = 0
    for frame in frames:
        gt, det = eval_lists(frame, config)
        result = match_frame(gt, det, config)
        tp += len(result.matches)
        fn += len(result.unmatched_gt)
        fp += len(result.unmatched_det)
    recall = _ratio(tp, tp + fn)
    precision = _ratio(tp, tp + fp)
    return recall, precision, trade_off(recall, precision)


def _interpolation_points(kind: str) -> list[float]:
    if kind == ELEVEN_POINT:
        return [i / 10.0 for i in range(11)]
    return [i / 40.0 for i in range(1, 41)]


def average_precision(frames: Sequence[FramePair], config: MatchConfig) -> float:
    """Interpolated average precision as a percentage in [0, 100].

    Sweeps all detections in a single global score-descending pass (ties
    broken by frame_id, then by record position) without any score
    threshold. Raises EvaluationError when there is no ground truth.
    With distinct scores the result does not depend on record order
    inside detection files.
    """
    per_frame: list[tuple[list[Box3D], list[bool]]] = []
    entries: list[tuple[float, str, int, int, Box3D]] = []
    total_gt = 0
    for frame_pos, frame in enumerate(frames):
        gt, det = eval_lists(frame, config)
        gt_boxes = [r.to_box3d() for r in gt]
        per_frame.append((gt_boxes, [False] * len(gt_boxes)))
        total_gt += len(gt_boxes)
        for det_idx, record in enumerate(det):
            entries.append(
                (_score_of(record), frame.frame_id, det_idx, frame_pos, record.to_box3d())
            )
    if total_gt == 0:
        raise EvaluationError("average precision is undefined without ground truth")
    entries.sort(key=lambda e: (-e[0], e[1], e[2]))
    iou = config.iou_fn()
    tp_flags: list[bool] = []
    for _, _, _, frame_pos, det_box in entries:
        gt_boxes, taken = per_frame[frame_pos]
        best_gt = -1
        best_iou = 0.0
        for gt_idx, gt_box in enumerate(gt_boxes):
            if taken[gt_idx]:
                continue
            value = iou(det_box, gt_box)
            if value >= config.iou_threshold and value > best_iou:
                best_gt = gt_idx
                best_iou = value
        if best_gt >= 0:
            taken[best_gt] = True
            tp_flags.append(True)
        else:
            tp_flags.append(False)
    recalls: list[float] = []
    precisions: list[float] = []
    cum_tp = 0
    for rank, is_tp in enumerate(tp_flags, start=1):
        if is_tp:
            cum_tp += 1
        recalls.append(cum_tp / total_gt)
        precisions.append(cum_tp / rank)
    points = _interpolation_points(config.ap_interpolation)
    total = 0.0
    for point in points:
        best = 0.0
        for recall, precision in zip(recalls, precisions):
            if recall >= point and precision > best:
                best = precision
        total += best
    return 100.0 * total / len(points)


@dataclass(frozen=True)
class BinBreakdown:
    """Counts and point metrics for one distance bin.

    hi_m is None for the overflow bin collecting objects at or beyond
    max_distance.
    """

    bin_index: int
    lo_m: float
    hi_m: float | None
    tp: int
    fp: int
    fn: int
    recall: float
    precision: float

    def to_dict(self) -> dict:
        return {
            "bin_index": self.bin_index,
            "lo_m": self.lo_m,
            "hi_m": self.hi_m,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "recall": self.recall,
            "precision": self.precision,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BinBreakdown":
        return cls(
            bin_index=int(data["bin_index"]),
            lo_m=float(data["lo_m"]),
            hi_m=None if data["hi_m"] is None else float(data["hi_m"]),
            tp=int(data["tp"]),
            fp=int(data["fp"]),
            fn=int(data["fn"]),
            recall=float(data["recall"]),
            precision=float(data["precision"]),
        )


@dataclass(frozen=True)
class EvalReport:
    """Complete evaluation outcome for one detection set."""

    config: MatchConfig
    tp: int
    fp: int
    fn: int
    recall: float
    precision: float
    trade_off: float
    average_precision: float
    average_precision_filtered: float | None
    per_bin: tuple[BinBreakdown, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "recall": self.recall,
            "precision": self.precision,
            "trade_off": self.trade_off,
            "average_precision": self.average_precision,
            "average_precision_filtered": self.average_precision_filtered,
            "per_bin": [row.to_dict() for row in self.per_bin],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(
            config=MatchConfig.from_dict(data["config"]),
            tp=int(data["tp"]),
            fp=int(data["fp"]),
            fn=int(data["fn"]),
            recall=float(data["recall"]),
            precision=float(data["precision"]),
            trade_off=float(data["trade_off"]),
            average_precision=float(data["average_precision"]),
            average_precision_filtered=(
                None
                if data.get("average_precision_filtered") is None
                else float(data["average_precision_filtered"])
            ),
            per_bin=tuple(BinBreakdown.from_dict(row) for row in data.get("per_bin", [])),
        )


def evaluate(
    frames: Sequence[FramePair],
    config: MatchConfig,
    bin_spec: BinSpec | None = None,
    ap_frames: Sequence[FramePair] | None = None,
) -> EvalReport:
    """Build a full report for a (possibly threshold-filtered) detection set.

    Point metrics and per-bin rows come from `frames`. average_precision
    is computed on ap_frames when given (the unfiltered detections, so
    the sweep covers the full score range) and on `frames` otherwise; in
    the former case the filtered set's AP is reported separately.
    """
    spec = bin_spec if bin_spec is not None else BinSpec()
    overflow = spec.n_bins
    tp_by_bin = [0] * (spec.n_bins + 1)
    fp_by_bin = [0] * (spec.n_bins + 1)
    fn_by_bin = [0] * (spec.n_bins + 1)

    def bin_of(record: KittiRecord) -> int:
        index = assign_bin(record.ego_distance(), spec)
        return overflow if index is None else index

    for frame in frames:
        gt, det = eval_lists(frame, config)
        result = match_frame(gt, det, config)
        for _, gt_idx, _ in result.matches:
            tp_by_bin[bin_of(gt[gt_idx])] += 1
        for gt_idx in result.unmatched_gt:
            fn_by_bin[bin_of(gt[gt_idx])] += 1
        for det_idx in result.unmatched_det:
            fp_by_bin[bin_of(det[det_idx])] += 1

    tp = sum(tp_by_bin)
    fp = sum(fp_by_bin)
    fn = sum(fn_by_bin)
    recall = _ratio(tp, tp + fn)
    precision = _ratio(tp, tp + fp)

    rows: list[BinBreakdown] = []
    for index in range(spec.n_bins + 1):
        if index == overflow and not (tp_by_bin[index] or fp_by_bin[index] or fn_by_bin[index]):
            continue
        if index == overflow:
            lo, hi = spec.max_distance, None
        else:
            lo, hi = spec.edges(index)
        b_tp, b_fp, b_fn = tp_by_bin[index], fp_by_bin[index], fn_by_bin[index]
        rows.append(
            BinBreakdown(
                bin_index=index,
                lo_m=lo,
                hi_m=hi,
                tp=b_tp,
                fp=b_fp,
                fn=b_fn,
                recall=_ratio(b_tp, b_tp + b_fn),
                precision=_ratio(b_tp, b_tp + b_fp),
            )
        )

    if ap_frames is not None:
        ap = average_precision(ap_frames, config)
        ap_filtered = average_precision(frames, config)
    else:
        ap = average_precision(frames, config)
        ap_filtered = None
    return EvalReport(
        config=config,
        tp=tp,
        fp=fp,
        fn=fn,
        recall=recall,
        precision=precision,
        trade_off=trade_off(recall, precision),
        average_precision=ap,
        average_precision_filtered=ap_filtered,
        per_bin=tuple(rows),
    )


@dataclass(frozen=True)
class MetricDelta:
    """One row of a report comparison: candidate minus baseline."""

    metric: str
    baseline: float
    candidate: float

    @property
    def delta(self) -> float:
        return self.candidate - self.baseline

    def formatted_delta(self) -> str:
        return f"({self.delta:+.3f})"


def compare_reports(baseline: EvalReport, candidate: EvalReport) -> list[MetricDelta]:
    """Per-metric deltas between two reports sharing a config."""
    if baseline.config != candidate.config:
        raise EvaluationError(
            "reports were produced under different configurations and cannot be compared"
        )
    rows = [
        MetricDelta("tp", baseline.tp, candidate.tp),
        MetricDelta("fp", baseline.fp, candidate.fp),
        MetricDelta("fn", baseline.fn, candidate.fn),
        MetricDelta("recall", baseline.recall, candidate.recall),
        MetricDelta("precision", baseline.precision, candidate.precision),
        MetricDelta("trade_off", baseline.trade_off, candidate.trade_off),
        MetricDelta("average_precision", baseline.average_precision, candidate.average_precision),
    ]
    if (
        baseline.average_precision_filtered is not None
        and candidate.average_precision_filtered is not None
    ):
        rows.append(
            MetricDelta(
                "average_precision_filtered",
                baseline.average_precision_filtered,
                candidate.average_precision_filtered,
            )
        )
    return rows
