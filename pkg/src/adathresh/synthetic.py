"""Deterministic synthetic scenes with known matching outcomes.

All randomness flows through numpy's Philox counter-based 64-bit
generator seeded with ScenarioSpec.seed, and the draw order is fixed by
the generation loop below, so a given spec reproduces a byte-identical
dataset on any platform. Per frame the order is:

    1. object count
    2. per true object: placement tries (distance, bearing), three
       dimension jitters, yaw, a miss draw, and, when detected, center
       jitter (x, z), yaw jitter, and one score noise draw
    3. per distance bin: a false-positive draw and, when it fires,
       placement tries, dimension jitters, yaw, and a score fraction

Objects are car-like boxes placed at least MIN_SEPARATION apart in the
ground plane, so every true detection overlaps exactly its own ground
truth (IoU well above 0.7) and false positives overlap nothing. That
makes exhaustive enumeration of the matching outcome trivial, which
known_optimal_counts exploits as an oracle for the evaluation pipeline.

True-detection scores are the scenario quadratic at the detected
distance plus Gaussian noise, clamped to [0, 1]. False positives score
a uniform fraction (0.45 to 0.85) of the local true-score mean, i.e.
always below it on average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bin_stats import BinSpec
from .geometry import ground_distance, normalize_angle
from .kitti_io import FramePair, KittiRecord
from .threshold import ThresholdModel, threshold_at

CAR_DIMS = (1.5, 1.7, 4.0)  # height, width, length (meters)
MIN_SEPARATION = 6.0

_PLACEMENT_TRIES = 100
_MAX_BEARING = 1.2  # radians off the camera forward axis
_CAMERA_Y = 1.65
_DIMS_JITTER = 0.05  # relative
_CENTER_JITTER = 0.05  # meters
_YAW_JITTER = 0.01  # radians
_FP_SCORE_BAND = (0.45, 0.85)  # fraction of the local true-score mean

TRUE_POSITIVE = "tp"
FALSE_POSITIVE = "fp"


@dataclass(frozen=True)
class ScoreModel:
    """Quadratic mean score over distance plus per-bin Gaussian noise."""

    a: float
    b: float
    c: float
    noise_std: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "noise_std", tuple(float(v) for v in self.noise_std))
        if any(v < 0.0 for v in self.noise_std):
            raise ValueError("noise_std entries must be non-negative")

    def mean_at(self, distance: float) -> float:
        """Unclamped mean score at a distance."""
        return (self.a * distance + self.b) * distance + self.c

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "noise_std": list(self.noise_std)}

    @classmethod
    def from_dict(cls, data: dict) -> "ScoreModel":
        return cls(
            a=float(data["a"]),
            b=float(data["b"]),
            c=float(data["c"]),
            noise_std=tuple(float(v) for v in data["noise_std"]),
        )


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything needed to regenerate a synthetic dataset."""

    seed: int
    n_frames: int
    objects_per_frame: tuple[int, int]
    distance_range: tuple[float, float]
    score_model: ScoreModel
    fp_rate_per_bin: tuple[float, ...]
    fn_rate_per_bin: tuple[float, ...]
    bin_spec: BinSpec = field(default_factory=BinSpec)

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects_per_frame", tuple(int(v) for v in self.objects_per_frame))
        object.__setattr__(self, "distance_range", tuple(float(v) for v in self.distance_range))
        object.__setattr__(self, "fp_rate_per_bin", tuple(float(v) for v in self.fp_rate_per_bin))
        object.__setattr__(self, "fn_rate_per_bin", tuple(float(v) for v in self.fn_rate_per_bin))
        if self.n_frames <= 0:
            raise ValueError("n_frames must be positive")
        lo, hi = self.objects_per_frame
        if lo < 0 or hi < lo:
            raise ValueError(f"bad objects_per_frame range {self.objects_per_frame}")
        d_lo, d_hi = self.distance_range
        if not (0.0 <= d_lo < d_hi <= 120.0):
            raise ValueError(f"distance_range must satisfy 0 <= lo < hi <= 120, got {self.distance_range}")
        n_bins = self.bin_spec.n_bins
        for name in ("fp_rate_per_bin", "fn_rate_per_bin"):
            rates = getattr(self, name)
            if len(rates) != n_bins:
                raise ValueError(f"{name} needs {n_bins} entries, got {len(rates)}")
            if any(not 0.0 <= r <= 1.0 for r in rates):
                raise ValueError(f"{name} entries must lie in [0, 1]")
        if len(self.score_model.noise_std) != n_bins:
            raise ValueError(
                f"score_model.noise_std needs {n_bins} entries, got {len(self.score_model.noise_std)}"
            )

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_frames": self.n_frames,
            "objects_per_frame": list(self.objects_per_frame),
            "distance_range": list(self.distance_range),
            "score_model": self.score_model.to_dict(),
            "fp_rate_per_bin": list(self.fp_rate_per_bin),
            "fn_rate_per_bin": list(self.fn_rate_per_bin),
            "bin_spec": self.bin_spec.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioSpec":
        return cls(
            seed=int(data["seed"]),
            n_frames=int(data["n_frames"]),
            objects_per_frame=tuple(data["objects_per_frame"]),
            distance_range=tuple(data["distance_range"]),
            score_model=ScoreModel.from_dict(data["score_model"]),
            fp_rate_per_bin=tuple(data["fp_rate_per_bin"]),
            fn_rate_per_bin=tuple(data["fn_rate_per_bin"]),
            bin_spec=BinSpec.from_dict(data["bin_spec"]) if "bin_spec" in data else BinSpec(),
        )


def _rate_bin(distance: float, spec: BinSpec) -> int:
    """Bin index for rate lookups; distances beyond the range use the last bin."""
    return min(int(distance // spec.bin_width), spec.n_bins - 1)


def _place(
    rng: np.random.Generator,
    d_lo: float,
    d_hi: float,
    existing: list[tuple[float, float]],
) -> tuple[float, float] | None:
    """Rejection-sample a ground position at least MIN_SEPARATION from others."""
    for _ in range(_PLACEMENT_TRIES):
        distance = float(rng.uniform(d_lo, d_hi))
        bearing = float(rng.uniform(-_MAX_BEARING, _MAX_BEARING))
        x = distance * math.sin(bearing)
        z = distance * math.cos(bearing)
        if all(math.hypot(x - ex, z - ez) >= MIN_SEPARATION for ex, ez in existing):
            return x, z
    return None


def _car_dims(rng: np.random.Generator) -> tuple[float, float, float]:
    return tuple(
        base * (1.0 + _DIMS_JITTER * float(rng.uniform(-1.0, 1.0))) for base in CAR_DIMS
    )


def _project_bbox(
    x: float, y: float, z: float, dims: tuple[float, float, float]
) -> tuple[float, float, float, float]:
    """Crude pinhole projection so emitted files carry plausible 2D boxes."""
    fu, cu, cv = 721.5377, 609.5593, 172.854
    h, w, _ = dims
    depth = max(z, 0.5)
    left = cu + fu * (x - 0.5 * w) / depth
    right = cu + fu * (x + 0.5 * w) / depth
    top = cv + fu * (y - h) / depth
    bottom = cv + fu * y / depth
    left, right = sorted((_clamp(left, 0.0, 1242.0), _clamp(right, 0.0, 1242.0)))
    top, bottom = sorted((_clamp(top, 0.0, 375.0), _clamp(bottom, 0.0, 375.0)))
    return left, top, right, bottom


def _clamp(value: float, lo: float, hi: float) -> float:
    return min(max(value, lo), hi)


def _make_record(
    x: float,
    z: float,
    dims: tuple[float, float, float],
    yaw: float,
    score: float | None,
) -> KittiRecord:
    yaw = normalize_angle(yaw)
    return KittiRecord(
        class_name="Car",
        truncated=0.0,
        occluded=0,
        alpha=normalize_angle(yaw - math.atan2(x, z)),
        bbox_2d=_project_bbox(x, _CAMERA_Y, z, dims),
        dimensions=dims,
        location=(x, _CAMERA_Y, z),
        rotation_y=yaw,
        score=score,
    )


def _generate_frame(
    spec: ScenarioSpec, rng: np.random.Generator
) -> tuple[list[KittiRecord], list[KittiRecord], list[str]]:
    lo, hi = spec.objects_per_frame
    n_objects = int(rng.integers(lo, hi + 1))
    placements: list[tuple[float, float]] = []
    gt_records: list[KittiRecord] = []
    det_records: list[KittiRecord] = []
    kinds: list[str] = []
    for _ in range(n_objects):
        position = _place(rng, spec.distance_range[0], spec.distance_range[1], placements)
        if position is None:
            continue  # frame too crowded; deterministic either way
        placements.append(position)
        x, z = position
        dims = _car_dims(rng)
        yaw = float(rng.uniform(-math.pi, math.pi))
        gt_records.append(_make_record(x, z, dims, yaw, score=None))
        gt_distance = ground_distance(x, z)
        if float(rng.uniform()) < spec.fn_rate_per_bin[_rate_bin(gt_distance, spec.bin_spec)]:
            continue  # missed object: no detection emitted
        det_x = x + float(rng.uniform(-_CENTER_JITTER, _CENTER_JITTER))
        det_z = z + float(rng.uniform(-_CENTER_JITTER, _CENTER_JITTER))
        det_yaw = yaw + float(rng.uniform(-_YAW_JITTER, _YAW_JITTER))
        det_distance = ground_distance(det_x, det_z)
        sigma = spec.score_model.noise_std[_rate_bin(det_distance, spec.bin_spec)]
        score = spec.score_model.mean_at(det_distance)
        if sigma > 0.0:
            score += sigma * float(rng.standard_normal())
        det_records.append(
            _make_record(det_x, det_z, dims, det_yaw, score=_clamp(score, 0.0, 1.0))
        )
        kinds.append(TRUE_POSITIVE)
    for bin_index in range(spec.bin_spec.n_bins):
        if float(rng.uniform()) >= spec.fp_rate_per_bin[bin_index]:
            continue
        bin_lo, bin_hi = spec.bin_spec.edges(bin_index)
        position = _place(rng, bin_lo, bin_hi, placements)
        if position is None:
            continue
        placements.append(position)
        x, z = position
        dims = _car_dims(rng)
        yaw = float(rng.uniform(-math.pi, math.pi))
        local_mean = _clamp(spec.score_model.mean_at(ground_distance(x, z)), 0.0, 1.0)
        fraction = float(rng.uniform(_FP_SCORE_BAND[0], _FP_SCORE_BAND[1]))
        det_records.append(
            _make_record(x, z, dims, yaw, score=_clamp(fraction * local_mean, 0.0, 1.0))
        )
        kinds.append(FALSE_POSITIVE)
    return gt_records, det_records, kinds


def _generate(spec: ScenarioSpec) -> tuple[list[FramePair], list[tuple[str, ...]]]:
    rng = np.random.Generator(np.random.Philox(spec.seed))
    frames: list[FramePair] = []
    truths: list[tuple[str, ...]] = []
    for index in range(spec.n_frames):
        gt, det, kinds = _generate_frame(spec, rng)
        frames.append(FramePair(f"{index:06d}", gt, det))
        truths.append(tuple(kinds))
    return frames, truths


def generate(spec: ScenarioSpec) -> list[FramePair]:
    """Generate the dataset for a scenario; identical for identical specs."""
    return _generate(spec)[0]


def generate_with_truth(spec: ScenarioSpec) -> tuple[list[FramePair], list[tuple[str, ...]]]:
    """Like generate, also returning each detection's kind ('tp' or 'fp')."""
    return _generate(spec)


def known_optimal_counts(
    spec: ScenarioSpec, model: ThresholdModel
) -> tuple[int, int, int]:
    """(tp, fp, fn) after adaptive filtering, by exhaustive enumeration.

    Because generated objects never overlap each other, a surviving true
    detection always matches exactly its own ground-truth box and a
    surviving false positive matches nothing, so the counts follow
    directly from which detections pass the threshold.
    """
    frames, truths = _generate(spec)
    tp = fp = fn = 0
    for frame, kinds in zip(frames, truths):
        surviving_tp = 0
        for record, kind in zip(frame.detections, kinds):
            if record.score < threshold_at(model, record.ego_distance()):
                continue
            if kind == TRUE_POSITIVE:
                surviving_tp += 1
            else:
                fp += 1
        tp += surviving_tp
        fn += len(frame.ground_truth) - surviving_tp
    return tp, fp, fn


def scenario_totals(frames: Sequence[FramePair]) -> tuple[int, int]:
    """(total ground-truth objects, total detections) in a dataset."""
    return (
        sum(len(f.ground_truth) for f in frames),
        sum(len(f.detections) for f in frames),
    )
