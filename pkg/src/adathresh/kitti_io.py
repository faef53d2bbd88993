"""KITTI label and detection file I/O.

One object per line, whitespace-separated fields:

    col    field       type   notes
    0      type        str    class name, e.g. "Car"; "DontCare" marks
                              regions excluded from evaluation
    1      truncated   float
    2      occluded    int    0, 1, 2, 3 or -1 (unknown)
    3      alpha       float  observation angle, radians
    4-7    bbox        float  2D box: left, top, right, bottom (pixels)
    8-10   dimensions  float  height, width, length (meters)
    11-13  location    float  x, y, z in the camera frame (meters);
                              y points down and the location sits at the
                              center of the bottom face
    14     rotation_y  float  yaw about the camera y axis, radians
    15     score       float  detection files only

Ground-truth files carry 15 columns, detection files 16. Any run of
spaces or tabs separates fields; LF and CRLF inputs both parse, output
always uses LF. Only structural invariants are enforced (field count,
numeric fields, positive dimensions outside DontCare, bbox ordering);
value ranges such as truncation in [0, 1] are the producer's business.
"""

from __future__ import annotations

import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import Box3D, ground_distance

DONT_CARE = "DontCare"

_GT_FIELDS = 15
_DET_FIELDS = 16


class KittiIOError(Exception):
    """Base class for label and dataset I/O problems."""


class LabelError(KittiIOError):
    """Problem with a specific label line."""

    def __init__(self, message: str, line_no: int | None = None, path: str | None = None):
        super().__init__(message)
        self.message = message
        self.line_no = line_no
        self.path = path

    def __str__(self) -> str:
        where = ""
        if self.path:
            where += f"{self.path}: "
        if self.line_no is not None:
            where += f"line {self.line_no}: "
        return where + self.message


class LabelParseError(LabelError):
    """Line cannot be read at all: bad field count or non-numeric field."""


class LabelFormatError(LabelError):
    """Line parses but violates the expected shape or an invariant."""


class DatasetError(KittiIOError):
    """Unreadable or inconsistent input files."""


class MissingScoreError(KittiIOError):
    """A record without a score was used where a score is required."""


@dataclass(frozen=True)
class KittiRecord:
    """One labeled object. ``score`` is None for ground-truth records."""

    class_name: str
    truncated: float
    occluded: int
    alpha: float
    bbox_2d: tuple[float, float, float, float]
    dimensions: tuple[float, float, float]
    location: tuple[float, float, float]
    rotation_y: float
    score: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "bbox_2d", tuple(float(v) for v in self.bbox_2d))
        object.__setattr__(self, "dimensions", tuple(float(v) for v in self.dimensions))
        object.__setattr__(self, "location", tuple(float(v) for v in self.location))

    @property
    def is_dontcare(self) -> bool:
        return self.class_name == DONT_CARE

    def ego_distance(self) -> float:
        """Ground-plane distance from the ego vehicle, sqrt(x^2 + z^2)."""
        return ground_distance(self.location[0], self.location[2])

    def to_box3d(self) -> Box3D:
        """Oriented box for this record. Fails for DontCare rows (dims <= 0)."""
        return Box3D(center=self.location, dims=self.dimensions, yaw=self.rotation_y)


@dataclass(frozen=True)
class FramePair:
    """Ground truth and detections for one frame, matched by frame id."""

    frame_id: str
    ground_truth: tuple[KittiRecord, ...] = field(default_factory=tuple)
    detections: tuple[KittiRecord, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not self.frame_id:
            raise ValueError("frame_id must be non-empty")
        object.__setattr__(self, "ground_truth", tuple(self.ground_truth))
        object.__setattr__(self, "detections", tuple(self.detections))


def parse_label_file(text: str, expect_score: bool) -> list[KittiRecord]:
    """Parse one label file. Blank lines are skipped.

    expect_score selects the 16-column detection layout; a mismatch is a
    LabelFormatError, any other malformed line a LabelParseError. Both
    carry the 1-based line number.
    """
    records: list[KittiRecord] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) not in (_GT_FIELDS, _DET_FIELDS):
            raise LabelParseError(
                f"expected 15 or 16 fields, got {len(tokens)}", line_no=line_no
            )
        has_score = len(tokens) == _DET_FIELDS
        if has_score != expect_score:
            wanted = "16 fields (with score)" if expect_score else "15 fields (no score)"
            raise LabelFormatError(
                f"expected {wanted}, got {len(tokens)}", line_no=line_no
            )
        values = _parse_reals(tokens[1:], line_no)
        occluded = values[1]
        if occluded != int(occluded) or int(occluded) not in (-1, 0, 1, 2, 3):
            raise LabelFormatError(
                f"occluded must be one of -1,0,1,2,3, got {tokens[2]!r}", line_no=line_no
            )
        record = KittiRecord(
            class_name=tokens[0],
            truncated=values[0],
            occluded=int(occluded),
            alpha=values[2],
            bbox_2d=tuple(values[3:7]),
            dimensions=tuple(values[7:10]),
            location=tuple(values[10:13]),
            rotation_y=values[13],
            score=values[14] if has_score else None,
        )
        _check_invariants(record, line_no)
        records.append(record)
    return records


def _parse_reals(tokens: list[str], line_no: int) -> list[float]:
    out: list[float] = []
    for tok in tokens:
        try:
            v = float(tok)
        except ValueError:
            raise LabelParseError(f"non-numeric field {tok!r}", line_no=line_no) from None
        if not math.isfinite(v):
            raise LabelParseError(f"non-finite field {tok!r}", line_no=line_no)
        out.append(v)
    return out


def _check_invariants(record: KittiRecord, line_no: int) -> None:
    if not record.is_dontcare and min(record.dimensions) <= 0.0:
        raise LabelFormatError(
            f"non-positive dimensions {record.dimensions} for class {record.class_name!r}",
            line_no=line_no,
        )
    left, top, right, bottom = record.bbox_2d
    if right < left or bottom < top:
        raise LabelFormatError(
            f"inverted 2D bbox {record.bbox_2d}", line_no=line_no
        )


def serialize_record(record: KittiRecord) -> str:
    """One label line; reals carry six fractional digits."""
    fields = [
        record.class_name,
        _fmt(record.truncated),
        str(record.occluded),
        _fmt(record.alpha),
        *(_fmt(v) for v in record.bbox_2d),
        *(_fmt(v) for v in record.dimensions),
        *(_fmt(v) for v in record.location),
        _fmt(record.rotation_y),
    ]
    if record.score is not None:
        fields.append(_fmt(record.score))
    return " ".join(fields)


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def serialize_records(records: list[KittiRecord]) -> str:
    """Serialize records one per line with LF endings; empty list gives ''."""
    return "".join(serialize_record(r) + "\n" for r in records)


def write_label_file(path: str | Path, records: list[KittiRecord]) -> None:
    """Serialize records to path atomically (temp file + rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(serialize_records(records))
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def load_dataset(gt_dir: str | Path, det_dir: str | Path, jobs: int = 1) -> list[FramePair]:
    """Load matching <frame_id>.txt files from both directories.

    Frames present only in gt_dir get empty detections; a detection file
    without a ground-truth counterpart is a DatasetError naming the
    frame. The result is sorted by frame_id regardless of jobs.
    """
    gt_dir = Path(gt_dir)
    det_dir = Path(det_dir)
    if not gt_dir.is_dir():
        raise DatasetError(f"ground-truth directory not found: {gt_dir}")
    if not det_dir.is_dir():
        raise DatasetError(f"detection directory not found: {det_dir}")
    gt_files = {p.stem: p for p in gt_dir.glob("*.txt")}
    det_files = {p.stem: p for p in det_dir.glob("*.txt")}
    orphans = sorted(set(det_files) - set(gt_files))
    if orphans:
        raise DatasetError(
            "detection files without ground-truth counterparts: " + ", ".join(orphans)
        )
    frame_ids = sorted(gt_files)

    def _load(frame_id: str) -> FramePair:
        gt = _read_records(gt_files[frame_id], expect_score=False)
        if frame_id in det_files:
            det = _read_records(det_files[frame_id], expect_score=True)
        else:
            det = []
        return FramePair(frame_id, gt, det)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_load, frame_ids))
    return [_load(frame_id) for frame_id in frame_ids]


def _read_records(path: Path, expect_score: bool) -> list[KittiRecord]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_label_file(text, expect_score=expect_score)
    except LabelError as exc:
        exc.path = str(path)
        raise
