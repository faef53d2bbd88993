"""Record builders and independent oracles shared across test modules.

The oracles deliberately re-derive results through different means than
the library: Monte-Carlo point inclusion instead of polygon clipping, a
from-scratch greedy matcher, and exhaustive search over one-to-one
assignments.
"""

from __future__ import annotations

import math
import random
from functools import lru_cache

import numpy as np

from adathresh.geometry import Box3D
from adathresh.kitti_io import KittiRecord

CAR_DIMS = (1.5, 1.7, 4.0)  # height, width, length


def make_box(
    x: float = 0.0,
    z: float = 10.0,
    *,
    y: float = 1.65,
    dims: tuple[float, float, float] = CAR_DIMS,
    yaw: float = 0.0,
) -> Box3D:
    return Box3D(center=(x, y, z), dims=dims, yaw=yaw)


def make_record(
    x: float = 0.0,
    z: float = 10.0,
    *,
    y: float = 1.65,
    dims: tuple[float, float, float] = CAR_DIMS,
    yaw: float = 0.0,
    score: float | None = None,
    class_name: str = "Car",
    bbox: tuple[float, float, float, float] = (100.0, 100.0, 200.0, 160.0),
    truncated: float = 0.0,
    occluded: int = 0,
) -> KittiRecord:
    return KittiRecord(
        class_name=class_name,
        truncated=truncated,
        occluded=occluded,
        alpha=0.0,
        bbox_2d=bbox,
        dimensions=dims,
        location=(x, y, z),
        rotation_y=yaw,
        score=score,
    )


def footprint_corners(box: Box3D) -> list[tuple[float, float]]:
    """Ground-plane corner coordinates of a box footprint."""
    c = math.cos(box.yaw)
    s = math.sin(box.yaw)
    hu = 0.5 * box.length
    hv = 0.5 * box.width
    corners = []
    for su in (-1.0, 1.0):
        for sv in (-1.0, 1.0):
            u, v = su * hu, sv * hv
            corners.append((box.center[0] + u * c + v * s, box.center[2] - u * s + v * c))
    return corners


def _inside_footprint(box: Box3D, xs: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Vectorized point-in-rotated-rectangle test in the ground plane."""
    c = math.cos(box.yaw)
    s = math.sin(box.yaw)
    dx = xs - box.center[0]
    dz = zs - box.center[2]
    u = dx * c - dz * s
    v = dx * s + dz * c
    return (np.abs(u) <= 0.5 * box.length) & (np.abs(v) <= 0.5 * box.width)


def mc_iou_bev(a: Box3D, b: Box3D, n: int = 1_000_000, seed: int = 0) -> float:
    """Monte-Carlo BEV IoU estimate by uniform sampling over the joint AABB."""
    corners = footprint_corners(a) + footprint_corners(b)
    xs = [p[0] for p in corners]
    zs = [p[1] for p in corners]
    rng = np.random.default_rng(seed)
    px = rng.uniform(min(xs), max(xs), n)
    pz = rng.uniform(min(zs), max(zs), n)
    in_a = _inside_footprint(a, px, pz)
    in_b = _inside_footprint(b, px, pz)
    union = np.count_nonzero(in_a | in_b)
    if union == 0:
        return 0.0
    return np.count_nonzero(in_a & in_b) / union


def brute_force_match(
    gt: list[KittiRecord],
    det: list[KittiRecord],
    iou_fn,
    iou_threshold: float,
) -> list[tuple[int, int]]:
    """From-scratch greedy matcher; returns (det_idx, gt_idx) pairs.

    Detections in descending score order (equal scores: lower index
    first) each take the free ground-truth box of highest IoU at or
    above the threshold; IoU ties go to the lower ground-truth index.
    """
    gt_boxes = [r.to_box3d() for r in gt]
    det_boxes = [r.to_box3d() for r in det]
    order = sorted(range(len(det)), key=lambda i: (-det[i].score, i))
    free = list(range(len(gt)))
    pairs: list[tuple[int, int]] = []
    for det_idx in order:
        best_gt = None
        best_iou = -1.0
        for gt_idx in free:
            value = iou_fn(det_boxes[det_idx], gt_boxes[gt_idx])
            if value >= iou_threshold and value > best_iou:
                best_gt, best_iou = gt_idx, value
        if best_gt is not None:
            free.remove(best_gt)
            pairs.append((det_idx, best_gt))
    return pairs


def optimal_assignment(
    iou_matrix: list[list[float]], iou_threshold: float
) -> tuple[int, float]:
    """Best (matched count, total IoU) over all one-to-one assignments.

    iou_matrix is indexed [det][gt]. Exhaustive search with memoization
    on (next detection, used-gt bitmask); intended for instances up to
    about 6x6.
    """
    n_det = len(iou_matrix)
    n_gt = len(iou_matrix[0]) if n_det else 0

    @lru_cache(maxsize=None)
    def best_from(det_idx: int, used: int) -> tuple[int, float]:
        if det_idx == n_det:
            return 0, 0.0
        best = best_from(det_idx + 1, used)
        for gt_idx in range(n_gt):
            if used & (1 << gt_idx):
                continue
            value = iou_matrix[det_idx][gt_idx]
            if value >= iou_threshold:
                count, total = best_from(det_idx + 1, used | (1 << gt_idx))
                candidate = (count + 1, total + value)
                if candidate > best:
                    best = candidate
        return best

    result = best_from(0, 0)
    best_from.cache_clear()
    return result


def _random_dims(rng: random.Random) -> tuple[float, float, float]:
    return (rng.uniform(1.3, 1.7), rng.uniform(1.5, 1.9), rng.uniform(3.6, 4.4))


def random_scene(
    rng: random.Random, max_gt: int = 6, max_det: int = 6
) -> tuple[list[KittiRecord], list[KittiRecord]]:
    """Random single-frame scene with contested overlaps.

    Most detections are jittered copies of some ground-truth box, so
    IoUs spread across the matching threshold and occasionally cross.
    """
    gt: list[KittiRecord] = []
    for _ in range(rng.randint(0, max_gt)):
        gt.append(
            make_record(
                rng.uniform(-10.0, 10.0),
                rng.uniform(5.0, 30.0),
                dims=_random_dims(rng),
                yaw=rng.uniform(-math.pi, math.pi),
            )
        )
    det: list[KittiRecord] = []
    for _ in range(rng.randint(0, max_det)):
        if gt and rng.random() < 0.75:
            base = gt[rng.randrange(len(gt))]
            det.append(
                make_record(
                    base.location[0] + rng.uniform(-1.0, 1.0),
                    base.location[2] + rng.uniform(-1.0, 1.0),
                    dims=tuple(v * rng.uniform(0.9, 1.1) for v in base.dimensions),
                    yaw=base.rotation_y + rng.uniform(-0.3, 0.3),
                    score=rng.random(),
                )
            )
        else:
            det.append(
                make_record(
                    rng.uniform(-10.0, 10.0),
                    rng.uniform(5.0, 30.0),
                    dims=_random_dims(rng),
                    yaw=rng.uniform(-math.pi, math.pi),
                    score=rng.random(),
                )
            )
    return gt, det
