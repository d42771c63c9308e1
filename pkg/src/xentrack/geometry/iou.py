"""
Intersection-over-union for rotated boxes, batched IoU matrices and rotated NMS.
"""

import logging
from enum import Enum
from typing import List, Protocol, Sequence

import numpy as np

from xentrack.geometry.clipping import clip_points
from xentrack.geometry.types import Point, RotatedBox, signed_area

logger = logging.getLogger(__name__)


class IoUMode(str, Enum):
    ROTATED = "rotated"
    AABB = "aabb"


class ScoredBox(Protocol):
    box: RotatedBox
    score: float


def _clip_iou(a: RotatedBox, ca: Sequence[Point], b: RotatedBox, cb: Sequence[Point]) -> float:
    # Fixed argument order makes the result bit-identical under swapping
    if b.sort_key() < a.sort_key():
        a, ca, b, cb = b, cb, a, ca
    ring = clip_points(ca, cb)
    if not ring:
        return 0.0
    inter = abs(signed_area(ring))
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return min(1.0, max(0.0, inter / union))


def rotated_iou(a: RotatedBox, b: RotatedBox) -> float:
    """Exact IoU of two rotated rectangles."""
    ax1, ay1, ax2, ay2 = a.aabb()
    bx1, by1, bx2, by2 = b.aabb()
    if min(ax2, bx2) <= max(ax1, bx1) or min(ay2, by2) <= max(ay1, by1):
        return 0.0
    return _clip_iou(a, a.corners(), b, b.corners())


def aabb_iou(a: RotatedBox, b: RotatedBox) -> float:
    """IoU of the axis-aligned bounds of two rotated boxes."""
    ax1, ay1, ax2, ay2 = a.aabb()
    bx1, by1, bx2, by2 = b.aabb()
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = (ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter
    return min(1.0, inter / union)


def _bounds(boxes: Sequence[RotatedBox]) -> np.ndarray:
    return np.array([b.aabb() for b in boxes], dtype=np.float64).reshape(-1, 4)


def iou_matrix(
    a: Sequence[RotatedBox],
    b: Sequence[RotatedBox],
    mode: IoUMode = IoUMode.ROTATED,
) -> np.ndarray:
    """
    Pairwise IoU, shape (len(a), len(b)).
    Exact clipping runs only on pairs whose axis-aligned bounds overlap.
    """
    out = np.zeros((len(a), len(b)), dtype=np.float64)
    if len(a) == 0 or len(b) == 0:
        return out

    ba, bb = _bounds(a), _bounds(b)
    iw = np.minimum(ba[:, None, 2], bb[None, :, 2]) - np.maximum(ba[:, None, 0], bb[None, :, 0])
    ih = np.minimum(ba[:, None, 3], bb[None, :, 3]) - np.maximum(ba[:, None, 1], bb[None, :, 1])
    overlap = (iw > 0) & (ih > 0)

    if IoUMode(mode) is IoUMode.AABB:
        inter = np.where(overlap, iw * ih, 0.0)
        area_a = (ba[:, 2] - ba[:, 0]) * (ba[:, 3] - ba[:, 1])
        area_b = (bb[:, 2] - bb[:, 0]) * (bb[:, 3] - bb[:, 1])
        union = area_a[:, None] + area_b[None, :] - inter
        return np.minimum(1.0, inter / union)

    corners_a = [box.corners() for box in a]
    corners_b = [box.corners() for box in b]
    rows, cols = np.nonzero(overlap)
    for i, j in zip(rows.tolist(), cols.tolist()):
        out[i, j] = _clip_iou(a[i], corners_a[i], b[j], corners_b[j])
    return out


def rotated_nms(
    dets: Sequence[ScoredBox],
    iou_threshold: float,
    mode: IoUMode = IoUMode.ROTATED,
) -> List[int]:
    """
    Greedy NMS by descending score (ties: ascending input index).
    Returns kept input indices in descending-score order.
    """
    if not dets:
        return []

    order = sorted(range(len(dets)), key=lambda i: (-dets[i].score, i))
    ious = iou_matrix([dets[i].box for i in order], [dets[i].box for i in order], mode)

    suppressed = np.zeros(len(order), dtype=bool)
    kept: List[int] = []
    for pos in range(len(order)):
        if suppressed[pos]:
            continue
        kept.append(order[pos])
        suppressed |= ious[pos] >= iou_threshold

    if len(kept) < len(dets):
        logger.debug(f"NMS kept {len(kept)}/{len(dets)} boxes at IoU {iou_threshold}")
    return kept
