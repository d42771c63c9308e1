"""
Track-detection association: Hungarian matching on 1 - IoU with an IoU gate.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np

from xentrack.assignment.hungarian import hungarian
from xentrack.geometry.iou import IoUMode, iou_matrix
from xentrack.geometry.types import RotatedBox


class GateMode(str, Enum):
    # Demote gated pairs after the optimal assignment (classic SORT)
    POST = "post"
    # Replace gated entries by a large finite cost before solving
    PREMASK = "premask"


@dataclass(frozen=True)
class Association:
    matches: List[Tuple[int, int]] = field(default_factory=list)
    unmatched_tracks: List[int] = field(default_factory=list)
    unmatched_detections: List[int] = field(default_factory=list)


def gated_cost(ious: np.ndarray, iou_gate: float, mode: GateMode = GateMode.POST) -> np.ndarray:
    """Cost matrix 1 - IoU; in premask mode gated entries cost more than any full assignment."""
    cost = 1.0 - ious
    if GateMode(mode) is GateMode.PREMASK and cost.size:
        big = float(min(cost.shape) + 1)
        cost = np.where(ious < iou_gate, big, cost)
    return cost


def match_ious(
    ious: np.ndarray,
    iou_gate: float,
    mode: GateMode = GateMode.POST,
) -> Association:
    """Associate from a precomputed IoU matrix (rows = tracks, cols = detections)."""
    n_tracks, n_dets = ious.shape
    pairs = hungarian(gated_cost(ious, iou_gate, mode))

    matches = []
    matched_rows, matched_cols = set(), set()
    for row, col in pairs:
        if ious[row, col] < iou_gate:
            continue
        matches.append((row, col))
        matched_rows.add(row)
        matched_cols.add(col)

    return Association(
        matches=matches,
        unmatched_tracks=[i for i in range(n_tracks) if i not in matched_rows],
        unmatched_detections=[j for j in range(n_dets) if j not in matched_cols],
    )


def associate(
    predicted: Sequence[RotatedBox],
    detections: Sequence[RotatedBox],
    iou_gate: float,
    iou_mode: IoUMode = IoUMode.ROTATED,
    gate_mode: GateMode = GateMode.POST,
) -> Association:
    """Match predicted track boxes to detection boxes."""
    ious = iou_matrix(predicted, detections, iou_mode)
    return match_ious(ious, iou_gate, gate_mode)
