"""
Tracking evaluation: CLEAR-MOT counts (MOTA, MOTP, switches, fragmentations)
and identity metrics (IDF1, IDP, IDR) from the optimal id-to-id bijection.

Per-frame matching order:
1. persistence: a GT matched to prediction p in the previous frame keeps p
   when p is present and IoU >= match_iou
2. Hungarian on 1 - IoU over the remaining pairs, entries below the gate pre-masked
"""

import logging
from dataclasses import dataclass, fields
from typing import Dict, List, Mapping, Tuple

import numpy as np

from xentrack.assignment.association import GateMode, match_ious
from xentrack.assignment.hungarian import hungarian
from xentrack.errors import VideoMismatchError
from xentrack.geometry.conversions import quad_to_rotated_box
from xentrack.geometry.iou import iou_matrix
from xentrack.metrics.types import GroundTruth, MetricsReport, MetricsSummary
from xentrack.tracker.types import TrackSet

logger = logging.getLogger(__name__)


@dataclass
class MotCounts:
    """Additive counts; summaries of several videos are computed from their sum."""
    matches: int = 0
    fp: int = 0
    fn: int = 0
    id_switches: int = 0
    fragmentations: int = 0
    iou_sum: float = 0.0
    total_gt: int = 0
    total_pred: int = 0
    idtp: int = 0

    def __add__(self, other: "MotCounts") -> "MotCounts":
        return MotCounts(**{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)})


def _ratio(num: float, den: float, both_empty: bool) -> float:
    if den > 0:
        return num / den
    return 1.0 if both_empty else 0.0


def summarize(c: MotCounts) -> MetricsSummary:
    both_empty = c.total_gt == 0 and c.total_pred == 0
    return MetricsSummary(
        mota=1.0 - (c.fn + c.fp + c.id_switches) / max(c.total_gt, 1),
        motp=c.iou_sum / c.matches if c.matches else 0.0,
        idf1=_ratio(2 * c.idtp, c.total_gt + c.total_pred, both_empty),
        idp=_ratio(c.idtp, c.total_pred, both_empty),
        idr=_ratio(c.idtp, c.total_gt, both_empty),
        idtp=c.idtp,
        idfp=c.total_pred - c.idtp,
        idfn=c.total_gt - c.idtp,
        id_switches=c.id_switches,
        fragmentations=c.fragmentations,
        fp=c.fp,
        fn=c.fn,
        matches=c.matches,
        total_gt=c.total_gt,
        total_pred=c.total_pred,
    )


def _frame_ious(pred: TrackSet, gt: GroundTruth, frame: int) -> Tuple[List[int], List[int], np.ndarray]:
    gt_insts = gt.frames.get(frame, [])
    pred_insts = pred.frames.get(frame, [])
    ious = iou_matrix(
        [quad_to_rotated_box(g.quad) for g in gt_insts],
        [quad_to_rotated_box(p.quad) for p in pred_insts],
    )
    return [g.track_id for g in gt_insts], [p.trace_id for p in pred_insts], ious


def _identity_true_positives(pair_counts: Dict[Tuple[int, int], int], gt_ids: List[int], pred_ids: List[int]) -> int:
    """Matched detections under the id bijection maximizing them."""
    if not pair_counts:
        return 0
    row = {g: i for i, g in enumerate(gt_ids)}
    col = {p: j for j, p in enumerate(pred_ids)}
    counts = np.zeros((len(gt_ids), len(pred_ids)))
    for (g, p), n in pair_counts.items():
        counts[row[g], col[p]] = n
    return int(sum(counts[i, j] for i, j in hungarian(-counts)))


def count_video(pred: TrackSet, gt: GroundTruth, match_iou: float = 0.5) -> MotCounts:
    """Raw counts of one video."""
    if pred.video_id != gt.video_id:
        raise VideoMismatchError([pred.video_id], [gt.video_id])

    c = MotCounts()
    previous: Dict[int, int] = {}
    last_id: Dict[int, int] = {}
    matched_at_last_presence: Dict[int, bool] = {}
    pair_counts: Dict[Tuple[int, int], int] = {}

    for frame in sorted(set(pred.frames) | set(gt.frames)):
        gt_ids, pred_ids, ious = _frame_ious(pred, gt, frame)
        c.total_gt += len(gt_ids)
        c.total_pred += len(pred_ids)

        hits = np.argwhere(ious >= match_iou)
        for i, j in hits.tolist():
            key = (gt_ids[i], pred_ids[j])
            pair_counts[key] = pair_counts.get(key, 0) + 1

        pred_col = {p: j for j, p in enumerate(pred_ids)}
        matched: Dict[int, int] = {}
        for i, g in enumerate(gt_ids):
            p = previous.get(g)
            if p is not None and p in pred_col and ious[i, pred_col[p]] >= match_iou:
                matched[i] = pred_col[p]

        rows = [i for i in range(len(gt_ids)) if i not in matched]
        taken = set(matched.values())
        cols = [j for j in range(len(pred_ids)) if j not in taken]
        if rows and cols:
            assoc = match_ious(ious[np.ix_(rows, cols)], match_iou, GateMode.PREMASK)
            for r, k in assoc.matches:
                matched[rows[r]] = cols[k]

        current: Dict[int, int] = {}
        for i, g in enumerate(gt_ids):
            if i not in matched:
                c.fn += 1
                matched_at_last_presence[g] = False
                continue
            j = matched[i]
            p = pred_ids[j]
            if g in last_id:
                if last_id[g] != p:
                    c.id_switches += 1
                if not matched_at_last_presence[g]:
                    c.fragmentations += 1
            last_id[g] = p
            matched_at_last_presence[g] = True
            current[g] = p
            c.matches += 1
            c.iou_sum += float(ious[i, j])
        c.fp += len(pred_ids) - len(matched)
        previous = current

    c.idtp = _identity_true_positives(pair_counts, gt.track_ids(), pred.trace_ids())
    return c


def evaluate(pred: TrackSet, gt: GroundTruth, match_iou: float = 0.5) -> MetricsReport:
    """Metrics of one video; per_video holds the same summary under its video id."""
    summary = summarize(count_video(pred, gt, match_iou))
    logger.info(f"video '{gt.video_id}': MOTA {summary.mota:.4f}, IDF1 {summary.idf1:.4f}, {summary.id_switches} switches")
    return MetricsReport(**summary.model_dump(), per_video={gt.video_id: summary})


def evaluate_many(
    preds: Mapping[str, TrackSet],
    gts: Mapping[str, GroundTruth],
    match_iou: float = 0.5,
) -> MetricsReport:
    """Corpus report: counts summed over videos, summaries recomputed from the sums."""
    only_pred = set(preds) - set(gts)
    only_gt = set(gts) - set(preds)
    if only_pred or only_gt:
        raise VideoMismatchError(only_pred, only_gt)

    total = MotCounts()
    per_video: Dict[str, MetricsSummary] = {}
    for video_id in sorted(gts):
        counts = count_video(preds[video_id], gts[video_id], match_iou)
        per_video[video_id] = summarize(counts)
        total = total + counts

    summary = summarize(total)
    return MetricsReport(**summary.model_dump(), per_video=per_video)
