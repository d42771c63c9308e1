"""
SORT state machine over rotated boxes.

Per frame: filter + NMS -> predict -> associate -> update -> births -> ageing/kills -> emission.
"""

import logging
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from xentrack.assignment.association import associate
from xentrack.errors import FrameOrderError, XenTrackError
from xentrack.filter.kalman import DEFAULT_FILTER, FilterConfig, initiate, predict, state_to_box, update
from xentrack.geometry.conversions import rotated_box_to_quad
from xentrack.geometry.iou import rotated_nms
from xentrack.geometry.types import RotatedBox
from xentrack.tracker.types import Detection, Track, TrackerConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Emission:
    trace_id: int
    box: RotatedBox
    score: float


def canonical_order(detections: Sequence[Detection]) -> List[Detection]:
    """Score descending, then canonical quad coordinates; independent of input order."""
    return sorted(detections, key=lambda d: (-d.score, rotated_box_to_quad(d.box).flat(), d.box.sort_key()))


class SortTracker:
    """
    One tracker per video. Not thread-safe; may be handed between threads.
    Trace ids start at 1 and are never reused.
    """

    def __init__(self, config: Optional[TrackerConfig] = None, filter_config: Optional[FilterConfig] = None):
        self.config = config or TrackerConfig()
        self.filter_config = filter_config or DEFAULT_FILTER
        self.tracks: List[Track] = []
        self.next_id = 1
        self.last_frame: Optional[int] = None
        self.frame_count = 0
        self.tracks_born = 0
        self.max_concurrent = 0
        self.timings: Dict[str, float] = {}

    def _prepare(self, detections: Sequence[Detection]) -> List[Detection]:
        cfg = self.config
        candidates = canonical_order([d for d in detections if d.score >= cfg.score_threshold])
        kept = rotated_nms(candidates, cfg.nms_iou)
        return [candidates[i] for i in sorted(kept)]

    def step(self, frame_index: int, detections: Sequence[Detection]) -> List[Emission]:
        """Advance one frame and return the tracks matched in it with min_hits consecutive hits, by trace id."""
        if self.last_frame is not None and frame_index <= self.last_frame:
            raise FrameOrderError(frame_index, self.last_frame)
        for d in detections:
            if d.frame != frame_index:
                raise XenTrackError(f"detection from frame {d.frame} passed to frame {frame_index}")

        cfg = self.config
        self.last_frame = frame_index
        self.frame_count += 1
        timings: Dict[str, float] = {}

        t0 = time.perf_counter()
        dets = self._prepare(detections)
        t1 = time.perf_counter()
        timings["nms"] = t1 - t0

        for track in self.tracks:
            track.state = predict(track.state, self.filter_config)
            track.age += 1
        predicted = [state_to_box(t.state) for t in self.tracks]
        t2 = time.perf_counter()
        timings["predict"] = t2 - t1

        assoc = associate(predicted, [d.box for d in dets], cfg.iou_gate, cfg.iou_mode, cfg.gate_mode)
        t3 = time.perf_counter()
        timings["associate"] = t3 - t2

        emit_ids = set()
        for row, col in assoc.matches:
            track, det = self.tracks[row], dets[col]
            track.state = update(track.state, det.box, self.filter_config, cfg.track_angle)
            track.hits += 1
            track.time_since_update = 0
            track.last_box = det.box
            track.last_score = det.score
            track.history.append((frame_index, det.box, det.score))
            # Early-video exception: matched tracks are emitted during the first min_hits frames
            if track.hits >= cfg.min_hits or self.frame_count <= cfg.min_hits:
                emit_ids.add(track.trace_id)

        for col in assoc.unmatched_detections:
            det = dets[col]
            track = Track(
                trace_id=self.next_id,
                state=initiate(det.box, self.filter_config),
                last_box=det.box,
                last_score=det.score,
                history=[(frame_index, det.box, det.score)],
            )
            self.next_id += 1
            self.tracks_born += 1
            self.tracks.append(track)
            if track.hits >= cfg.min_hits:
                emit_ids.add(track.trace_id)
            logger.debug(f"frame {frame_index}: born trace {track.trace_id}")

        for row in assoc.unmatched_tracks:
            track = self.tracks[row]
            track.time_since_update += 1
            track.hits = 0

        alive = []
        for track in self.tracks:
            if track.time_since_update > cfg.max_age:
                logger.debug(f"frame {frame_index}: killed trace {track.trace_id} after {track.time_since_update} missed frames")
                continue
            alive.append(track)
        self.tracks = alive
        self.max_concurrent = max(self.max_concurrent, len(self.tracks))
        t4 = time.perf_counter()
        timings["update"] = t4 - t3
        self.timings = timings

        emitted = []
        for track in sorted(self.tracks, key=lambda t: t.trace_id):
            if track.trace_id not in emit_ids:
                continue
            box = track.last_box if cfg.emit_raw else state_to_box(track.state)
            emitted.append(Emission(track.trace_id, box, track.last_score))
        return emitted
