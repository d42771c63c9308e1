"""
Video Pipeline
Folds the SORT step over the frames of one video and collects the emitted tracks.
"""

import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from xentrack.errors import TrackingError, XenTrackError
from xentrack.filter.kalman import FilterConfig
from xentrack.geometry.conversions import rotated_box_to_quad
from xentrack.tracker.sort import Emission, SortTracker
from xentrack.tracker.types import Detection, TrackedInstance, TrackerConfig, TrackingStats, TrackSet

logger = logging.getLogger(__name__)

FrameDetections = Tuple[int, Sequence[Detection]]


def _instances(emitted: List[Emission]) -> List[TrackedInstance]:
    return [TrackedInstance(e.trace_id, rotated_box_to_quad(e.box), e.score) for e in emitted]


def _step(tracker: SortTracker, video_id: str, frame_index: int, dets: Sequence[Detection]) -> List[TrackedInstance]:
    try:
        return _instances(tracker.step(frame_index, dets))
    except TrackingError:
        raise
    except XenTrackError as e:
        raise TrackingError(video_id, frame_index, str(e)) from e


def run_video(
    config: Optional[TrackerConfig],
    frames: Iterable[FrameDetections],
    video_id: str = "",
    filter_config: Optional[FilterConfig] = None,
    timings: Optional[Dict[str, List[float]]] = None,
) -> TrackSet:
    """
    Track one video.

    Frame indices must be strictly increasing. Missing indices between two
    given frames are stepped with no detections, so tracks age across gaps.
    When `timings` is given, per-stage step durations are appended to it.
    """
    tracker = SortTracker(config, filter_config)
    out: Dict[int, List[TrackedInstance]] = {}
    previous: Optional[int] = None

    def run(frame_index: int, dets: Sequence[Detection]):
        out[frame_index] = _step(tracker, video_id, frame_index, dets)
        if timings is not None:
            for stage, seconds in tracker.timings.items():
                timings.setdefault(stage, []).append(seconds)

    for frame_index, dets in frames:
        if previous is not None and frame_index <= previous:
            raise TrackingError(video_id, frame_index, f"out-of-order frame: {frame_index} after {previous}")
        if previous is not None:
            for missing in range(previous + 1, frame_index):
                run(missing, [])
        run(frame_index, dets)
        previous = frame_index

    stats = TrackingStats(
        tracks_born=tracker.tracks_born,
        max_concurrent=tracker.max_concurrent,
        frames=len(out),
    )
    logger.info(
        f"video '{video_id}': {stats.frames} frames, {stats.tracks_born} tracks born, "
        f"max {stats.max_concurrent} concurrent"
    )
    return TrackSet(video_id=video_id, frames=out, stats=stats, meta={"tracker": tracker.config.model_dump(mode="json")})
