"""
Tracker data model: detections, tracks, configuration and per-video output.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from xentrack.assignment.association import GateMode
from xentrack.errors import XenTrackError
from xentrack.filter.kalman import KalmanState
from xentrack.geometry.iou import IoUMode
from xentrack.geometry.types import Quad, RotatedBox


@dataclass(frozen=True)
class Detection:
    """One scored rotated text instance in one frame."""
    frame: int
    box: RotatedBox
    score: float

    def __post_init__(self):
        if self.frame < 0:
            raise XenTrackError(f"frame index must be non-negative, got {self.frame}")
        if not (math.isfinite(self.score) and 0.0 <= self.score <= 1.0):
            raise XenTrackError(f"score must lie in [0, 1], got {self.score}")


@dataclass
class Track:
    """Persistent identity. Mutated only by the tracker that owns it."""
    trace_id: int
    state: KalmanState
    # Consecutive matches; reset by a miss
    hits: int = 1
    age: int = 0
    time_since_update: int = 0
    last_box: Optional[RotatedBox] = None
    last_score: float = 0.0
    history: List[Tuple[int, RotatedBox, float]] = field(default_factory=list)


class TrackerConfig(BaseModel):
    """Lifecycle and association parameters of the SORT tracker."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    iou_gate: float = Field(0.3, ge=0.0, le=1.0, description="Minimum IoU for a track-detection match.")
    max_age: int = Field(3, ge=0, description="Frames a track survives without a match.")
    min_hits: int = Field(2, ge=1, description="Consecutive matches before a track is emitted.")
    score_threshold: float = Field(0.1, ge=0.0, le=1.0, description="Detections scoring below this are dropped.")
    nms_iou: float = Field(0.5, ge=0.0, le=1.0, description="IoU at which rotated NMS suppresses a detection.")
    track_angle: bool = Field(True, description="Filter theta; when off, theta is copied from the matched detection.")
    emit_raw: bool = Field(False, description="Emit the matched detection box instead of the filtered box.")
    iou_mode: IoUMode = Field(IoUMode.ROTATED, description="IoU used for association: rotated or axis-aligned bounds.")
    gate_mode: GateMode = Field(GateMode.POST, description="Apply the IoU gate after assignment or by pre-masking costs.")


@dataclass(frozen=True)
class TrackedInstance:
    """One emitted box of one trace in one frame."""
    trace_id: int
    quad: Quad
    score: float


@dataclass(frozen=True)
class TrackingStats:
    tracks_born: int = 0
    max_concurrent: int = 0
    frames: int = 0


@dataclass
class TrackSet:
    """Emitted tracks of one video, frame index -> instances (sorted by trace id)."""
    video_id: str
    frames: Dict[int, List[TrackedInstance]] = field(default_factory=dict)
    stats: TrackingStats = field(default_factory=TrackingStats)
    meta: Dict[str, Any] = field(default_factory=dict)

    def trace_ids(self) -> List[int]:
        return sorted({inst.trace_id for insts in self.frames.values() for inst in insts})

    def instance_count(self) -> int:
        return sum(len(insts) for insts in self.frames.values())
