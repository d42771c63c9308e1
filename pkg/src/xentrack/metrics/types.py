"""
Evaluation data model: ground truth, metric reports and synthetic scenario settings.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from xentrack.errors import XenTrackError
from xentrack.geometry.types import Quad


@dataclass(frozen=True)
class GroundTruthInstance:
    track_id: int
    quad: Quad
    # Carried through I/O, never used by the metrics
    transcription: Optional[str] = None


@dataclass
class GroundTruth:
    """Annotated trajectories of one video, frame index -> instances."""
    video_id: str
    frames: Dict[int, List[GroundTruthInstance]] = field(default_factory=dict)

    def __post_init__(self):
        for frame, instances in self.frames.items():
            if frame < 0:
                raise XenTrackError(f"video '{self.video_id}': negative frame index {frame}")
            ids = [inst.track_id for inst in instances]
            if len(ids) != len(set(ids)):
                dup = sorted({i for i in ids if ids.count(i) > 1})
                raise XenTrackError(f"video '{self.video_id}' frame {frame}: duplicate track ids {dup}")

    def track_ids(self) -> List[int]:
        return sorted({inst.track_id for insts in self.frames.values() for inst in insts})

    def instance_count(self) -> int:
        return sum(len(insts) for insts in self.frames.values())


class MetricsSummary(BaseModel):
    """CLEAR-MOT and identity metrics of one video or of a whole corpus."""
    mota: float = Field(..., description="1 - (fn + fp + id_switches) / total_gt; may be negative.")
    motp: float = Field(..., description="Mean IoU of matched pairs (0 when nothing matched).")
    idf1: float = Field(..., ge=0.0, le=1.0)
    idp: float = Field(..., ge=0.0, le=1.0)
    idr: float = Field(..., ge=0.0, le=1.0)
    idtp: int = Field(..., ge=0)
    idfp: int = Field(..., ge=0)
    idfn: int = Field(..., ge=0)
    id_switches: int = Field(..., ge=0)
    fragmentations: int = Field(..., ge=0)
    fp: int = Field(..., ge=0)
    fn: int = Field(..., ge=0)
    matches: int = Field(..., ge=0)
    total_gt: int = Field(..., ge=0)
    total_pred: int = Field(..., ge=0)


class MetricsReport(MetricsSummary):
    per_video: Dict[str, MetricsSummary] = Field(default_factory=dict)


Range = Tuple[float, float]


class ScenarioConfig(BaseModel):
    """
    Synthetic scenario: constant-velocity rotated boxes with jitter, drops and false positives.
    Draw order of the generator is fixed, so a seed pins the whole stream.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = Field(..., description="Seed of the PCG64 generator.")
    video_id: str = Field("synthetic", min_length=1)
    n_tracks: int = Field(10, ge=0)
    frames: int = Field(100, ge=0)
    image_width: float = Field(1920.0, gt=0.0)
    image_height: float = Field(1080.0, gt=0.0)

    width_range: Range = Field((20.0, 60.0), description="Box width range (px).")
    height_range: Range = Field((8.0, 20.0), description="Box height range (px).")
    speed_range: Range = Field((0.5, 3.0), description="Speed range (px/frame); direction is uniform.")
    rotation_range: Range = Field((-0.5, 0.5), description="Box angle range (rad).")

    noise_sigma: float = Field(0.0, ge=0.0, description="Center jitter sigma (px).")
    size_sigma: float = Field(0.0, ge=0.0, description="Side length jitter sigma (px).")
    angle_sigma: float = Field(0.0, ge=0.0, description="Angle jitter sigma (rad).")

    drop_prob: float = Field(0.0, ge=0.0, le=1.0, description="Per instance-frame drop probability.")
    max_consecutive_drops: Optional[int] = Field(None, ge=0, description="Cap on consecutive drops of one track.")
    fp_rate: float = Field(0.0, ge=0.0, description="Mean false positives per frame (Poisson).")
    score_range: Range = Field((0.5, 1.0), description="Score range of true detections.")
    fp_score_range: Range = Field((0.1, 0.6), description="Score range of false positives.")

    min_lifetime: Optional[int] = Field(None, ge=1, description="When set, tracks live a random span of at least this many frames.")
    allow_overlap: bool = Field(True, description="When false, true trajectories never overlap.")
    overlap_margin: float = Field(4.0, ge=0.0, description="Clearance (px) kept between trajectories when overlap is disallowed.")

    @model_validator(mode="after")
    def check_ranges(self):
        for name in ("width_range", "height_range", "speed_range", "rotation_range", "score_range", "fp_score_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ValueError(f"{name} must be an ordered pair of finite values, got ({lo}, {hi})")
        if self.width_range[0] <= 0 or self.height_range[0] <= 0:
            raise ValueError("box sides must be positive")
        if self.speed_range[0] < 0:
            raise ValueError("speeds must be non-negative")
        for name in ("score_range", "fp_score_range"):
            lo, hi = getattr(self, name)
            if lo < 0 or hi > 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.min_lifetime is not None and self.min_lifetime > max(self.frames, 1):
            raise ValueError(f"min_lifetime {self.min_lifetime} exceeds frames {self.frames}")
        return self
