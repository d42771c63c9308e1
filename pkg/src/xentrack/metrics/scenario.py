"""
Seeded synthetic scenarios: detections and matching ground truth.

The generator is numpy's PCG64 seeded with ScenarioConfig.seed. Draw order:
- per track, in track order: width, height, angle, speed, direction,
  [lifetime, start frame], start x, start y (repeated while a placement is rejected)
- per frame, per live track in track order: drop uniform, 5 normals (cx, cy, w, h, theta), score
- per frame after the tracks: Poisson false-positive count, then per false positive
  cx, cy, width, height, angle, score
Draws happen whether or not their value is used, so one setting never shifts another's stream.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from xentrack.geometry.conversions import rotated_box_to_quad
from xentrack.geometry.iou import rotated_iou
from xentrack.geometry.types import HALF_PI, RotatedBox
from xentrack.metrics.types import GroundTruth, GroundTruthInstance, ScenarioConfig
from xentrack.tracker.types import Detection

logger = logging.getLogger(__name__)

MAX_PLACEMENT_ATTEMPTS = 1000
# Smallest side a jittered detection may shrink to (px)
MIN_SIDE = 1.0

FrameDetections = Tuple[int, List[Detection]]


@dataclass(frozen=True)
class Trajectory:
    track_id: int
    start: int
    length: int
    cx: float
    cy: float
    vx: float
    vy: float
    w: float
    h: float
    theta: float

    def alive(self, frame: int) -> bool:
        return self.start <= frame < self.start + self.length

    def box_at(self, frame: int, grow: float = 0.0) -> RotatedBox:
        t = frame - self.start
        return RotatedBox.canonical(
            self.cx + self.vx * t,
            self.cy + self.vy * t,
            self.w + 2 * grow,
            self.h + 2 * grow,
            self.theta,
        )


def _start_range(extent: float, travel: float, size: float) -> Tuple[float, float]:
    lo = extent - min(0.0, travel)
    hi = size - extent - max(0.0, travel)
    if lo > hi:
        mid = (lo + hi) / 2.0
        return mid, mid
    return lo, hi


def _draw_trajectory(rng: np.random.Generator, cfg: ScenarioConfig, track_id: int) -> Trajectory:
    w = rng.uniform(*cfg.width_range)
    h = rng.uniform(*cfg.height_range)
    theta = rng.uniform(*cfg.rotation_range)
    speed = rng.uniform(*cfg.speed_range)
    direction = rng.uniform(-math.pi, math.pi)
    if cfg.min_lifetime is not None:
        length = int(rng.integers(cfg.min_lifetime, cfg.frames + 1))
        start = int(rng.integers(0, cfg.frames - length + 1))
    else:
        length, start = cfg.frames, 0

    vx, vy = speed * math.cos(direction), speed * math.sin(direction)
    c, s = abs(math.cos(theta)), abs(math.sin(theta))
    ex = (w * c + h * s) / 2.0
    ey = (w * s + h * c) / 2.0
    steps = max(length - 1, 0)
    x_lo, x_hi = _start_range(ex, vx * steps, cfg.image_width)
    y_lo, y_hi = _start_range(ey, vy * steps, cfg.image_height)
    cx = rng.uniform(x_lo, x_hi)
    cy = rng.uniform(y_lo, y_hi)
    return Trajectory(track_id, start, length, cx, cy, vx, vy, w, h, theta)


def _overlaps(a: Trajectory, b: Trajectory, margin: float) -> bool:
    first = max(a.start, b.start)
    last = min(a.start + a.length, b.start + b.length)
    grow = margin / 2.0
    for frame in range(first, last):
        if rotated_iou(a.box_at(frame, grow), b.box_at(frame, grow)) > 0.0:
            return True
    return False


def _place_tracks(rng: np.random.Generator, cfg: ScenarioConfig) -> List[Trajectory]:
    placed: List[Trajectory] = []
    for k in range(cfg.n_tracks):
        candidate = _draw_trajectory(rng, cfg, k + 1)
        if not cfg.allow_overlap:
            attempts = 1
            while any(_overlaps(candidate, other, cfg.overlap_margin) for other in placed):
                if attempts >= MAX_PLACEMENT_ATTEMPTS:
                    logger.warning(f"track {k + 1}: no overlap-free placement after {attempts} attempts; keeping the last one")
                    break
                candidate = _draw_trajectory(rng, cfg, k + 1)
                attempts += 1
        placed.append(candidate)
    return placed


def _jitter(rng: np.random.Generator, cfg: ScenarioConfig, box: RotatedBox) -> RotatedBox:
    noise = rng.normal(0.0, 1.0, size=5)
    return RotatedBox.canonical(
        box.cx + cfg.noise_sigma * noise[0],
        box.cy + cfg.noise_sigma * noise[1],
        max(box.w + cfg.size_sigma * noise[2], MIN_SIDE),
        max(box.h + cfg.size_sigma * noise[3], MIN_SIDE),
        box.theta + cfg.angle_sigma * noise[4],
    )


def _false_positive(rng: np.random.Generator, cfg: ScenarioConfig, frame: int) -> Detection:
    cx = rng.uniform(0.0, cfg.image_width)
    cy = rng.uniform(0.0, cfg.image_height)
    w = rng.uniform(*cfg.width_range)
    h = rng.uniform(*cfg.height_range)
    theta = rng.uniform(-HALF_PI, HALF_PI)
    score = rng.uniform(*cfg.fp_score_range)
    return Detection(frame, RotatedBox.canonical(cx, cy, w, h, theta), float(score))


def generate_scenario(cfg: ScenarioConfig) -> Tuple[List[FrameDetections], GroundTruth]:
    """
    Detections for every frame 0..frames-1 (possibly empty) and the noiseless ground truth.
    Same config, same output, bit for bit.
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    tracks = _place_tracks(rng, cfg)

    consecutive_drops: Dict[int, int] = {t.track_id: 0 for t in tracks}
    stream: List[FrameDetections] = []
    gt_frames: Dict[int, List[GroundTruthInstance]] = {}
    dropped = kept = 0

    for frame in range(cfg.frames):
        dets: List[Detection] = []
        for track in tracks:
            if not track.alive(frame):
                continue
            truth = track.box_at(frame)
            gt_frames.setdefault(frame, []).append(GroundTruthInstance(track.track_id, rotated_box_to_quad(truth)))

            drop_draw = rng.random()
            observed = _jitter(rng, cfg, truth)
            score = float(rng.uniform(*cfg.score_range))

            cap: Optional[int] = cfg.max_consecutive_drops
            if drop_draw < cfg.drop_prob and (cap is None or consecutive_drops[track.track_id] < cap):
                consecutive_drops[track.track_id] += 1
                dropped += 1
                continue
            consecutive_drops[track.track_id] = 0
            kept += 1
            dets.append(Detection(frame, observed, score))

        n_fp = int(rng.poisson(cfg.fp_rate))
        dets.extend(_false_positive(rng, cfg, frame) for _ in range(n_fp))
        stream.append((frame, dets))

    logger.debug(f"scenario '{cfg.video_id}' seed {cfg.seed}: {kept} kept, {dropped} dropped instance-frames")
    return stream, GroundTruth(cfg.video_id, gt_frames)
