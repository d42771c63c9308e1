import math
from typing import Callable

import numpy as np
import pytest

from xentrack.config import settings
from xentrack.geometry.types import RotatedBox
from xentrack.metrics.types import GroundTruth
from xentrack.tracker.types import TrackedInstance, TrackSet


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    """Tests never pick up a developer's .env or environment."""
    monkeypatch.setattr(settings, "XENTRACK_CONFIG", None)
    monkeypatch.setattr(settings, "XENTRACK_LOG_LEVEL", "WARNING")
    monkeypatch.setattr(settings, "XENTRACK_WORKERS", "1")
    monkeypatch.setattr(settings, "XENTRACK_SEED", "0")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(12345))


@pytest.fixture
def random_box() -> Callable[..., RotatedBox]:
    def make(rng: np.random.Generator, center=(0.0, 100.0), side=(1.0, 50.0)) -> RotatedBox:
        return RotatedBox.canonical(
            rng.uniform(*center),
            rng.uniform(*center),
            rng.uniform(*side),
            rng.uniform(*side),
            rng.uniform(-math.pi / 2, math.pi / 2),
        )
    return make


@pytest.fixture
def gt_as_tracks() -> Callable[[GroundTruth], TrackSet]:
    """A prediction identical to the ground truth."""
    def convert(gt: GroundTruth) -> TrackSet:
        frames = {
            frame: [TrackedInstance(inst.track_id, inst.quad, 1.0) for inst in sorted(insts, key=lambda i: i.track_id)]
            for frame, insts in gt.frames.items()
        }
        return TrackSet(video_id=gt.video_id, frames=frames)
    return convert
