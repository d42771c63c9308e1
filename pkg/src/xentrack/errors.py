"""
Exception hierarchy for xentrack.
Every failure surfaced to the CLI as an input/validation error derives from XenTrackError.
"""

from typing import Iterable, Optional


class XenTrackError(Exception):
    """Base class for all expected (user-facing) failures."""


class GeometryError(XenTrackError):
    """Invalid or degenerate boxes and quadrangles."""


class FilterError(XenTrackError):
    """Kalman state that cannot be mapped back to a box."""


class AssignmentError(XenTrackError):
    """Cost matrix that violates the solver's preconditions."""


class FrameOrderError(XenTrackError):
    """A frame was stepped at or before the previous frame index."""

    def __init__(self, frame: int, last_frame: int):
        self.frame = frame
        self.last_frame = last_frame
        super().__init__(f"out-of-order frame: {frame} after {last_frame}")


class TrackingError(XenTrackError):
    """A step failure, tagged with the video and frame it happened in."""

    def __init__(self, video_id: str, frame: int, reason: str):
        self.video_id = video_id
        self.frame = frame
        self.reason = reason
        super().__init__(f"video '{video_id}' frame {frame}: {reason}")


class ParseError(XenTrackError):
    """Malformed input file. Carries the location of the offending record."""

    def __init__(self, path: str, line: int, column: int, reason: str):
        self.path = path
        self.line = line
        self.column = column
        self.reason = reason
        super().__init__(f"{path}:{line}:{column}: {reason}")


class ConfigError(XenTrackError):
    """Invalid run configuration."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        super().__init__(message)


class VideoMismatchError(XenTrackError):
    """Prediction and ground truth cover different videos."""

    def __init__(self, only_pred: Iterable[str], only_gt: Iterable[str]):
        self.only_pred = sorted(only_pred)
        self.only_gt = sorted(only_gt)
        parts = []
        if self.only_pred:
            parts.append(f"only in predictions: {', '.join(self.only_pred)}")
        if self.only_gt:
            parts.append(f"only in ground truth: {', '.join(self.only_gt)}")
        super().__init__("video sets differ; " + "; ".join(parts))


class StorageError(XenTrackError):
    """A file could not be read or written."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")
