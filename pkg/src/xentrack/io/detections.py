"""
Detection files: one JSON object per line,
{"video_id": str, "frame": int, "points": [x1, y1, ..., x4, y4], "score": float}.
"""

import logging
from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Tuple, Union

from xentrack.errors import GeometryError, ParseError, StorageError
from xentrack.geometry.conversions import quad_to_rotated_box, rotated_box_to_quad
from xentrack.io.records import DetectionRecord, iter_records, quad_from_points
from xentrack.tracker.types import Detection
from xentrack.utils.json_codec import dumps_canonical

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
DetectionStream = List[Tuple[int, List[Detection]]]


def read_detections(path: PathLike) -> Dict[str, DetectionStream]:
    """
    Read a detection file into per-video streams of (frame, detections), frames ascending.
    Records of one video must come in non-decreasing frame order; videos may interleave.
    An empty file yields no streams.
    """
    path = Path(path)
    frames: Dict[str, Dict[int, List[Detection]]] = {}
    last_frame: Dict[str, int] = {}
    count = 0

    for lineno, text, rec in iter_records(path, DetectionRecord):
        previous = last_frame.get(rec.video_id)
        if previous is not None and rec.frame < previous:
            raise ParseError(str(path), lineno, 1, f"video '{rec.video_id}': frame {rec.frame} after frame {previous}")
        last_frame[rec.video_id] = rec.frame

        quad = quad_from_points(str(path), lineno, text, rec.points)
        try:
            box = quad_to_rotated_box(quad)
        except GeometryError as e:
            raise ParseError(str(path), lineno, 1, str(e)) from e
        frames.setdefault(rec.video_id, {}).setdefault(rec.frame, []).append(Detection(rec.frame, box, rec.score))
        count += 1

    logger.info(f"Read {count} detections for {len(frames)} videos from {path}")
    return {vid: sorted(per_frame.items()) for vid, per_frame in sorted(frames.items())}


def detection_line(video_id: str, det: Detection) -> str:
    doc = {
        "video_id": video_id,
        "frame": det.frame,
        "points": list(rotated_box_to_quad(det.box).flat()),
        "score": det.score,
    }
    return dumps_canonical(doc)


def write_detections(streams: Mapping[str, Sequence[Tuple[int, Sequence[Detection]]]], path: PathLike) -> None:
    """Write per-video streams, videos in id order, frames in stream order."""
    path = Path(path)
    lines = [
        detection_line(video_id, det)
        for video_id in sorted(streams)
        for _, dets in streams[video_id]
        for det in dets
    ]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8", newline="\n")
    except OSError as e:
        raise StorageError(str(path), e.strerror or str(e)) from e
    logger.info(f"Wrote {len(lines)} detections to {path}")
