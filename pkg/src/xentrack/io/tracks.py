"""
Track files: one canonical JSON document per video.

Keys are sorted, reals carry exactly two decimals, frames ascend numerically,
instances are ordered by track id and the document ends with a newline.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

from pydantic import ValidationError

from xentrack.errors import GeometryError, ParseError, StorageError, XenTrackError
from xentrack.geometry.types import Quad
from xentrack.io.records import TrackFileRecord, quad_from_points, validation_reason
from xentrack.tracker.types import TrackedInstance, TrackSet
from xentrack.utils.json_codec import dumps_canonical, sort_keys

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
TRACK_FILE_SUFFIX = ".tracks.json"


def _file_points(quad: Quad) -> List[float]:
    """Coordinates at file precision, re-ordered as the reader will order them."""
    try:
        return list(Quad.from_flat([round(v, 2) for v in quad.flat()]).flat())
    except GeometryError:
        return list(quad.flat())


def track_document(ts: TrackSet) -> Dict[str, Any]:
    """Document in on-disk key order. meta is only present when the TrackSet has any."""
    frames = {
        str(frame): [
            {"points": _file_points(inst.quad), "score": inst.score, "track_id": inst.trace_id}
            for inst in sorted(ts.frames[frame], key=lambda i: i.trace_id)
        ]
        for frame in sorted(ts.frames)
    }
    doc: Dict[str, Any] = {"frames": frames}
    if ts.meta:
        doc["meta"] = sort_keys(ts.meta)
    doc["video_id"] = ts.video_id
    return doc


def dumps_tracks(ts: TrackSet) -> str:
    return dumps_canonical(track_document(ts)) + "\n"


def write_tracks(ts: TrackSet, path: PathLike) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps_tracks(ts), encoding="utf-8", newline="\n")
    except OSError as e:
        raise StorageError(str(path), e.strerror or str(e)) from e
    logger.info(f"Wrote {ts.instance_count()} instances of video '{ts.video_id}' to {path}")


def parse_tracks(text: str, source: str = "<string>") -> TrackSet:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(source, e.lineno, e.colno, e.msg) from e
    try:
        rec = TrackFileRecord.model_validate(obj)
    except ValidationError as e:
        _, reason = validation_reason(e)
        raise ParseError(source, 1, 1, reason) from e

    frames: Dict[int, List[TrackedInstance]] = {}
    for key, instances in rec.frames.items():
        if not (key.isascii() and key.isdigit()):
            raise ParseError(source, 1, 1, f"frame key '{key}' is not a non-negative integer")
        ids = [inst.track_id for inst in instances]
        if len(ids) != len(set(ids)):
            raise ParseError(source, 1, 1, f"frame {key}: duplicate track ids")
        frames[int(key)] = [
            TrackedInstance(inst.track_id, quad_from_points(source, 1, "", inst.points), inst.score)
            for inst in sorted(instances, key=lambda i: i.track_id)
        ]
    return TrackSet(video_id=rec.video_id, frames=dict(sorted(frames.items())), meta=rec.meta)


def read_track_file(path: PathLike) -> TrackSet:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(str(path), 1, e.start + 1, "invalid UTF-8") from e
    except OSError as e:
        raise StorageError(str(path), e.strerror or str(e)) from e
    return parse_tracks(text, str(path))


def read_tracks(path: PathLike) -> Dict[str, TrackSet]:
    """Track sets by video id, from one track file or a directory of *.tracks.json files."""
    path = Path(path)
    files = sorted(path.glob(f"*{TRACK_FILE_SUFFIX}")) if path.is_dir() else [path]
    result: Dict[str, TrackSet] = {}
    for file in files:
        ts = read_track_file(file)
        if ts.video_id in result:
            raise XenTrackError(f"{file}: video '{ts.video_id}' appears in more than one track file")
        result[ts.video_id] = ts
    logger.info(f"Read tracks of {len(result)} videos from {path}")
    return dict(sorted(result.items()))


def safe_video_id(video_id: str) -> str:
    """The id itself, when it is usable as a file or directory name."""
    if not video_id or video_id in (".", "..") or "/" in video_id or "\\" in video_id:
        raise XenTrackError(f"video id '{video_id}' cannot be used as a file name")
    return video_id


def track_file_name(video_id: str) -> str:
    return f"{safe_video_id(video_id)}{TRACK_FILE_SUFFIX}"
