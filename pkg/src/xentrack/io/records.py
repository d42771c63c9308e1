"""
Record schemas of the line-oriented input files and the track document,
plus the shared JSON-lines reader that turns every failure into a located ParseError.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Type, TypeVar

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from xentrack.errors import GeometryError, ParseError, StorageError
from xentrack.geometry.types import Quad
from xentrack.utils.json_codec import parse_json_object

logger = logging.getLogger(__name__)


class _Record(BaseModel):
    model_config = ConfigDict(extra="ignore", allow_inf_nan=False)


class DetectionRecord(_Record):
    video_id: str = Field(..., min_length=1, description="Video the detection belongs to.")
    frame: int = Field(..., ge=0, strict=True, description="Frame index.")
    points: List[float] = Field(..., min_length=8, max_length=8, description="x1, y1, ..., x4, y4 in pixels.")
    score: float = Field(..., ge=0.0, le=1.0, description="Detector confidence.")


class GroundTruthRecord(_Record):
    video_id: str = Field(..., min_length=1)
    frame: int = Field(..., ge=0, strict=True)
    track_id: int = Field(..., ge=0, strict=True, description="Annotated trace id.")
    points: List[float] = Field(..., min_length=8, max_length=8)
    transcription: Optional[str] = Field(None, description="Text content; carried, never evaluated.")


class TrackInstanceRecord(_Record):
    track_id: int = Field(..., ge=1, strict=True)
    points: List[float] = Field(..., min_length=8, max_length=8)
    score: float = Field(..., ge=0.0, le=1.0)


class TrackFileRecord(_Record):
    video_id: str
    frames: Dict[str, List[TrackInstanceRecord]] = Field(default_factory=dict)
    meta: Dict[str, Any] = Field(default_factory=dict)


R = TypeVar("R", bound=BaseModel)


def _column_of(text: str, key: Any) -> int:
    pos = text.find(f'"{key}"') if isinstance(key, str) else -1
    return pos + 1 if pos >= 0 else 1


def validation_reason(e: ValidationError) -> Tuple[Any, str]:
    """First error of a pydantic failure as (top-level key, message)."""
    err = e.errors()[0]
    loc = err.get("loc") or ()
    key = loc[0] if loc else None
    where = ".".join(str(p) for p in loc)
    return key, f"{where}: {err['msg']}" if where else err["msg"]


def quad_from_points(path: str, line: int, text: str, points: List[float]) -> Quad:
    try:
        return Quad.from_flat(points)
    except GeometryError as e:
        raise ParseError(path, line, _column_of(text, "points"), str(e)) from e


def read_lines(path: Path) -> Iterator[Tuple[int, str]]:
    """(line number, text) of every non-blank line; invalid UTF-8 is a ParseError."""
    try:
        handle = open(path, "rb")
    except OSError as e:
        raise StorageError(str(path), e.strerror or str(e)) from e
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise ParseError(str(path), lineno, e.start + 1, "invalid UTF-8") from e
            if text.strip():
                yield lineno, text.rstrip("\r\n")


def iter_records(path: Path, model: Type[R]) -> Iterator[Tuple[int, str, R]]:
    """Parse a JSON-lines file record by record: (line number, raw text, record)."""
    for lineno, text in read_lines(path):
        obj, error = parse_json_object(text)
        if error is not None:
            column, reason = error
            raise ParseError(str(path), lineno, column, reason)
        try:
            record = model.model_validate(obj)
        except ValidationError as e:
            key, reason = validation_reason(e)
            raise ParseError(str(path), lineno, _column_of(text, key), reason) from e
        yield lineno, text, record
