"""
Ground-truth files: one JSON object per line,
{"video_id": str, "frame": int, "track_id": int, "points": [8 reals], "transcription"?: str}.
"""

import logging
from pathlib import Path
from typing import Dict, List, Mapping, Union

from xentrack.errors import ParseError, StorageError
from xentrack.io.records import GroundTruthRecord, iter_records, quad_from_points
from xentrack.metrics.types import GroundTruth, GroundTruthInstance
from xentrack.utils.json_codec import dumps_canonical

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_ground_truth(path: PathLike) -> Dict[str, GroundTruth]:
    """Read a ground-truth file, one GroundTruth per video id. Transcriptions are kept as-is."""
    path = Path(path)
    frames: Dict[str, Dict[int, List[GroundTruthInstance]]] = {}
    seen: Dict[str, Dict[int, set]] = {}
    last_frame: Dict[str, int] = {}

    for lineno, text, rec in iter_records(path, GroundTruthRecord):
        previous = last_frame.get(rec.video_id)
        if previous is not None and rec.frame < previous:
            raise ParseError(str(path), lineno, 1, f"video '{rec.video_id}': frame {rec.frame} after frame {previous}")
        last_frame[rec.video_id] = rec.frame

        ids = seen.setdefault(rec.video_id, {}).setdefault(rec.frame, set())
        if rec.track_id in ids:
            column = text.find('"track_id"') + 1 or 1
            raise ParseError(str(path), lineno, column, f"duplicate track_id {rec.track_id} in frame {rec.frame}")
        ids.add(rec.track_id)

        quad = quad_from_points(str(path), lineno, text, rec.points)
        instance = GroundTruthInstance(rec.track_id, quad, rec.transcription)
        frames.setdefault(rec.video_id, {}).setdefault(rec.frame, []).append(instance)

    result = {vid: GroundTruth(vid, dict(sorted(per_frame.items()))) for vid, per_frame in sorted(frames.items())}
    logger.info(f"Read ground truth for {len(result)} videos from {path}")
    return result


def write_ground_truth(gts: Mapping[str, GroundTruth], path: PathLike) -> None:
    path = Path(path)
    lines = []
    for video_id in sorted(gts):
        gt = gts[video_id]
        for frame in sorted(gt.frames):
            for inst in gt.frames[frame]:
                doc = {"video_id": video_id, "frame": frame, "track_id": inst.track_id, "points": list(inst.quad.flat())}
                if inst.transcription is not None:
                    doc["transcription"] = inst.transcription
                lines.append(dumps_canonical(doc))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8", newline="\n")
    except OSError as e:
        raise StorageError(str(path), e.strerror or str(e)) from e
    logger.info(f"Wrote {len(lines)} ground-truth instances to {path}")
