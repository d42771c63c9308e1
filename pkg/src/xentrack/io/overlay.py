"""
SVG overlays: one file per frame, every instance drawn as a stroked quad
colored by its trace id, optionally over a user-supplied frame image.
"""

import colorsys
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union
from xml.sax.saxutils import escape, quoteattr

from xentrack.errors import StorageError, XenTrackError
from xentrack.tracker.types import TrackedInstance, TrackSet
from xentrack.utils.json_codec import format_real

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
# Golden-ratio conjugate: successive ids land far apart on the hue circle.
# For ids 1..20 the smallest circular hue gap is ||13 * HUE_STEP|| ~ 0.0344.
HUE_STEP = 0.618033988749895
LABEL_SIZE = 12


def track_hue(trace_id: int) -> float:
    return (trace_id * HUE_STEP) % 1.0


def track_color(trace_id: int) -> str:
    """#rrggbb at full saturation and value."""
    r, g, b = colorsys.hsv_to_rgb(track_hue(trace_id), 1.0, 1.0)
    return "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))


def overlay_file_name(frame: int) -> str:
    return f"frame_{frame:06d}.svg"


def _instance_svg(inst: TrackedInstance, stroke_width: float) -> List[str]:
    color = track_color(inst.trace_id)
    points = " ".join(f"{format_real(x)},{format_real(y)}" for x, y in inst.quad.points)
    x0, y0 = inst.quad.points[0]
    return [
        f'  <polygon points="{points}" fill="none" stroke="{color}" '
        f'stroke-width="{format_real(stroke_width)}" data-track-id="{inst.trace_id}"/>',
        f'  <text x="{format_real(x0)}" y="{format_real(y0 - 2.0)}" fill="{color}" '
        f'font-size="{LABEL_SIZE}">{inst.trace_id}</text>',
    ]


def render_frame(
    instances: List[TrackedInstance],
    frame: int,
    frame_size: Tuple[int, int],
    background: Optional[str] = None,
    stroke_width: float = 2.0,
) -> str:
    """
    SVG document of one frame. `background` is a path template formatted with
    `frame=<index>` (e.g. "frames/{frame:06d}.jpg").
    """
    width, height = frame_size
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f"  <title>{escape(f'frame {frame}')}</title>",
    ]
    if background is not None:
        href = background.format(frame=frame)
        lines.append(f'  <image href={quoteattr(href)} x="0" y="0" width="{width}" height="{height}"/>')
    for inst in sorted(instances, key=lambda i: i.trace_id):
        lines.extend(_instance_svg(inst, stroke_width))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def export_overlay(
    ts: TrackSet,
    frame_size: Tuple[int, int],
    out_dir: PathLike,
    background: Optional[str] = None,
    stroke_width: float = 2.0,
) -> List[Path]:
    """Write frame_NNNNNN.svg for every frame of the TrackSet; returns the paths in frame order."""
    width, height = frame_size
    if width <= 0 or height <= 0:
        raise XenTrackError(f"frame size must be positive, got {width}x{height}")
    if background is not None:
        try:
            background.format(frame=0)
        except (KeyError, IndexError, ValueError) as e:
            raise XenTrackError(f"invalid background template {background!r}: {e}") from e

    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for frame in sorted(ts.frames):
            path = out / overlay_file_name(frame)
            path.write_text(render_frame(ts.frames[frame], frame, frame_size, background, stroke_width), encoding="utf-8", newline="\n")
            written.append(path)
    except OSError as e:
        raise StorageError(str(out), e.strerror or str(e)) from e

    logger.info(f"Wrote {len(written)} overlay frames of video '{ts.video_id}' to {out}")
    return written
