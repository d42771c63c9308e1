"""
Convex polygon clipping (Sutherland-Hodgman) and areas.
"""

from typing import List, Sequence

from xentrack.geometry.types import ConvexPolygon, Point, signed_area

# |cross| below this is treated as collinear
COLLINEAR_EPS = 1e-9
# Output vertices closer than this are merged
DUPLICATE_EPS = 1e-9


def _dedupe(points: List[Point]) -> List[Point]:
    out: List[Point] = []
    for p in points:
        if out and abs(p[0] - out[-1][0]) < DUPLICATE_EPS and abs(p[1] - out[-1][1]) < DUPLICATE_EPS:
            continue
        out.append(p)
    while len(out) > 1 and abs(out[0][0] - out[-1][0]) < DUPLICATE_EPS and abs(out[0][1] - out[-1][1]) < DUPLICATE_EPS:
        out.pop()
    return out


def clip_points(subject: Sequence[Point], clip: Sequence[Point]) -> List[Point]:
    """Clip a convex CCW ring against a convex CCW ring; returns the (possibly empty) ring."""
    output = list(subject)
    n = len(clip)
    for k in range(n):
        if len(output) < 3:
            return []
        ax, ay = clip[k]
        bx, by = clip[(k + 1) % n]
        ex, ey = bx - ax, by - ay

        inputs = output
        output = []
        sx, sy = inputs[-1]
        s_cross = ex * (sy - ay) - ey * (sx - ax)
        for px, py in inputs:
            p_cross = ex * (py - ay) - ey * (px - ax)
            p_in = p_cross >= -COLLINEAR_EPS
            s_in = s_cross >= -COLLINEAR_EPS
            if p_in:
                if not s_in:
                    t = s_cross / (s_cross - p_cross)
                    output.append((sx + t * (px - sx), sy + t * (py - sy)))
                output.append((px, py))
            elif s_in:
                t = s_cross / (s_cross - p_cross)
                output.append((sx + t * (px - sx), sy + t * (py - sy)))
            sx, sy, s_cross = px, py, p_cross
        output = _dedupe(output)

    if len(output) < 3:
        return []
    return output


def convex_intersection(a: ConvexPolygon, b: ConvexPolygon) -> ConvexPolygon:
    """Intersection of two convex CCW polygons; empty when they do not overlap."""
    if a.is_empty or b.is_empty:
        return ConvexPolygon()
    return ConvexPolygon(tuple(clip_points(a.vertices, b.vertices)))


def polygon_area(p: ConvexPolygon) -> float:
    """Shoelace area; 0 for the empty polygon."""
    if p.is_empty:
        return 0.0
    return abs(signed_area(p.vertices))
