"""
Conversions between quadrangle annotations and rotated boxes.
"""

import math
from typing import List, Sequence

import numpy as np

from xentrack.errors import GeometryError
from xentrack.geometry.types import Point, Quad, RotatedBox


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Sequence[Point]) -> List[Point]:
    """Monotone-chain hull, counter-clockwise, collinear points dropped."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) < 3:
        return pts

    lower: List[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)

    upper: List[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)

    return lower[:-1] + upper[:-1]


def quad_to_rotated_box(q: Quad) -> RotatedBox:
    """
    Minimum-area enclosing rectangle of the quad (rotating calipers over the hull).
    Exact for rectangular quads, returned in canonical form.
    """
    hull = convex_hull(q.points)
    if len(hull) < 3:
        raise GeometryError("degenerate geometry: quad vertices are collinear")

    pts = np.asarray(hull, dtype=np.float64)
    edges = np.roll(pts, -1, axis=0) - pts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    keep = lengths > 0
    u = edges[keep] / lengths[keep, None]
    v = np.stack([-u[:, 1], u[:, 0]], axis=1)

    # Projections of every hull point on each candidate frame
    pu = pts @ u.T
    pv = pts @ v.T
    u_min, u_max = pu.min(axis=0), pu.max(axis=0)
    v_min, v_max = pv.min(axis=0), pv.max(axis=0)
    areas = (u_max - u_min) * (v_max - v_min)

    best = int(np.argmin(areas))
    if areas[best] <= 0:
        raise GeometryError("degenerate geometry: zero-area hull")

    mu = (u_min[best] + u_max[best]) / 2.0
    mv = (v_min[best] + v_max[best]) / 2.0
    center = mu * u[best] + mv * v[best]
    theta = math.atan2(u[best, 1], u[best, 0])
    return RotatedBox.canonical(
        float(center[0]),
        float(center[1]),
        float(u_max[best] - u_min[best]),
        float(v_max[best] - v_min[best]),
        theta,
    )


def rotated_box_to_quad(b: RotatedBox) -> Quad:
    """Corners of the box as a canonical quad."""
    return Quad(b.corners())
