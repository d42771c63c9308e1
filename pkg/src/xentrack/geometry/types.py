"""
Value types for rotated text geometry.

Conventions:
- pixel coordinates, x to the right, y down; "counter-clockwise" means a positive shoelace sum
- theta is measured from +x to the side labeled w, in radians, range [-pi/2, pi/2)
"""

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

from xentrack.errors import GeometryError

HALF_PI = math.pi / 2
QUARTER_PI = math.pi / 4

# Relative tolerance under which w and h count as equal
SQUARE_TOL = 1e-9

Point = Tuple[float, float]


def wrap_angle(angle: float) -> float:
    """Fold an angle into [-pi/2, pi/2) (rectangles repeat every pi)."""
    if -HALF_PI <= angle < HALF_PI:
        return angle
    wrapped = (angle + HALF_PI) % math.pi - HALF_PI
    if wrapped >= HALF_PI:
        wrapped -= math.pi
    return wrapped


def _wrap_quarter(angle: float) -> float:
    """Fold an angle into [-pi/4, pi/4) (squares repeat every pi/2)."""
    if -QUARTER_PI <= angle < QUARTER_PI:
        return angle
    wrapped = (angle + QUARTER_PI) % HALF_PI - QUARTER_PI
    if wrapped >= QUARTER_PI:
        wrapped -= HALF_PI
    return wrapped


def _near_square(w: float, h: float) -> bool:
    return abs(w - h) <= SQUARE_TOL * max(w, h)


def signed_area(points: Sequence[Point]) -> float:
    """Shoelace sum; positive for counter-clockwise order."""
    total = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return total / 2.0


@dataclass(frozen=True, slots=True)
class RotatedBox:
    """Rectangle given by center, side lengths and rotation, always in canonical form (see `canonical`)."""
    cx: float
    cy: float
    w: float
    h: float
    theta: float

    def __post_init__(self):
        values = (self.cx, self.cy, self.w, self.h, self.theta)
        if not all(math.isfinite(v) for v in values):
            raise GeometryError(f"non-finite box parameters: {values}")
        if self.w <= 0 or self.h <= 0:
            raise GeometryError(f"box sides must be positive, got w={self.w}, h={self.h}")
        if not -HALF_PI <= self.theta < HALF_PI:
            raise GeometryError(f"theta {self.theta} outside [-pi/2, pi/2)")
        if _near_square(self.w, self.h):
            if not -QUARTER_PI <= self.theta < QUARTER_PI:
                raise GeometryError(f"non-canonical box: square-like box with theta {self.theta} outside [-pi/4, pi/4)")
        elif self.h > self.w:
            raise GeometryError(f"non-canonical box: h={self.h} exceeds w={self.w}; use RotatedBox.canonical")

    @classmethod
    def canonical(cls, cx: float, cy: float, w: float, h: float, theta: float) -> "RotatedBox":
        """
        Build the canonical representation of a rectangle.
        The long side is w; near-squares keep their sides and fold theta into [-pi/4, pi/4).
        """
        if w <= 0 or h <= 0 or not math.isfinite(theta):
            raise GeometryError(f"cannot canonicalize box with w={w}, h={h}, theta={theta}")
        if _near_square(w, h):
            return cls(cx, cy, w, h, _wrap_quarter(theta))
        if h > w:
            w, h = h, w
            theta += HALF_PI
        return cls(cx, cy, w, h, wrap_angle(theta))

    @property
    def area(self) -> float:
        return self.w * self.h

    def corners(self) -> Tuple[Point, Point, Point, Point]:
        """Corners in counter-clockwise order."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        hw, hh = self.w / 2.0, self.h / 2.0
        out = []
        for dx, dy in ((-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)):
            out.append((self.cx + dx * c - dy * s, self.cy + dx * s + dy * c))
        return tuple(out)

    def aabb(self) -> Tuple[float, float, float, float]:
        """Axis-aligned bounds (x1, y1, x2, y2)."""
        c, s = abs(math.cos(self.theta)), abs(math.sin(self.theta))
        ex = (self.w * c + self.h * s) / 2.0
        ey = (self.w * s + self.h * c) / 2.0
        return (self.cx - ex, self.cy - ey, self.cx + ex, self.cy + ey)

    def sort_key(self) -> Tuple[float, float, float, float, float]:
        return (self.cx, self.cy, self.w, self.h, self.theta)


def _segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    """Proper crossing of two segments (shared endpoints and touching do not count)."""
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    return d1 * d2 < 0 and d3 * d4 < 0


@dataclass(frozen=True, slots=True)
class Quad:
    """
    Four-vertex text annotation.
    Stored counter-clockwise, starting from the vertex with the smallest (y, x).
    """
    points: Tuple[Point, Point, Point, Point]

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if len(pts) != 4:
            raise GeometryError(f"a quad needs exactly 4 vertices, got {len(pts)}")
        if not all(math.isfinite(v) for p in pts for v in p):
            raise GeometryError(f"non-finite quad vertices: {pts}")
        if _segments_cross(pts[0], pts[1], pts[2], pts[3]) or _segments_cross(pts[1], pts[2], pts[3], pts[0]):
            raise GeometryError("self-intersecting quad")

        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        scale = max(max(xs) - min(xs), max(ys) - min(ys), 1e-300)
        area = signed_area(pts)
        if abs(area) <= 1e-12 * scale * scale:
            raise GeometryError("degenerate geometry: quad vertices are collinear")
        if area < 0:
            pts = (pts[0], pts[3], pts[2], pts[1])

        start = min(range(4), key=lambda i: (pts[i][1], pts[i][0]))
        object.__setattr__(self, "points", pts[start:] + pts[:start])

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "Quad":
        """Build from [x1, y1, ..., x4, y4]."""
        if len(values) != 8:
            raise GeometryError(f"expected 8 coordinates, got {len(values)}")
        return cls(tuple((values[i], values[i + 1]) for i in range(0, 8, 2)))

    def flat(self) -> Tuple[float, ...]:
        return tuple(v for p in self.points for v in p)

    @property
    def area(self) -> float:
        return signed_area(self.points)


@dataclass(frozen=True, slots=True)
class ConvexPolygon:
    """Convex polygon in counter-clockwise order; no vertices means empty."""
    vertices: Tuple[Point, ...] = ()

    @classmethod
    def from_points(cls, points: Iterable[Point]) -> "ConvexPolygon":
        return cls(tuple((float(x), float(y)) for x, y in points))

    @classmethod
    def from_box(cls, box: RotatedBox) -> "ConvexPolygon":
        return cls(box.corners())

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) < 3
