import math

import numpy as np
import pytest

from xentrack.errors import GeometryError
from xentrack.geometry.clipping import convex_intersection, polygon_area
from xentrack.geometry.conversions import convex_hull, quad_to_rotated_box, rotated_box_to_quad
from xentrack.geometry.iou import IoUMode, aabb_iou, iou_matrix, rotated_iou
from xentrack.geometry.types import ConvexPolygon, Quad, RotatedBox, wrap_angle


def square(x0, y0, side=1.0) -> ConvexPolygon:
    return ConvexPolygon.from_points([(x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)])


def rotate_about(points, angle, cx, cy):
    c, s = math.cos(angle), math.sin(angle)
    return [(cx + (x - cx) * c - (y - cy) * s, cy + (x - cx) * s + (y - cy) * c) for x, y in points]


def assert_box_close(a: RotatedBox, b: RotatedBox, tol=1e-9):
    assert a.cx == pytest.approx(b.cx, abs=tol)
    assert a.cy == pytest.approx(b.cy, abs=tol)
    assert a.w == pytest.approx(b.w, abs=tol)
    assert a.h == pytest.approx(b.h, abs=tol)
    assert abs(wrap_angle(a.theta - b.theta)) < tol


# --- oracles ---

def swept_min_area(points, step=0.001):
    """Smallest axis-aligned bounding area over rotations, coarse grid then local refinement."""
    pts = np.asarray(points, dtype=np.float64)

    def areas(angles):
        c, s = np.cos(angles), np.sin(angles)
        x = pts[:, 0:1] * c + pts[:, 1:2] * s
        y = -pts[:, 0:1] * s + pts[:, 1:2] * c
        return (x.max(axis=0) - x.min(axis=0)) * (y.max(axis=0) - y.min(axis=0))

    grid = np.arange(-math.pi / 2, math.pi / 2, step)
    a = areas(grid)
    best = grid[int(np.argmin(a))]
    fine = np.linspace(best - step, best + step, 2001)
    return float(areas(fine).min())


def column_spans(corners, xs):
    """Vertical extent of a convex polygon along each vertical line x = xs[i] (NaN-free, empty -> lo > hi)."""
    lo = np.full(xs.shape, np.inf)
    hi = np.full(xs.shape, -np.inf)
    n = len(corners)
    for k in range(n):
        (px, py), (qx, qy) = corners[k], corners[(k + 1) % n]
        if px == qx:
            continue
        t = (xs - px) / (qx - px)
        valid = (t >= 0.0) & (t <= 1.0)
        y = py + t * (qy - py)
        lo = np.where(valid, np.minimum(lo, y), lo)
        hi = np.where(valid, np.maximum(hi, y), hi)
    return lo, hi


def _positive_part(x0, f0, x1, f1) -> float:
    """Integral of max(0, f) for f linear on [x0, x1]."""
    if f0 >= 0 and f1 >= 0:
        return (f0 + f1) / 2 * (x1 - x0)
    if f0 <= 0 and f1 <= 0:
        return 0.0
    root = x0 + f0 / (f0 - f1) * (x1 - x0)
    return f0 / 2 * (root - x0) if f0 > 0 else f1 / 2 * (x1 - root)


def slab_iou(a: RotatedBox, b: RotatedBox) -> float:
    """
    Exact IoU by vertical slabs. Between vertex abscissae every span bound is linear,
    so the overlap height is linear between the points where two bounds cross.
    """
    ca, cb = a.corners(), b.corners()
    lo_x = max(min(p[0] for p in ca), min(p[0] for p in cb))
    hi_x = min(max(p[0] for p in ca), max(p[0] for p in cb))
    if hi_x <= lo_x:
        return 0.0

    cuts = sorted({lo_x, hi_x} | {p[0] for p in ca + cb if lo_x < p[0] < hi_x})
    inter = 0.0
    for x0, x1 in zip(cuts, cuts[1:]):
        ends = np.array([x0, x1])
        lo_a, hi_a = column_spans(ca, ends)
        lo_b, hi_b = column_spans(cb, ends)
        points = {x0, x1}
        for g in (hi_a - hi_b, lo_a - lo_b):
            if g[0] * g[1] < 0:
                points.add(x0 + g[0] / (g[0] - g[1]) * (x1 - x0))
        xs = np.array(sorted(points))
        la, ha = column_spans(ca, xs)
        lb, hb = column_spans(cb, xs)
        height = np.minimum(ha, hb) - np.maximum(la, lb)
        for k in range(len(xs) - 1):
            inter += _positive_part(xs[k], height[k], xs[k + 1], height[k + 1])
    return inter / (a.area + b.area - inter)


def grid_iou(a: RotatedBox, b: RotatedBox, cells=1000) -> float:
    """Full raster: count cell centers inside both boxes."""
    ba, bb = a.aabb(), b.aabb()
    x0, y0 = min(ba[0], bb[0]), min(ba[1], bb[1])
    x1, y1 = max(ba[2], bb[2]), max(ba[3], bb[3])
    xs = x0 + (np.arange(cells) + 0.5) * (x1 - x0) / cells
    ys = y0 + (np.arange(cells) + 0.5) * (y1 - y0) / cells
    gx, gy = np.meshgrid(xs, ys)

    def inside(box):
        c, s = math.cos(box.theta), math.sin(box.theta)
        dx, dy = gx - box.cx, gy - box.cy
        u = dx * c + dy * s
        v = -dx * s + dy * c
        return (np.abs(u) <= box.w / 2) & (np.abs(v) <= box.h / 2)

    in_a, in_b = inside(a), inside(b)
    inter = np.count_nonzero(in_a & in_b)
    union = np.count_nonzero(in_a | in_b)
    return inter / union


# --- types ---

def test_rotated_box_rejects_invalid_values():
    with pytest.raises(GeometryError):
        RotatedBox(0, 0, 0, 1, 0)
    with pytest.raises(GeometryError):
        RotatedBox(0, 0, 1, 1, math.pi / 2)
    with pytest.raises(GeometryError):
        RotatedBox(float("nan"), 0, 1, 1, 0)


def test_canonical_puts_long_side_first():
    b = RotatedBox.canonical(5, 5, 2, 6, 0.2)
    assert (b.w, b.h) == (6, 2)
    assert b.theta == pytest.approx(0.2 + math.pi / 2 - math.pi)


def test_canonical_square_folds_to_quarter_range():
    b = RotatedBox.canonical(0, 0, 3, 3, 1.2)
    assert -math.pi / 4 <= b.theta < math.pi / 4
    assert b.theta == pytest.approx(1.2 - math.pi / 2)


@pytest.mark.parametrize(
    "args",
    [
        (10, 10, 4, 8, 0.3),
        (0, 0, 2, 6, 0.0),
        (0, 0, 1, 1, 1.0),
        (0, 0, 3, 3, -1.2),
    ],
)
def test_rotated_box_rejects_non_canonical_form(args):
    with pytest.raises(GeometryError, match="non-canonical"):
        RotatedBox(*args)


def test_tall_box_round_trips_through_quad_after_canonical():
    b = RotatedBox.canonical(10, 10, 4, 8, 0.3)
    assert (b.w, b.h) == (8, 4)
    assert b.theta == pytest.approx(0.3 - math.pi / 2)
    assert_box_close(quad_to_rotated_box(rotated_box_to_quad(b)), b)


def test_quad_is_stored_counter_clockwise_from_top_left():
    clockwise = Quad(((0, 0), (0, 1), (1, 1), (1, 0)))
    assert clockwise.points == ((0, 0), (1, 0), (1, 1), (0, 1))
    rotated_start = Quad(((1, 1), (0, 1), (0, 0), (1, 0)))
    assert rotated_start.points == ((0, 0), (1, 0), (1, 1), (0, 1))
    assert rotated_start.area > 0


def test_quad_rejects_bad_geometry():
    with pytest.raises(GeometryError, match="self-intersecting"):
        Quad(((0, 0), (1, 1), (1, 0), (0, 1)))
    with pytest.raises(GeometryError, match="degenerate geometry"):
        Quad(((0, 0), (1, 1), (2, 2), (3, 3)))
    with pytest.raises(GeometryError):
        Quad.from_flat([0, 0, 1, 0, 1, 1, 0])


def test_convex_hull_drops_interior_and_collinear_points():
    hull = convex_hull([(0, 0), (1, 0), (2, 0), (2, 2), (0, 2), (1, 1)])
    assert sorted(hull) == [(0, 0), (0, 2), (2, 0), (2, 2)]


# --- quad_to_rotated_box / rotated_box_to_quad ---

def test_unit_square_to_box():
    b = quad_to_rotated_box(Quad(((0, 0), (1, 0), (1, 1), (0, 1))))
    assert_box_close(b, RotatedBox(0.5, 0.5, 1, 1, 0))


def test_rotated_square_to_box():
    corners = rotate_about([(0, 0), (1, 0), (1, 1), (0, 1)], math.pi / 6, 0.5, 0.5)
    b = quad_to_rotated_box(Quad(tuple(corners)))
    assert_box_close(b, RotatedBox(0.5, 0.5, 1, 1, math.pi / 6))


def test_non_rectangular_quad_matches_angle_sweep():
    points = [(0, 0), (2, 0), (2.2, 1), (0, 1)]
    b = quad_to_rotated_box(Quad(tuple(points)))
    assert b.area == pytest.approx(swept_min_area(points), rel=1e-4)
    # The rectangle encloses every vertex
    c, s = math.cos(b.theta), math.sin(b.theta)
    for x, y in points:
        u = (x - b.cx) * c + (y - b.cy) * s
        v = -(x - b.cx) * s + (y - b.cy) * c
        assert abs(u) <= b.w / 2 + 1e-9
        assert abs(v) <= b.h / 2 + 1e-9


def test_min_area_rectangle_on_random_quads(rng):
    for _ in range(50):
        # Star-shaped around the origin, so never self-intersecting
        angles = np.sort(rng.uniform(0, 2 * math.pi, 4))
        radii = rng.uniform(5, 20, 4)
        points = [(float(r * math.cos(a)), float(r * math.sin(a))) for r, a in zip(radii, angles)]
        try:
            quad = Quad(tuple(points))
        except GeometryError:
            continue
        b = quad_to_rotated_box(quad)
        assert b.area == pytest.approx(swept_min_area(points), rel=1e-4)


def test_box_to_quad_unit_square():
    q = rotated_box_to_quad(RotatedBox(0.5, 0.5, 1, 1, 0))
    assert q.flat() == pytest.approx((0, 0, 1, 0, 1, 1, 0, 1), abs=1e-12)


def test_box_to_quad_rotated_rectangle():
    q = rotated_box_to_quad(RotatedBox(0, 0, 2, 1, math.pi / 4))
    expected = rotate_about([(-1, -0.5), (1, -0.5), (1, 0.5), (-1, 0.5)], math.pi / 4, 0, 0)
    got = [v for p in sorted(q.points) for v in p]
    want = [v for p in sorted(expected) for v in p]
    assert got == pytest.approx(want, abs=1e-12)


def test_box_quad_round_trip(rng, random_box):
    for _ in range(500):
        b = random_box(rng)
        assert_box_close(quad_to_rotated_box(rotated_box_to_quad(b)), b)


def test_near_collinear_quad_is_degenerate():
    with pytest.raises(GeometryError, match="degenerate geometry"):
        quad_to_rotated_box(Quad(((0, 0), (4, 0), (4, 1e-14), (0, 1e-14))))


# --- clipping and areas ---

def test_intersection_with_itself_is_idempotent():
    a = square(0, 0)
    assert polygon_area(convex_intersection(a, a)) == pytest.approx(1.0)


def test_disjoint_squares_have_empty_intersection():
    result = convex_intersection(square(0, 0), square(5, 5))
    assert result.is_empty
    assert polygon_area(result) == 0.0


def test_shifted_square_intersection_matches_raster():
    inter = convex_intersection(square(0, 0), square(0.5, 0))
    area = polygon_area(inter)
    assert area == pytest.approx(0.5, abs=1e-12)
    # 2000 x 2000 raster of the bounding region [0, 1.5] x [0, 1]
    xs = (np.arange(2000) + 0.5) * 1.5 / 2000
    ys = (np.arange(2000) + 0.5) / 2000
    gx, gy = np.meshgrid(xs, ys)
    both = (gx >= 0.5) & (gx <= 1.0) & (gy >= 0) & (gy <= 1)
    raster = np.count_nonzero(both) * (1.5 / 2000) * (1 / 2000)
    assert area == pytest.approx(raster, abs=2e-3)
    assert area <= min(polygon_area(square(0, 0)), polygon_area(square(0.5, 0)))


def test_polygon_area_closed_forms():
    assert polygon_area(square(0, 0)) == 1.0
    assert polygon_area(ConvexPolygon()) == 0.0
    assert polygon_area(ConvexPolygon.from_points([(0, 0), (4, 0), (0, 3)])) == 6.0


def test_touching_squares_have_zero_area():
    assert polygon_area(convex_intersection(square(0, 0), square(1, 0))) == pytest.approx(0.0, abs=1e-12)


# --- IoU ---

def test_iou_closed_forms():
    a = RotatedBox(0.5, 0.5, 1, 1, 0)
    assert rotated_iou(a, a) == pytest.approx(1.0, abs=1e-9)
    assert rotated_iou(a, RotatedBox(10.5, 10.5, 1, 1, 0)) == 0.0
    assert rotated_iou(a, RotatedBox(1.0, 0.5, 1, 1, 0)) == pytest.approx(1 / 3, abs=1e-12)


def test_iou_matches_slab_oracle_on_random_pairs(rng, random_box):
    worst = 0.0
    for _ in range(1000):
        a, b = random_box(rng), random_box(rng)
        worst = max(worst, abs(rotated_iou(a, b) - slab_iou(a, b)))
    assert worst < 1e-3


@pytest.mark.parametrize("a, b", [
    (RotatedBox(50, 50, 40, 10, 0.3), RotatedBox(52, 49, 35, 12, 0.1)),
    (RotatedBox(20, 20, 30, 30, 0.0), RotatedBox(30, 25, 20, 10, -0.7)),
    (RotatedBox(0, 0, 12, 4, 1.2), RotatedBox(1, 1, 12, 4, -1.2)),
])
def test_iou_matches_full_raster(a, b):
    assert rotated_iou(a, b) == pytest.approx(grid_iou(a, b), abs=2e-3)


def test_iou_is_symmetric_and_bounded(rng, random_box):
    for _ in range(300):
        a = random_box(rng, center=(0, 30))
        b = random_box(rng, center=(0, 30))
        ab, ba = rotated_iou(a, b), rotated_iou(b, a)
        assert abs(ab - ba) < 1e-12
        assert 0.0 <= ab <= 1.0
        assert rotated_iou(a, a) >= 1 - 1e-9


def test_iou_is_invariant_under_rigid_motion(rng, random_box):
    def move(box, phi, tx, ty):
        c, s = math.cos(phi), math.sin(phi)
        return RotatedBox.canonical(
            box.cx * c - box.cy * s + tx,
            box.cx * s + box.cy * c + ty,
            box.w,
            box.h,
            box.theta + phi,
        )

    for _ in range(200):
        a = random_box(rng, center=(0, 20))
        b = random_box(rng, center=(0, 20))
        phi, tx, ty = rng.uniform(-math.pi, math.pi), rng.uniform(-50, 50), rng.uniform(-50, 50)
        assert abs(rotated_iou(a, b) - rotated_iou(move(a, phi, tx, ty), move(b, phi, tx, ty))) < 1e-9


def test_iou_matrix_agrees_with_pairwise(rng, random_box):
    a = [random_box(rng, center=(0, 40)) for _ in range(15)]
    b = [random_box(rng, center=(0, 40)) for _ in range(9)]
    m = iou_matrix(a, b)
    assert m.shape == (15, 9)
    for i in range(15):
        for j in range(9):
            assert m[i, j] == rotated_iou(a[i], b[j])

    aabb = iou_matrix(a, b, IoUMode.AABB)
    for i in range(15):
        for j in range(9):
            assert aabb[i, j] == pytest.approx(aabb_iou(a[i], b[j]), abs=1e-12)


def test_iou_matrix_empty_sides():
    assert iou_matrix([], [RotatedBox(0, 0, 1, 1, 0)]).shape == (0, 1)
    assert iou_matrix([RotatedBox(0, 0, 1, 1, 0)], []).shape == (1, 0)


def test_aabb_iou_of_rotated_boxes_uses_bounds():
    a = RotatedBox(0, 0, 2, 2, math.pi / 8)
    # Bounds are symmetric about the center, so identical boxes still score 1
    assert aabb_iou(a, a) == pytest.approx(1.0)
    assert aabb_iou(RotatedBox(0, 0, 1, 1, 0), RotatedBox(0.5, 0, 1, 1, 0)) == pytest.approx(1 / 3)
