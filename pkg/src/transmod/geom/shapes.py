"""Planar shape primitives.

Every continuum handled by the engine is one of a small set of closed,
bounded shapes: disks, axis-aligned rectangles, polar rectangles (annular
sectors), simple polygons, and single points.  All shapes are treated as
filled compact sets; the helpers here give exact diameters, point
membership, boundary decompositions, and point-to-set distance extremes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from ..errors import EmptyInterior, InvalidDomain

TWO_PI = 2.0 * math.pi
# Absolute slack used when comparing exact coordinates.
EPS = 1e-12


@dataclass(frozen=True)
class Point:
    x: float
    y: float


@dataclass(frozen=True)
class Disk:
    """Closed disk of positive radius."""

    center: Point
    radius: float


@dataclass(frozen=True)
class PointSet:
    """A single point, the degenerate continuum."""

    point: Point


@dataclass(frozen=True)
class AxisRect:
    """Axis-aligned closed rectangle; ``corner`` is the minimal corner."""

    corner: Point
    width: float
    height: float


@dataclass(frozen=True)
class PolarRect:
    """Closed annular sector around ``center``.

    Radial extent [r_in, r_out] with 0 < r_in < r_out, angular extent
    [theta_min, theta_max] with theta_max <= theta_min + 2*pi.  A full
    span of 2*pi gives a closed circular band.
    """

    center: Point
    r_in: float
    r_out: float
    theta_min: float
    theta_max: float


@dataclass(frozen=True)
class Polygon:
    """Simple closed polygon given by its vertex cycle."""

    vertices: tuple[Point, ...]


PlanarSet = Union[Disk, PointSet, AxisRect, PolarRect, Polygon]


@dataclass(frozen=True)
class Annulus:
    """Closed round annulus |z - center| in [r, R], 0 < r < R."""

    center: Point
    r: float
    R: float


@dataclass(frozen=True)
class Seg:
    """Boundary segment from a to b (coordinate tuples)."""

    a: tuple[float, float]
    b: tuple[float, float]


@dataclass(frozen=True)
class Arc:
    """Circular boundary arc, angles t0 <= t <= t1 (t1 - t0 <= 2*pi)."""

    center: tuple[float, float]
    radius: float
    t0: float
    t1: float


def hyp(dx: float, dy: float) -> float:
    return math.hypot(dx, dy)


def pdist(p: Point, q: Point) -> float:
    return math.hypot(p.x - q.x, p.y - q.y)


def _span(s: PolarRect) -> float:
    return s.theta_max - s.theta_min


def _ang_in_span(phi: float, t0: float, width: float) -> bool:
    """Whether angle phi lies in [t0, t0 + width] modulo 2*pi."""
    if width >= TWO_PI - EPS:
        return True
    d = (phi - t0) % TWO_PI
    return d <= width + EPS or d >= TWO_PI - EPS


def _polar_corners(s: PolarRect) -> list[tuple[float, float]]:
    cx, cy = s.center.x, s.center.y
    out = []
    for r in (s.r_in, s.r_out):
        for t in (s.theta_min, s.theta_max):
            out.append((cx + r * math.cos(t), cy + r * math.sin(t)))
    return out


def validate_planar_set(s: PlanarSet, field: str = "set") -> None:
    """Check structural invariants, raising InvalidDomain on violation."""
    if isinstance(s, Disk):
        if not (s.radius > 0 and math.isfinite(s.radius)):
            raise InvalidDomain(f"{field}.radius", "must be finite and > 0")
    elif isinstance(s, AxisRect):
        if not (s.width > 0 and math.isfinite(s.width)):
            raise InvalidDomain(f"{field}.width", "must be finite and > 0")
        if not (s.height > 0 and math.isfinite(s.height)):
            raise InvalidDomain(f"{field}.height", "must be finite and > 0")
    elif isinstance(s, PolarRect):
        if not (0 < s.r_in < s.r_out):
            raise InvalidDomain(f"{field}.r_in", "need 0 < r_in < r_out")
        if not (s.theta_min < s.theta_max <= s.theta_min + TWO_PI + EPS):
            raise InvalidDomain(
                f"{field}.theta_min", "need theta_min < theta_max <= theta_min + 2*pi"
            )
    elif isinstance(s, Polygon):
        v = s.vertices
        if len(v) < 3:
            raise InvalidDomain(f"{field}.vertices", "polygon needs >= 3 vertices")
        for i in range(len(v)):
            if pdist(v[i], v[(i + 1) % len(v)]) <= EPS:
                raise InvalidDomain(f"{field}.vertices", "repeated consecutive vertex")
        if _polygon_self_intersects(v):
            raise InvalidDomain(f"{field}.vertices", "polygon is not simple")
    elif isinstance(s, PointSet):
        pass
    else:  # pragma: no cover - guarded by type unions everywhere
        raise InvalidDomain(field, f"unknown shape {type(s).__name__}")


def _segments_properly_cross(a, b, c, d) -> bool:
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return (o1 * o2 < -EPS) and (o3 * o4 < -EPS)


def _polygon_self_intersects(v: tuple[Point, ...]) -> bool:
    n = len(v)
    pts = [(p.x, p.y) for p in v]
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            c, d = pts[j], pts[(j + 1) % n]
            if _segments_properly_cross(a, b, c, d):
                return True
    return False


def diameter(s: PlanarSet) -> float:
    if isinstance(s, Disk):
        return 2.0 * s.radius
    if isinstance(s, PointSet):
        return 0.0
    if isinstance(s, AxisRect):
        return math.hypot(s.width, s.height)
    if isinstance(s, Polygon):
        # Diameter of a filled polygon is attained between vertices.
        best = 0.0
        v = s.vertices
        for i in range(len(v)):
            for j in range(i + 1, len(v)):
                best = max(best, pdist(v[i], v[j]))
        return best
    if isinstance(s, PolarRect):
        w = _span(s)
        if w >= math.pi:
            return 2.0 * s.r_out
        chord_oo = 2.0 * s.r_out * math.sin(w / 2.0)
        diag = math.sqrt(
            s.r_in * s.r_in + s.r_out * s.r_out - 2.0 * s.r_in * s.r_out * math.cos(w)
        )
        return max(chord_oo, diag)
    raise TypeError(type(s).__name__)


def bounding_box(s: PlanarSet) -> tuple[float, float, float, float]:
    """(xmin, ymin, xmax, ymax) of the set."""
    if isinstance(s, Disk):
        c, r = s.center, s.radius
        return (c.x - r, c.y - r, c.x + r, c.y + r)
    if isinstance(s, PointSet):
        p = s.point
        return (p.x, p.y, p.x, p.y)
    if isinstance(s, AxisRect):
        c = s.corner
        return (c.x, c.y, c.x + s.width, c.y + s.height)
    if isinstance(s, Polygon):
        xs = [p.x for p in s.vertices]
        ys = [p.y for p in s.vertices]
        return (min(xs), min(ys), max(xs), max(ys))
    if isinstance(s, PolarRect):
        pts = _polar_corners(s)
        cx, cy = s.center.x, s.center.y
        # Outer arc can extend past every corner at the axis directions.
        for k in range(4):
            t = k * math.pi / 2.0
            if _ang_in_span(t, s.theta_min, _span(s)):
                pts.append((cx + s.r_out * math.cos(t), cy + s.r_out * math.sin(t)))
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        return (min(xs), min(ys), max(xs), max(ys))
    raise TypeError(type(s).__name__)


def area(s: PlanarSet) -> float:
    if isinstance(s, Disk):
        return math.pi * s.radius * s.radius
    if isinstance(s, PointSet):
        return 0.0
    if isinstance(s, AxisRect):
        return s.width * s.height
    if isinstance(s, PolarRect):
        return 0.5 * (s.r_out**2 - s.r_in**2) * _span(s)
    if isinstance(s, Polygon):
        v = s.vertices
        acc = 0.0
        for i in range(len(v)):
            p, q = v[i], v[(i + 1) % len(v)]
            acc += p.x * q.y - q.x * p.y
        return abs(acc) / 2.0
    raise TypeError(type(s).__name__)


def contains_point(s: PlanarSet, x: float, y: float) -> bool:
    """Closed-set membership."""
    if isinstance(s, Disk):
        return hyp(x - s.center.x, y - s.center.y) <= s.radius + EPS
    if isinstance(s, PointSet):
        return hyp(x - s.point.x, y - s.point.y) <= EPS
    if isinstance(s, AxisRect):
        c = s.corner
        return (
            c.x - EPS <= x <= c.x + s.width + EPS
            and c.y - EPS <= y <= c.y + s.height + EPS
        )
    if isinstance(s, PolarRect):
        dx, dy = x - s.center.x, y - s.center.y
        r = hyp(dx, dy)
        if not (s.r_in - EPS <= r <= s.r_out + EPS):
            return False
        return _ang_in_span(math.atan2(dy, dx), s.theta_min, _span(s))
    if isinstance(s, Polygon):
        return _polygon_contains(s.vertices, x, y)
    raise TypeError(type(s).__name__)


def _polygon_contains(v: tuple[Point, ...], x: float, y: float) -> bool:
    n = len(v)
    # On-boundary counts as inside (closed set).
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        if _point_seg_dist2(x, y, a.x, a.y, b.x, b.y) <= EPS * EPS:
            return True
    inside = False
    j = n - 1
    for i in range(n):
        xi, yi = v[i].x, v[i].y
        xj, yj = v[j].x, v[j].y
        if (yi > y) != (yj > y):
            xc = xi + (y - yi) * (xj - xi) / (yj - yi)
            if x < xc:
                inside = not inside
        j = i
    return inside


def _point_seg_dist2(px, py, ax, ay, bx, by) -> float:
    vx, vy = bx - ax, by - ay
    wx, wy = px - ax, py - ay
    vv = vx * vx + vy * vy
    t = 0.0 if vv == 0.0 else max(0.0, min(1.0, (wx * vx + wy * vy) / vv))
    dx, dy = wx - t * vx, wy - t * vy
    return dx * dx + dy * dy


def point_seg_dist(px, py, ax, ay, bx, by) -> float:
    return math.sqrt(_point_seg_dist2(px, py, ax, ay, bx, by))


def boundary_elements(s: PlanarSet) -> list[Union[Seg, Arc]]:
    """Decompose the boundary into segments and circular arcs."""
    if isinstance(s, Disk):
        return [Arc((s.center.x, s.center.y), s.radius, 0.0, TWO_PI)]
    if isinstance(s, PointSet):
        return []
    if isinstance(s, AxisRect):
        c = s.corner
        p00 = (c.x, c.y)
        p10 = (c.x + s.width, c.y)
        p11 = (c.x + s.width, c.y + s.height)
        p01 = (c.x, c.y + s.height)
        return [Seg(p00, p10), Seg(p10, p11), Seg(p11, p01), Seg(p01, p00)]
    if isinstance(s, Polygon):
        v = s.vertices
        return [
            Seg((v[i].x, v[i].y), (v[(i + 1) % len(v)].x, v[(i + 1) % len(v)].y))
            for i in range(len(v))
        ]
    if isinstance(s, PolarRect):
        c = (s.center.x, s.center.y)
        out: list[Union[Seg, Arc]] = [
            Arc(c, s.r_in, s.theta_min, s.theta_max),
            Arc(c, s.r_out, s.theta_min, s.theta_max),
        ]
        if _span(s) < TWO_PI - EPS:
            # Radial edges exist only for a proper sector.
            for t in (s.theta_min, s.theta_max):
                u = (math.cos(t), math.sin(t))
                out.append(
                    Seg(
                        (c[0] + s.r_in * u[0], c[1] + s.r_in * u[1]),
                        (c[0] + s.r_out * u[0], c[1] + s.r_out * u[1]),
                    )
                )
        return out
    raise TypeError(type(s).__name__)


def nearest_distance(p: Point, s: PlanarSet) -> float:
    """min_{q in s} |p - q| (0 when p lies in s)."""
    if isinstance(s, Disk):
        return max(0.0, pdist(p, s.center) - s.radius)
    if isinstance(s, PointSet):
        return pdist(p, s.point)
    if isinstance(s, AxisRect):
        c = s.corner
        dx = max(c.x - p.x, 0.0, p.x - (c.x + s.width))
        dy = max(c.y - p.y, 0.0, p.y - (c.y + s.height))
        return math.hypot(dx, dy)
    if isinstance(s, Polygon):
        if _polygon_contains(s.vertices, p.x, p.y):
            return 0.0
        v = s.vertices
        return min(
            point_seg_dist(
                p.x, p.y, v[i].x, v[i].y, v[(i + 1) % len(v)].x, v[(i + 1) % len(v)].y
            )
            for i in range(len(v))
        )
    if isinstance(s, PolarRect):
        dx, dy = p.x - s.center.x, p.y - s.center.y
        d = hyp(dx, dy)
        if _ang_in_span(math.atan2(dy, dx), s.theta_min, _span(s)):
            if d < s.r_in:
                return s.r_in - d
            if d > s.r_out:
                return d - s.r_out
            return 0.0
        # Outside the wedge: closest point sits on a radial edge.
        best = math.inf
        for t in (s.theta_min, s.theta_max):
            u, w = math.cos(t), math.sin(t)
            best = min(
                best,
                point_seg_dist(
                    p.x,
                    p.y,
                    s.center.x + s.r_in * u,
                    s.center.y + s.r_in * w,
                    s.center.x + s.r_out * u,
                    s.center.y + s.r_out * w,
                ),
            )
        return best
    raise TypeError(type(s).__name__)


def farthest_distance(p: Point, s: PlanarSet) -> float:
    """max_{q in s} |p - q|."""
    if isinstance(s, Disk):
        return pdist(p, s.center) + s.radius
    if isinstance(s, PointSet):
        return pdist(p, s.point)
    if isinstance(s, AxisRect):
        c = s.corner
        dx = max(abs(p.x - c.x), abs(p.x - (c.x + s.width)))
        dy = max(abs(p.y - c.y), abs(p.y - (c.y + s.height)))
        return math.hypot(dx, dy)
    if isinstance(s, Polygon):
        return max(pdist(p, q) for q in s.vertices)
    if isinstance(s, PolarRect):
        best = max(hyp(p.x - q[0], p.y - q[1]) for q in _polar_corners(s))
        dx, dy = p.x - s.center.x, p.y - s.center.y
        t = math.atan2(-dy, -dx)  # direction away from p
        if _ang_in_span(t, s.theta_min, _span(s)):
            best = max(best, hyp(dx, dy) + s.r_out)
        return best
    raise TypeError(type(s).__name__)


def interior_seed(s: PlanarSet) -> Point:
    """A point in the interior of the set (EmptyInterior for a point)."""
    if isinstance(s, Disk):
        return s.center
    if isinstance(s, AxisRect):
        return Point(s.corner.x + s.width / 2.0, s.corner.y + s.height / 2.0)
    if isinstance(s, PolarRect):
        rm = 0.5 * (s.r_in + s.r_out)
        tm = 0.5 * (s.theta_min + s.theta_max)
        return Point(s.center.x + rm * math.cos(tm), s.center.y + rm * math.sin(tm))
    if isinstance(s, Polygon):
        # Centroid works for the convex-ish polygons used here; fall back
        # to a vertex-adjacent probe if the centroid escapes the polygon.
        cx = sum(p.x for p in s.vertices) / len(s.vertices)
        cy = sum(p.y for p in s.vertices) / len(s.vertices)
        if _polygon_contains(s.vertices, cx, cy):
            return Point(cx, cy)
        a, b, c = s.vertices[0], s.vertices[1], s.vertices[2]
        return Point((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    raise EmptyInterior(f"{type(s).__name__} has no interior point")


def representative_point(s: PlanarSet) -> Point:
    if isinstance(s, PointSet):
        return s.point
    return interior_seed(s)
