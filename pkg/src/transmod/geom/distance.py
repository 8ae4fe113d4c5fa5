"""Exact distances between planar sets.

Set-to-set distance reduces to a case analysis over boundary elements
(segments and circular arcs) once containment and overlap are ruled out.
All pair cases are closed-form; nothing here samples or iterates.
"""
from __future__ import annotations

import math
from typing import Union

from ..errors import DegenerateContinuum, NotDisjoint
from .shapes import (
    EPS,
    TWO_PI,
    Arc,
    PlanarSet,
    Point,
    PointSet,
    Seg,
    _ang_in_span,
    boundary_elements,
    contains_point,
    diameter,
    hyp,
    nearest_distance,
    point_seg_dist,
    representative_point,
)


def _seg_seg_dist(s: Seg, t: Seg) -> float:
    ax, ay = s.a
    bx, by = s.b
    cx, cy = t.a
    dx, dy = t.b
    if _segments_intersect(ax, ay, bx, by, cx, cy, dx, dy):
        return 0.0
    return min(
        point_seg_dist(ax, ay, cx, cy, dx, dy),
        point_seg_dist(bx, by, cx, cy, dx, dy),
        point_seg_dist(cx, cy, ax, ay, bx, by),
        point_seg_dist(dx, dy, ax, ay, bx, by),
    )


def _segments_intersect(ax, ay, bx, by, cx, cy, dx, dy) -> bool:
    def orient(px, py, qx, qy, rx, ry):
        return (qx - px) * (ry - py) - (qy - py) * (rx - px)

    o1 = orient(ax, ay, bx, by, cx, cy)
    o2 = orient(ax, ay, bx, by, dx, dy)
    o3 = orient(cx, cy, dx, dy, ax, ay)
    o4 = orient(cx, cy, dx, dy, bx, by)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    # Collinear touching cases fall through to endpoint distances, which
    # return 0 there anyway, so only the proper crossing matters.
    return False


def _arc_point_dist(a: Arc, px: float, py: float) -> float:
    dx, dy = px - a.center[0], py - a.center[1]
    d = hyp(dx, dy)
    if _ang_in_span(math.atan2(dy, dx), a.t0, a.t1 - a.t0):
        return abs(d - a.radius)
    best = math.inf
    for t in (a.t0, a.t1):
        ex = a.center[0] + a.radius * math.cos(t)
        ey = a.center[1] + a.radius * math.sin(t)
        best = min(best, hyp(px - ex, py - ey))
    return best


def _arc_endpoints(a: Arc) -> list[tuple[float, float]]:
    return [
        (a.center[0] + a.radius * math.cos(t), a.center[1] + a.radius * math.sin(t))
        for t in (a.t0, a.t1)
    ]


def _seg_arc_dist(s: Seg, a: Arc) -> float:
    # Candidate closest pairs: segment endpoints vs arc, arc endpoints vs
    # segment, and the foot of the arc center on the segment (the radial
    # direction through the foot is where an interior-interior minimum
    # can occur).  A proper crossing makes the distance 0.
    if _seg_circle_crosses_arc(s, a):
        return 0.0
    best = math.inf
    for px, py in (s.a, s.b):
        best = min(best, _arc_point_dist(a, px, py))
    for px, py in _arc_endpoints(a):
        best = min(best, point_seg_dist(px, py, s.a[0], s.a[1], s.b[0], s.b[1]))
    fx, fy = _foot_on_seg(a.center[0], a.center[1], s)
    best = min(best, _arc_point_dist(a, fx, fy))
    return best


def _foot_on_seg(px, py, s: Seg) -> tuple[float, float]:
    ax, ay = s.a
    bx, by = s.b
    vx, vy = bx - ax, by - ay
    vv = vx * vx + vy * vy
    t = 0.0 if vv == 0.0 else max(0.0, min(1.0, ((px - ax) * vx + (py - ay) * vy) / vv))
    return ax + t * vx, ay + t * vy


def _seg_circle_crosses_arc(s: Seg, a: Arc) -> bool:
    """Whether the segment meets the arc (not just its full circle)."""
    ax, ay = s.a
    bx, by = s.b
    cx, cy = a.center
    vx, vy = bx - ax, by - ay
    wx, wy = ax - cx, ay - cy
    A = vx * vx + vy * vy
    B = 2.0 * (vx * wx + vy * wy)
    C = wx * wx + wy * wy - a.radius * a.radius
    disc = B * B - 4.0 * A * C
    if disc < 0.0 or A == 0.0:
        return False
    rt = math.sqrt(disc)
    for t in ((-B - rt) / (2 * A), (-B + rt) / (2 * A)):
        if -EPS <= t <= 1.0 + EPS:
            px, py = ax + t * vx, ay + t * vy
            phi = math.atan2(py - cy, px - cx)
            if _ang_in_span(phi, a.t0, a.t1 - a.t0):
                return True
    return False


def _arc_arc_dist(a: Arc, b: Arc) -> float:
    cdist = hyp(a.center[0] - b.center[0], a.center[1] - b.center[1])
    if cdist <= EPS:
        # Concentric arcs: radial gap if the angular spans overlap.
        if _spans_overlap(a, b):
            return abs(a.radius - b.radius)
        best = math.inf
        for p in _arc_endpoints(a):
            best = min(best, _arc_point_dist(b, p[0], p[1]))
        for p in _arc_endpoints(b):
            best = min(best, _arc_point_dist(a, p[0], p[1]))
        return best
    # Circles intersect -> check whether a crossing point lies on both arcs.
    for px, py in _circle_circle_points(a, b):
        pa = math.atan2(py - a.center[1], px - a.center[0])
        pb = math.atan2(py - b.center[1], px - b.center[0])
        if _ang_in_span(pa, a.t0, a.t1 - a.t0) and _ang_in_span(pb, b.t0, b.t1 - b.t0):
            return 0.0
    # Otherwise the minimum is at an endpoint or along the center line.
    best = math.inf
    for p in _arc_endpoints(a):
        best = min(best, _arc_point_dist(b, p[0], p[1]))
    for p in _arc_endpoints(b):
        best = min(best, _arc_point_dist(a, p[0], p[1]))
    # Interior-interior candidate: both radial directions along the
    # center-to-center axis (near side of each circle).
    ux = (b.center[0] - a.center[0]) / cdist
    uy = (b.center[1] - a.center[1]) / cdist
    ta = math.atan2(uy, ux)
    tb = math.atan2(-uy, -ux)
    if _ang_in_span(ta, a.t0, a.t1 - a.t0) and _ang_in_span(tb, b.t0, b.t1 - b.t0):
        gap = cdist - a.radius - b.radius
        if gap >= 0.0:
            best = min(best, gap)
        else:
            # One circle reaches past the other along the axis; nested or
            # overlapping rings.  Nested case: |cdist - |ra - rb||.
            best = min(best, abs(abs(a.radius - b.radius) - cdist))
    elif _ang_in_span(ta, a.t0, a.t1 - a.t0) and _ang_in_span(
        math.atan2(uy, ux), b.t0, b.t1 - b.t0
    ):
        # Near point of a against far-side arc of b (nested rings).
        best = min(best, abs(cdist + b.radius - a.radius))
    return best


def _spans_overlap(a: Arc, b: Arc) -> bool:
    wa, wb = a.t1 - a.t0, b.t1 - b.t0
    if wa >= TWO_PI - EPS or wb >= TWO_PI - EPS:
        return True
    for t in (a.t0, a.t1):
        if _ang_in_span(t, b.t0, wb):
            return True
    for t in (b.t0, b.t1):
        if _ang_in_span(t, a.t0, wa):
            return True
    return False


def _circle_circle_points(a: Arc, b: Arc) -> list[tuple[float, float]]:
    x0, y0, r0 = a.center[0], a.center[1], a.radius
    x1, y1, r1 = b.center[0], b.center[1], b.radius
    d = hyp(x1 - x0, y1 - y0)
    if d > r0 + r1 or d < abs(r0 - r1) or d == 0.0:
        return []
    e = (r0 * r0 - r1 * r1 + d * d) / (2.0 * d)
    h2 = r0 * r0 - e * e
    if h2 < 0.0:
        return []
    h = math.sqrt(max(0.0, h2))
    mx = x0 + e * (x1 - x0) / d
    my = y0 + e * (y1 - y0) / d
    ox = -(y1 - y0) / d
    oy = (x1 - x0) / d
    return [(mx + h * ox, my + h * oy), (mx - h * ox, my - h * oy)]


def element_distance(e: Union[Seg, Arc], f: Union[Seg, Arc]) -> float:
    if isinstance(e, Seg) and isinstance(f, Seg):
        return _seg_seg_dist(e, f)
    if isinstance(e, Seg) and isinstance(f, Arc):
        return _seg_arc_dist(e, f)
    if isinstance(e, Arc) and isinstance(f, Seg):
        return _seg_arc_dist(f, e)
    return _arc_arc_dist(e, f)


def sets_overlap(s: PlanarSet, t: PlanarSet) -> bool:
    """Whether two closed sets intersect."""
    if isinstance(s, PointSet):
        return contains_point(t, s.point.x, s.point.y)
    if isinstance(t, PointSet):
        return contains_point(s, t.point.x, t.point.y)
    ps = representative_point(s)
    pt = representative_point(t)
    if contains_point(t, ps.x, ps.y) or contains_point(s, pt.x, pt.y):
        return True
    eb = boundary_elements(s)
    fb = boundary_elements(t)
    return any(element_distance(e, f) <= EPS for e in eb for f in fb)


def set_distance(s: PlanarSet, t: PlanarSet) -> float:
    """dist(s, t) = min over boundary element pairs; 0 when they meet."""
    if isinstance(s, PointSet):
        return nearest_distance(s.point, t)
    if isinstance(t, PointSet):
        return nearest_distance(t.point, s)
    ps = representative_point(s)
    pt = representative_point(t)
    if contains_point(t, ps.x, ps.y) or contains_point(s, pt.x, pt.y):
        return 0.0
    return min(
        element_distance(e, f)
        for e in boundary_elements(s)
        for f in boundary_elements(t)
    )


def relative_distance(s: PlanarSet, t: PlanarSet) -> float:
    """dist(s,t) / min(diam s, diam t) for disjoint nondegenerate sets."""
    ds, dt = diameter(s), diameter(t)
    if ds <= 0.0 or dt <= 0.0:
        raise DegenerateContinuum("relative distance needs nondegenerate sets")
    d = set_distance(s, t)
    if d <= 0.0:
        raise NotDisjoint("sets touch or overlap")
    return d / min(ds, dt)
