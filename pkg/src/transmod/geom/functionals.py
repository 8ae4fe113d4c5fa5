"""Geometric functionals on planar sets.

Fatness, quasiroundness, annular width, the two disk-counting bounds,
and exact area-of-intersection helpers used both here and by the
density certificates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy import optimize

from ..errors import (
    DegenerateContinuum,
    EmptyInterior,
    OverlappingDisks,
    PreconditionViolated,
)
from .distance import element_distance, set_distance, sets_overlap
from .shapes import (
    EPS,
    TWO_PI,
    Annulus,
    Arc,
    AxisRect,
    Disk,
    PlanarSet,
    Point,
    PointSet,
    PolarRect,
    Polygon,
    Seg,
    _ang_in_span,
    _span,
    area,
    boundary_elements,
    contains_point,
    diameter,
    farthest_distance,
    nearest_distance,
    pdist,
)


# ---------------------------------------------------------------------------
# exact ball-intersection areas


def disk_disk_area(c1: Point, r1: float, c2: Point, r2: float) -> float:
    """Exact area of the lens B[c1,r1] ∩ B[c2,r2]."""
    d = pdist(c1, c2)
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        rm = min(r1, r2)
        return math.pi * rm * rm
    # Two circular segments joined along the radical chord.
    a1 = math.acos(max(-1.0, min(1.0, (d * d + r1 * r1 - r2 * r2) / (2 * d * r1))))
    a2 = math.acos(max(-1.0, min(1.0, (d * d + r2 * r2 - r1 * r1) / (2 * d * r2))))
    return (
        r1 * r1 * (a1 - math.sin(2 * a1) / 2) + r2 * r2 * (a2 - math.sin(2 * a2) / 2)
    )


def circle_polygon_area(center: Point, r: float, vertices: Sequence[Point]) -> float:
    """Exact area of B[center,r] ∩ polygon.

    Signed accumulation of per-edge contributions: chord pieces inside the
    circle add triangle areas, pieces outside add circular sectors.  Works
    for any simple polygon regardless of orientation.
    """
    cx, cy = center.x, center.y
    total = 0.0
    n = len(vertices)
    for i in range(n):
        ax, ay = vertices[i].x - cx, vertices[i].y - cy
        bx, by = vertices[(i + 1) % n].x - cx, vertices[(i + 1) % n].y - cy
        total += _edge_circle_contribution(ax, ay, bx, by, r)
    return abs(total)


def _edge_circle_contribution(ax, ay, bx, by, r) -> float:
    # Split the edge at its circle crossings, then add triangle area for
    # inside pieces and sector area for outside pieces.
    vx, vy = bx - ax, by - ay
    A = vx * vx + vy * vy
    ts = [0.0, 1.0]
    if A > 0.0:
        B = 2.0 * (ax * vx + ay * vy)
        C = ax * ax + ay * ay - r * r
        disc = B * B - 4.0 * A * C
        if disc > 0.0:
            rt = math.sqrt(disc)
            for t in ((-B - rt) / (2 * A), (-B + rt) / (2 * A)):
                if 1e-14 < t < 1.0 - 1e-14:
                    ts.append(t)
    ts.sort()
    acc = 0.0
    for k in range(len(ts) - 1):
        t0, t1 = ts[k], ts[k + 1]
        if t1 - t0 <= 1e-15:
            continue
        mx, my = ax + 0.5 * (t0 + t1) * vx, ay + 0.5 * (t0 + t1) * vy
        px, py = ax + t0 * vx, ay + t0 * vy
        qx, qy = ax + t1 * vx, ay + t1 * vy
        if mx * mx + my * my <= r * r:
            acc += 0.5 * (px * qy - qx * py)
        else:
            ang = math.atan2(py * qx - px * qy, px * qx + py * qy)
            acc += -0.5 * r * r * ang
    return acc


def _polar_rect_ball_area(s: PolarRect, center: Point, r: float) -> float:
    # Quadrature in the sector's own polar angle: for each ray the overlap
    # with the ball is a single radial interval, found from a quadratic.
    from scipy.integrate import quad

    cx, cy = s.center.x, s.center.y
    dx, dy = center.x - cx, center.y - cy

    def slice_area(theta: float) -> float:
        ux, uy = math.cos(theta), math.sin(theta)
        # |t*u - d| <= r  =>  t^2 - 2 t (u.d) + |d|^2 - r^2 <= 0
        b = ux * dx + uy * dy
        c = dx * dx + dy * dy - r * r
        disc = b * b - c
        if disc <= 0.0:
            return 0.0
        rt = math.sqrt(disc)
        t1, t2 = max(b - rt, s.r_in), min(b + rt, s.r_out)
        if t2 <= t1:
            return 0.0
        return 0.5 * (t2 * t2 - t1 * t1)

    val, _ = quad(slice_area, s.theta_min, s.theta_max, limit=200, epsabs=1e-10)
    return val


def area_ball_intersection(s: PlanarSet, center: Point, r: float) -> float:
    """Area of s ∩ B[center,r]; exact except polar_rect (quadrature)."""
    if r <= 0.0:
        return 0.0
    if isinstance(s, Disk):
        return disk_disk_area(s.center, s.radius, center, r)
    if isinstance(s, PointSet):
        return 0.0
    if isinstance(s, AxisRect):
        c = s.corner
        verts = (
            Point(c.x, c.y),
            Point(c.x + s.width, c.y),
            Point(c.x + s.width, c.y + s.height),
            Point(c.x, c.y + s.height),
        )
        return circle_polygon_area(center, r, verts)
    if isinstance(s, Polygon):
        return circle_polygon_area(center, r, s.vertices)
    if isinstance(s, PolarRect):
        return _polar_rect_ball_area(s, center, r)
    raise TypeError(type(s).__name__)


def balls_squared_mass(
    centers: Sequence[Point], radii: Sequence[float], coeffs: Sequence[float],
    scale: float = 1.0,
) -> float:
    """∫ (Σ a_i 1_{B(x_i, scale*r_i)})² dA, exact via pairwise lens areas.

    Expanding the square leaves only pairwise intersection terms, so no
    triple-overlap bookkeeping is needed even when the scaled balls meet.
    """
    k = len(centers)
    total = 0.0
    for i in range(k):
        ri = scale * radii[i]
        total += coeffs[i] * coeffs[i] * math.pi * ri * ri
        for j in range(i + 1, k):
            ov = disk_disk_area(centers[i], ri, centers[j], scale * radii[j])
            if ov > 0.0:
                total += 2.0 * coeffs[i] * coeffs[j] * ov
    return total


# ---------------------------------------------------------------------------
# fatness


@dataclass(frozen=True)
class FatnessReport:
    tau_estimate: float
    witness_worst: tuple[Point, float]
    samples_used: int
    tau: float
    verdict: bool


def _fatness_centers(s: PlanarSet, k: int) -> list[Point]:
    # Boundary-biased candidates: the infimum sits on the boundary
    # (corners first) with the ball blown up to the farthest point.
    pts: list[Point] = []
    if isinstance(s, Disk):
        c, r = s.center, s.radius
        for j in range(max(k, 8)):
            t = TWO_PI * j / max(k, 8)
            pts.append(Point(c.x + r * math.cos(t), c.y + r * math.sin(t)))
        pts.append(c)
        return pts
    if isinstance(s, AxisRect):
        c = s.corner
        corners = [
            Point(c.x, c.y),
            Point(c.x + s.width, c.y),
            Point(c.x + s.width, c.y + s.height),
            Point(c.x, c.y + s.height),
        ]
        pts.extend(corners)
        for j in range(1, k):
            t = j / k
            pts.append(Point(c.x + t * s.width, c.y))
            pts.append(Point(c.x + t * s.width, c.y + s.height))
            pts.append(Point(c.x, c.y + t * s.height))
            pts.append(Point(c.x + s.width, c.y + t * s.height))
        pts.append(Point(c.x + s.width / 2, c.y + s.height / 2))
        return pts
    if isinstance(s, Polygon):
        pts.extend(s.vertices)
        v = s.vertices
        for i in range(len(v)):
            a, b = v[i], v[(i + 1) % len(v)]
            for j in range(1, max(2, k // len(v))):
                t = j / max(2, k // len(v))
                pts.append(Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
        return pts
    if isinstance(s, PolarRect):
        for el in boundary_elements(s):
            if isinstance(el, Seg):
                for j in range(k + 1):
                    t = j / k
                    pts.append(
                        Point(
                            el.a[0] + t * (el.b[0] - el.a[0]),
                            el.a[1] + t * (el.b[1] - el.a[1]),
                        )
                    )
            else:
                for j in range(k + 1):
                    t = el.t0 + (el.t1 - el.t0) * j / k
                    pts.append(
                        Point(
                            el.center[0] + el.radius * math.cos(t),
                            el.center[1] + el.radius * math.sin(t),
                        )
                    )
        return pts
    raise TypeError(type(s).__name__)


def is_tau_fat(A: PlanarSet, tau: float, sample_density: int = 24) -> FatnessReport:
    """Estimate inf area(A ∩ B(x,r)) / (π r²) over x ∈ A, A ⊄ B(x,r).

    The returned estimate is an upper bound on the true infimum (it is a
    sampled minimum), so a verdict of False is conclusive while True
    certifies only the sampled pairs.
    """
    if isinstance(A, PointSet) or diameter(A) <= 0.0:
        raise DegenerateContinuum("fatness needs a nondegenerate set")
    d = diameter(A)
    best = math.inf
    witness = (Point(0.0, 0.0), 0.0)
    used = 0
    for x in _fatness_centers(A, sample_density):
        rmax = farthest_distance(x, A)
        radii = list(
            np.geomspace(d * 1e-3, rmax, num=max(4, sample_density))
        )
        radii.append(rmax)
        if d <= rmax:
            radii.append(d)
        for r in radii:
            if r <= 0.0 or r > rmax + EPS:
                continue
            ratio = area_ball_intersection(A, x, r) / (math.pi * r * r)
            used += 1
            if ratio < best:
                best = ratio
                witness = (x, r)
    return FatnessReport(
        tau_estimate=best,
        witness_worst=witness,
        samples_used=used,
        tau=tau,
        # relative slack keeps exact closed-form ties from flipping on round-off
        verdict=best >= tau * (1.0 - 1e-9),
    )


# ---------------------------------------------------------------------------
# quasiroundness


def _boundary_distance(s: PlanarSet, x: float, y: float) -> float:
    els = boundary_elements(s)
    best = math.inf
    for el in els:
        if isinstance(el, Seg):
            best = min(best, element_distance(el, Seg((x, y), (x, y))))
        else:
            dx, dy = x - el.center[0], y - el.center[1]
            dd = math.hypot(dx, dy)
            if _ang_in_span(math.atan2(dy, dx), el.t0, el.t1 - el.t0):
                best = min(best, abs(dd - el.radius))
            else:
                for t in (el.t0, el.t1):
                    ex = el.center[0] + el.radius * math.cos(t)
                    ey = el.center[1] + el.radius * math.sin(t)
                    best = min(best, math.hypot(x - ex, y - ey))
    return best


def quasiroundness(A: PlanarSet) -> float:
    """Minimal ball-sandwich ratio λ with B(x,r) ⊂ A ⊂ B(x,λr).

    Closed form for disks and rectangles; for polygons and annular
    sectors the candidate center is the Chebyshev center (the inscribed
    ball is maximized numerically).
    """
    if isinstance(A, PointSet):
        raise EmptyInterior("quasiroundness needs nonempty interior")
    if isinstance(A, Disk):
        return 1.0
    if isinstance(A, AxisRect):
        return math.hypot(A.width, A.height) / min(A.width, A.height)
    if isinstance(A, (Polygon, PolarRect)):
        from .shapes import interior_seed

        seed = interior_seed(A)

        def neg_inradius(v):
            if not contains_point(A, v[0], v[1]):
                return 0.0
            return -_boundary_distance(A, v[0], v[1])

        res = optimize.minimize(
            neg_inradius,
            np.array([seed.x, seed.y]),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000},
        )
        x, y = res.x
        rin = _boundary_distance(A, x, y)
        if rin <= 0.0:
            raise EmptyInterior("no inscribed ball found")
        return farthest_distance(Point(x, y), A) / rin
    raise TypeError(type(A).__name__)


# ---------------------------------------------------------------------------
# annulus functionals


def annular_width(A: Annulus, C: PlanarSet) -> float:
    """w_A(C) = log of the radial reach ratio of C inside A; 0 if disjoint.

    For a connected C the distances to the annulus center form an
    interval, so the reach is the interval [nearest, farthest] clamped
    to [r, R].
    """
    x = A.center
    dmin = nearest_distance(x, C)
    dmax = farthest_distance(x, C)
    lo = max(A.r, dmin)
    hi = min(A.R, dmax)
    if lo > hi:
        return 0.0
    return math.log(hi / lo)


def radial_reach(A: Annulus, C: PlanarSet) -> tuple[float, float] | None:
    """The clamped [r_C, R_C] interval, or None when C misses A."""
    x = A.center
    lo = max(A.r, nearest_distance(x, C))
    hi = min(A.R, farthest_distance(x, C))
    if lo > hi:
        return None
    return lo, hi


def count_crossing_disks(A: Annulus, disks: Sequence[Disk]) -> int:
    """Count disks meeting both B[center,r] and the complement of B(center,R)."""
    for i in range(len(disks)):
        for j in range(i + 1, len(disks)):
            d = pdist(disks[i].center, disks[j].center)
            if d <= disks[i].radius + disks[j].radius:
                raise OverlappingDisks(f"disks {i} and {j} intersect")
    n = 0
    for dk in disks:
        d = pdist(dk.center, A.center)
        if d - dk.radius <= A.r and d + dk.radius >= A.R:
            n += 1
    return n


def fat_meeting_bound(tau: float, lam: float) -> float:
    return (lam * lam + 6.0 * lam + 1.0) / tau


def count_fat_meeting(
    E: PlanarSet, sets: Sequence[PlanarSet], tau: float, lam: float
) -> int:
    """Count members intersecting E, after checking the size/disjointness
    hypotheses (fatness of the members is the caller's responsibility)."""
    dE = diameter(E)
    for i, s in enumerate(sets):
        if lam * diameter(s) < dE:
            raise PreconditionViolated(f"set {i} too small: lam*diam < diam(E)")
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if isinstance(sets[i], Disk) and isinstance(sets[j], Disk):
                d = pdist(sets[i].center, sets[j].center)
                if d <= sets[i].radius + sets[j].radius:
                    raise PreconditionViolated(f"sets {i},{j} not disjoint")
            elif set_distance(sets[i], sets[j]) <= 0.0:
                raise PreconditionViolated(f"sets {i},{j} not disjoint")
    n = 0
    for s in sets:
        if isinstance(E, Disk) and isinstance(s, Disk):
            if pdist(E.center, s.center) <= E.radius + s.radius:
                n += 1
        elif sets_overlap(E, s):
            n += 1
    return n
