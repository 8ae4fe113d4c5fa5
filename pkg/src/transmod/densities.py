"""Analytic admissible densities and their mass certificates.

Two constructions live here, both producing explicit upper bounds that
the numerical solver must match or beat.

The first is the wide-subannulus certificate for a connecting family
Γ(E, F): starting from the annulus A[x, diam E, dist(E,F)] anchored at a
point x of E, continua whose radial extent is "wide" (log-reach above
the cube root of the annulus' log-ratio) are absorbed into the annulus
at most twice, after which the truncated radial density

    rho(z) = 1 / (L * |z - x|)   on A' = A[x, r', R'],  L = log(R'/r')

is admissible for the family avoiding the absorbed continua, each
remaining continuum entering through a single weight w_{A'}(K_i)/L.
The total mass obeys the closed three-term bound

    2*pi/L + 32/L + 32/L**(1/3),

which turns into the universal decay function phi(t) of the relative
distance t = Delta(E, F).

The second is density inflation: a transboundary-admissible mass
distribution on a domain with lambda-quasiround complementary continua
is converted into a classical admissible density by doubling and
smearing each vertex weight over the inflated ball B(x_i, 2*lambda*r_i).
This is the constructive half of the comparison
mod_K(Gamma) >= min(c1, c2 * mod(Gamma)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, NotApplicable
from .geom import (
    Annulus,
    AxisRect,
    Disk,
    PlanarSet,
    Point,
    PolarRect,
    Polygon,
    Seg,
    annular_width,
    boundary_elements,
    bounding_box,
    contains_point,
    diameter,
    radial_reach,
    relative_distance,
    set_distance,
)
from .domain import DomainSpec, QuotientGrid, FREE
from .modsolve.solver import DensityCertificate

TWO_PI = 2.0 * math.pi

# Relative-distance threshold below which no certificate is attempted.
MIN_DELTA = 14.0 ** 3

# Minimal admissible ratio R'/r' of a certificate annulus.
MIN_RATIO = 14.0

# Log-space tolerance for wide/narrow classification; near-ties count
# as wide so the narrowing never under-collects.
WIDE_TOL = 1e-12

# Constant factor of the decay function phi.
PHI_COEFF = (TWO_PI + 32.0) / math.log(14.0) ** (2.0 / 3.0) + 32.0


def phi(t: float) -> float:
    """Decay function (log t)^(-1/27) * PHI_COEFF, strictly decreasing.

    Defined for t > 1; the value tends to 0 as t grows, which is the
    quantitative content of the transboundary lower-bound estimate.
    """
    if not (t > 1.0):
        raise DomainError(f"phi requires t > 1, got {t}")
    return math.log(t) ** (-1.0 / 27.0) * PHI_COEFF


# ---------------------------------------------------------------------------
# anchor-point selection


def _diameter_candidates(s: PlanarSet) -> list[tuple[Point, Point]]:
    """Candidate point pairs among which the diameter is attained."""
    if isinstance(s, Disk):
        c, r = s.center, s.radius
        return [(Point(c.x - r, c.y), Point(c.x + r, c.y))]
    if isinstance(s, AxisRect):
        x0, y0 = s.corner.x, s.corner.y
        x1, y1 = x0 + s.width, y0 + s.height
        return [
            (Point(x0, y0), Point(x1, y1)),
            (Point(x0, y1), Point(x1, y0)),
        ]
    if isinstance(s, Polygon):
        vs = s.vertices
        out = []
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                out.append((vs[i], vs[j]))
        return out
    if isinstance(s, PolarRect):
        c = s.center
        corners = []
        for r in (s.r_in, s.r_out):
            for t in (s.theta_min, s.theta_max):
                corners.append(Point(c.x + r * math.cos(t), c.y + r * math.sin(t)))
        out = []
        for i in range(len(corners)):
            for j in range(i + 1, len(corners)):
                out.append((corners[i], corners[j]))
        # A span of at least pi admits an antipodal outer-circle pair.
        if s.theta_max - s.theta_min >= math.pi:
            a = s.theta_min
            p = Point(c.x + s.r_out * math.cos(a), c.y + s.r_out * math.sin(a))
            q = Point(c.x - s.r_out * math.cos(a), c.y - s.r_out * math.sin(a))
            out.append((p, q))
        return out
    raise TypeError(type(s).__name__)


def _anchor_point(E: PlanarSet) -> Point:
    """Lowest-lexicographic member of a maximal-distance pair of E.

    Any point of E would do mathematically; a fixed rule keeps every
    downstream certificate reproducible bit for bit.
    """
    best_d = -1.0
    best: list[Point] = []
    for p, q in _diameter_candidates(E):
        d = math.hypot(p.x - q.x, p.y - q.y)
        if d > best_d + 1e-12:
            best_d, best = d, [p, q]
        elif d > best_d - 1e-12:
            best.extend((p, q))
    return min(best, key=lambda p: (p.x, p.y))


# ---------------------------------------------------------------------------
# certificate type


OUTER_INDEX = -1  # pseudo-index for the unbounded complementary component


@dataclass(frozen=True)
class AnnulusCertificate:
    """Radial admissible density on a subannulus, with continuum weights.

    ``annulus`` is A' = A[x, r', R']; the density is
    1/(log_ratio * |z - x|) inside A' and 0 elsewhere.  ``J`` lists the
    continua absorbed while narrowing (at most two); curves of the
    certified family must avoid them, and their weight is 0.  Every
    other continuum meeting A' appears in ``weights`` with
    w_{A'}(K_i) / log_ratio.  ``stage_ratios`` records R/r after each
    narrowing step; ``formally_covered`` says whether every stage kept
    the ratio at least 14, which is what the bound derivation needs.
    """

    annulus: Annulus
    J: tuple[int, ...]
    weights: dict[int, float]
    log_ratio: float
    delta: float
    stage_ratios: tuple[float, ...]
    formally_covered: bool
    mass_bound: float = field(default=0.0)

    def __post_init__(self) -> None:
        L = self.log_ratio
        object.__setattr__(
            self, "mass_bound", TWO_PI / L + 32.0 / L + 32.0 / L ** (1.0 / 3.0)
        )
        if self.annulus.R / self.annulus.r < MIN_RATIO - 1e-9:
            raise NotApplicable(
                f"certificate annulus ratio {self.annulus.R / self.annulus.r:.6g} < 14"
            )
        if len(self.J) > 2:
            raise NotApplicable("more than two absorbed continua")

    def density_at(self, x: float, y: float) -> float:
        a = self.annulus
        d = math.hypot(x - a.center.x, y - a.center.y)
        if d < a.r or d > a.R or d == 0.0:
            return 0.0
        return 1.0 / (self.log_ratio * d)

    def cell_density(self, grid: QuotientGrid) -> DensityCertificate:
        """Sample the certificate on a quotient grid of the same domain."""
        X, Y = grid.centers()
        a = self.annulus
        D = np.hypot(X - a.center.x, Y - a.center.y)
        rho = np.zeros_like(D)
        inside = (D >= a.r) & (D <= a.R) & (D > 0.0)
        rho[inside] = 1.0 / (self.log_ratio * D[inside])
        rho[grid.status != FREE] = 0.0
        vw = {i: w for i, w in self.weights.items() if i >= 0}
        if OUTER_INDEX in self.weights and grid.outer_vertex is not None:
            vw[grid.outer_vertex] = self.weights[OUTER_INDEX]
        return DensityCertificate(rho_cells=rho, vertex_weights=vw, h=grid.h)


# ---------------------------------------------------------------------------
# wide-subannulus narrowing


def _outer_reach(spec: DomainSpec, x: Point) -> Optional[tuple[float, float]]:
    """Radial reach of the unbounded component beyond the ambient box."""
    if not spec.outer:
        return None
    lo, hi = spec.ambient
    if not (lo.x < x.x < hi.x and lo.y < x.y < hi.y):
        return (0.0, math.inf)
    d = min(x.x - lo.x, hi.x - x.x, x.y - lo.y, hi.y - x.y)
    return (d, math.inf)


def _clipped_width(reach: Optional[tuple[float, float]], a: Annulus) -> float:
    if reach is None:
        return 0.0
    lo = max(a.r, reach[0])
    hi = min(a.R, reach[1])
    if lo > hi:
        return 0.0
    return math.log(hi / lo)


def find_wide_subannulus(
    spec: DomainSpec, E: PlanarSet, F: PlanarSet
) -> Optional[AnnulusCertificate]:
    """Narrow A[x, diam E, dist(E,F)] past wide continua, at most twice.

    A continuum is wide in the current annulus when its log radial
    reach exceeds the cube root of the annulus' own log-ratio.  Each
    narrowing replaces the annulus by the wide continuum's reach
    interval and excludes that continuum from further play.  Two
    exclusions exhaust what a disjoint-disk complement can produce, so
    a third wide continuum signals non-disk input and yields None.

    Raises NotApplicable when the relative distance of E and F is at
    most 14^3, or when narrowing leaves an annulus thinner than ratio
    14, outside the regime the mass bound is derived for.
    """
    delta = relative_distance(E, F)
    if delta <= MIN_DELTA:
        raise NotApplicable(
            f"relative distance {delta:.6g} <= 14^3; no certificate in this regime"
        )
    x = _anchor_point(E)
    r0 = diameter(E)
    R0 = set_distance(E, F)
    cur = Annulus(x, r0, R0)
    ratios = [R0 / r0]
    J: list[int] = []

    def width_of(idx: int, a: Annulus) -> float:
        if idx == OUTER_INDEX:
            return _clipped_width(_outer_reach(spec, x), a)
        return annular_width(a, spec.continua[idx])

    indices = list(range(len(spec.continua)))
    if spec.outer:
        indices.append(OUTER_INDEX)

    while True:
        thr = math.log(cur.R / cur.r) ** (1.0 / 3.0)
        wide = [i for i in indices if i not in J
                and width_of(i, cur) > thr - WIDE_TOL]
        if not wide:
            break
        if len(J) == 2:
            # disjoint disks admit at most two annulus-spanning members
            return None
        d = wide[0]
        if d == OUTER_INDEX:
            reach = _outer_reach(spec, x)
            lo, hi = max(cur.r, reach[0]), min(cur.R, reach[1])
        else:
            lo, hi = radial_reach(cur, spec.continua[d])
        cur = Annulus(x, lo, hi)
        ratios.append(hi / lo)
        J.append(d)

    L = math.log(cur.R / cur.r)
    weights: dict[int, float] = {}
    for i in indices:
        if i in J:
            weights[i] = 0.0
            continue
        w = width_of(i, cur)
        if i == OUTER_INDEX:
            present = _clipped_width(_outer_reach(spec, x), cur) > 0.0 or w > 0.0
        else:
            present = radial_reach(cur, spec.continua[i]) is not None
        if present:
            weights[i] = w / L
    return AnnulusCertificate(
        annulus=cur,
        J=tuple(J),
        weights=weights,
        log_ratio=L,
        delta=delta,
        stage_ratios=tuple(ratios),
        formally_covered=all(r >= MIN_RATIO for r in ratios),
    )


# ---------------------------------------------------------------------------
# exact mass


def _ray_hits(s: PlanarSet, x: Point, ux: float, uy: float) -> list[float]:
    """Sorted parameters t >= 0 where the ray x + t*u meets bd(s)."""
    ts: list[float] = []
    for e in boundary_elements(s):
        if isinstance(e, Seg):
            ax, ay = e.a
            bx, by = e.b
            dx, dy = bx - ax, by - ay
            den = ux * dy - uy * dx
            if abs(den) < 1e-15:
                continue
            # solve x + t*u = a + s*(b-a)
            wx, wy = ax - x.x, ay - x.y
            t = (wx * dy - wy * dx) / den
            sp = (wx * uy - wy * ux) / den
            if t >= 0.0 and -1e-12 <= sp <= 1.0 + 1e-12:
                ts.append(t)
        else:
            cx, cy = e.center
            r = e.radius
            mx, my = x.x - cx, x.y - cy
            b = mx * ux + my * uy
            c = mx * mx + my * my - r * r
            disc = b * b - c
            if disc < 0.0:
                continue
            sq = math.sqrt(disc)
            for t in (-b - sq, -b + sq):
                if t < 0.0:
                    continue
                px, py = x.x + t * ux - cx, x.y + t * uy - cy
                ang = math.atan2(py, px)
                w = e.t1 - e.t0
                d = (ang - e.t0) % TWO_PI
                if d <= w + 1e-9 or d >= TWO_PI - 1e-9:
                    ts.append(t)
    ts.sort()
    return ts


def _ray_log_overlap(s: PlanarSet, x: Point, ang: float, r1: float, r2: float) -> float:
    """Sum of log(b/a) over maximal ray intervals inside s, clamped to [r1, r2]."""
    ux, uy = math.cos(ang), math.sin(ang)
    ts = _ray_hits(s, x, ux, uy)
    if not ts:
        return 0.0
    # walk the crossing parameters and keep intervals whose midpoint is inside
    pts = [0.0] + ts + [ts[-1] + 1.0]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a < 1e-15:
            continue
        mid = 0.5 * (a + b)
        if not contains_point(s, x.x + mid * ux, x.y + mid * uy):
            continue
        lo, hi = max(a, r1), min(b, r2)
        if hi > lo > 0.0:
            total += math.log(hi / lo)
    return total


def _angular_window(s: PlanarSet, x: Point) -> tuple[float, float]:
    """A [center, half-width] cone from x containing s (half-width pi = all)."""
    bx0, by0, bx1, by1 = bounding_box(s)
    cx, cy = 0.5 * (bx0 + bx1), 0.5 * (by0 + by1)
    rad = 0.5 * math.hypot(bx1 - bx0, by1 - by0)
    d = math.hypot(cx - x.x, cy - x.y)
    if d <= rad:
        return 0.0, math.pi
    return math.atan2(cy - x.y, cx - x.x), math.asin(min(1.0, rad / d))


# Simpson node count per continuum overlap integral; odd, dense enough
# to hold the quadrature error well below 1e-6 on chord-length kinks.
_N_THETA = 4097


def _overlap_integral(s: PlanarSet, x: Point, r1: float, r2: float) -> float:
    """integral over A[x,r1,r2] of |z-x|^(-2) restricted to s."""
    c, half = _angular_window(s, x)
    angs = np.linspace(c - half, c + half, _N_THETA)
    vals = np.array([_ray_log_overlap(s, x, a, r1, r2) for a in angs])
    return float(simpson(vals, x=angs))


def certificate_mass(cert: AnnulusCertificate, spec: DomainSpec) -> float:
    """Exact certificate mass: radial integral off the continua plus weights.

    The full-annulus radial term is 2*pi/L; each continuum's overlap
    with the annulus is subtracted by angular quadrature of the
    clamped chord log-lengths.  The result is checked against the
    three-term closed bound stored on the certificate.
    """
    a = cert.annulus
    L = cert.log_ratio
    mass = TWO_PI / L
    inv_L2 = 1.0 / (L * L)
    for i, s in enumerate(spec.continua):
        if radial_reach(a, s) is None:
            continue
        mass -= inv_L2 * _overlap_integral(s, a.center, a.r, a.R)
    mass += sum(w * w for w in cert.weights.values())
    assert mass <= cert.mass_bound * (1.0 + 1e-9), (
        f"certificate mass {mass:.6g} exceeds bound {cert.mass_bound:.6g}"
    )
    return mass


# ---------------------------------------------------------------------------
# density inflation


@dataclass(frozen=True)
class InflationResult:
    """Classical density produced from a transboundary one.

    ``in_regime`` reports whether the input mass met the smallness
    threshold 1/(4c^2) under which the inflated density is guaranteed
    admissible with bounded mass.  Outside the regime the density is
    still returned; the comparison bound is then vacuous (c1 branch).
    """

    g: DensityCertificate
    in_regime: bool
    c: float
    c1: float
    threshold: float
    input_mass: float

    @property
    def mass(self) -> float:
        return self.g.mass()


def inflate_density(
    grid: QuotientGrid,
    rho: DensityCertificate,
    balls: Optional[Mapping[int, tuple[Point, float]]] = None,
    lam: float = 1.0,
    tau: float = 0.25,
) -> InflationResult:
    """g = 2*(rho off the continua + sum_i rho_i/(lam*r_i) on B(x_i, 2*lam*r_i)).

    ``balls`` maps continuum index i to an inner-ball pair (x_i, r_i)
    with B(x_i, r_i) inside K_i inside B(x_i, lam*r_i); when omitted,
    disk continua supply their own centers and radii (lam = 1).  Never
    raises on a missed regime: the flag on the result carries it.
    """
    spec = grid.spec
    if balls is None:
        balls = {}
        for i, s in enumerate(spec.continua):
            if isinstance(s, Disk):
                balls[i] = (s.center, s.radius)
    c = (1.0 + 12.0 * lam + 4.0 * lam * lam) / tau
    threshold = 1.0 / (4.0 * c * c)
    input_mass = rho.mass()

    g = 2.0 * rho.rho_cells.copy()
    g[grid.status != FREE] = 0.0
    X, Y = grid.centers()
    for i, (center, r_i) in balls.items():
        w = rho.vertex_weights.get(i, 0.0)
        if w == 0.0 or r_i <= 0.0:
            continue
        ball = (X - center.x) ** 2 + (Y - center.y) ** 2 <= (2.0 * lam * r_i) ** 2
        g[ball & (grid.status == FREE)] += 2.0 * w / (lam * r_i)

    return InflationResult(
        g=DensityCertificate(rho_cells=g, vertex_weights={}, h=grid.h),
        in_regime=input_mass <= threshold,
        c=c,
        c1=1.0 / (8.0 * c * c),
        threshold=threshold,
        input_mass=input_mass,
    )
