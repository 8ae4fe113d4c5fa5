"""Oracle tests for the planar primitives and geometric functionals.

Expected values come from closed forms worked by hand, brute-force
grid/quadrature oracles implemented independently in this file, or
randomized falsification with fixed seeds.
"""

import math

import numpy as np
import pytest

from transmod.errors import (
    DegenerateContinuum,
    EmptyInterior,
    NotDisjoint,
    OverlappingDisks,
    PreconditionViolated,
)
from transmod.geom import (
    Annulus,
    AxisRect,
    Disk,
    Point,
    PointSet,
    PolarRect,
    Polygon,
    annular_width,
    balls_squared_mass,
    contains_point,
    count_crossing_disks,
    count_fat_meeting,
    fat_meeting_bound,
    is_tau_fat,
    quasiroundness,
    radial_reach,
    relative_distance,
)

try:
    from hypothesis import given, settings, strategies as st

    HAVE_HYPOTHESIS = True
except ImportError:  # pragma: no cover
    HAVE_HYPOTHESIS = False


# ---------------------------------------------------------------------------
# independent oracles


def rect_disk_area(x0, y0, w, h, cx, cy, r, n=4001):
    """Area of axis rect ∩ disk by chord-length integration."""
    a = max(x0, cx - r)
    b = min(x0 + w, cx + r)
    if a >= b:
        return 0.0
    xs = np.linspace(a, b, n)
    half = np.sqrt(np.maximum(r * r - (xs - cx) ** 2, 0.0))
    lo = np.maximum(y0, cy - half)
    hi = np.minimum(y0 + h, cy + half)
    return float(np.trapezoid(np.maximum(hi - lo, 0.0), xs))


def lens_area(d, r1, r2):
    """Intersection area of two disks at center distance d."""
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        rm = min(r1, r2)
        return math.pi * rm * rm
    a1 = math.acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    a2 = math.acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    tri = 0.5 * math.sqrt(
        max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
    )
    return r1 * r1 * a1 + r2 * r2 * a2 - tri


def disk_reach(annulus, c, rho):
    """Clamped [inf, sup] of |y - center| over the disk's part of the
    annulus ring, or None when they miss.  Closed form for disks."""
    d = math.hypot(c[0] - annulus.center.x, c[1] - annulus.center.y)
    lo = max(annulus.r, max(0.0, d - rho))
    hi = min(annulus.R, d + rho)
    if lo > hi:
        return None
    return lo, hi


def rect_fatness_oracle(w, h, n_pos=200, n_rad=200):
    """Brute-force inf of area(A ∩ B(x,r)) / (pi r^2) over boundary
    centers x and log-spaced radii r with A not inside B(x,r)."""
    diam = math.hypot(w, h)
    # walk the boundary at n_pos points
    per = 2 * (w + h)
    ts = np.linspace(0.0, per, n_pos, endpoint=False)
    pts = []
    for t in ts:
        if t < w:
            pts.append((t, 0.0))
        elif t < w + h:
            pts.append((w, t - w))
        elif t < 2 * w + h:
            pts.append((2 * w + h - t, h))
        else:
            pts.append((0.0, per - t))
    radii = np.exp(np.linspace(math.log(diam / 1e3), math.log(diam * 0.999), n_rad))
    best = math.inf
    corners = [(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)]
    for cx, cy in pts:
        far = max(math.hypot(cx - a, cy - b) for a, b in corners)
        for r in radii:
            if r >= far:  # rect fully inside the ball: excluded by definition
                continue
            ratio = rect_disk_area(0, 0, w, h, cx, cy, r, n=801) / (math.pi * r * r)
            best = min(best, ratio)
    return best


# ---------------------------------------------------------------------------
# relative distance


def test_relative_distance_collinear_disks():
    e = Disk(Point(0, 0), 0.5)
    f = Disk(Point(3, 0), 0.5)
    # gap 2.0, both diameters 1.0
    assert relative_distance(e, f) == pytest.approx(2.0, abs=1e-12)


def test_relative_distance_diagonal_rects():
    e = AxisRect(Point(0, 0), 1, 1)
    f = AxisRect(Point(3, 2), 1, 1)
    # nearest corners (1,1)-(3,2), diameters sqrt(2)
    want = math.sqrt(5) / math.sqrt(2)
    assert relative_distance(e, f) == pytest.approx(want, rel=1e-12)


def test_relative_distance_triangle_disk():
    e = Polygon((Point(0, 0), Point(1, 0), Point(0, 1)))
    f = Disk(Point(3, 0), 1.0)
    # gap along the x axis: 3 - 1 - 1 = 1; min diameter sqrt(2)
    assert relative_distance(e, f) == pytest.approx(1 / math.sqrt(2), rel=1e-12)


def test_relative_distance_polar_rect_disk():
    e = PolarRect(Point(0, 0), 1.0, 2.0, 0.0, math.pi / 2)
    f = Disk(Point(-3, 0), 0.5)
    # nearest point of the quarter ring is the corner (0,1)
    want = (math.sqrt(10) - 0.5) / 1.0
    assert relative_distance(e, f) == pytest.approx(want, rel=1e-12)


def test_relative_distance_thin_vertical_strips():
    # segment-like strips of height 1/4 separated by their own height
    w = 1e-9
    e = AxisRect(Point(0, 0), w, 0.25)
    f = AxisRect(Point(0.25 + w, 0), w, 0.25)
    assert relative_distance(e, f) == pytest.approx(1.0, abs=1e-9)


def test_relative_distance_rejects_points_and_overlap():
    with pytest.raises(DegenerateContinuum):
        relative_distance(PointSet(Point(0, 0)), Disk(Point(3, 0), 1))
    with pytest.raises(NotDisjoint):
        relative_distance(Disk(Point(0, 0), 1), Disk(Point(1, 0), 1))


if HAVE_HYPOTHESIS:
    finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
    radius = st.floats(0.01, 5, allow_nan=False, allow_infinity=False)

    @settings(max_examples=120, deadline=None)
    @given(finite, finite, radius, finite, finite, radius)
    def test_relative_distance_symmetric(x1, y1, r1, x2, y2, r2):
        e = Disk(Point(x1, y1), r1)
        f = Disk(Point(x2, y2), r2)
        gap = math.hypot(x2 - x1, y2 - y1) - r1 - r2
        if gap <= 1e-9:
            return  # only disjoint pairs are valid inputs
        assert relative_distance(e, f) == pytest.approx(
            relative_distance(f, e), rel=1e-12
        )

    @settings(max_examples=120, deadline=None)
    @given(finite, finite, radius, finite, finite, radius,
           st.floats(1e-3, 1e3, allow_nan=False))
    def test_relative_distance_scale_invariant(x1, y1, r1, x2, y2, r2, s):
        gap = math.hypot(x2 - x1, y2 - y1) - r1 - r2
        if gap <= 1e-9:
            return
        base = relative_distance(Disk(Point(x1, y1), r1), Disk(Point(x2, y2), r2))
        scaled = relative_distance(
            Disk(Point(s * x1, s * y1), s * r1), Disk(Point(s * x2, s * y2), s * r2)
        )
        assert scaled == pytest.approx(base, rel=1e-9)


# ---------------------------------------------------------------------------
# fatness


def test_disk_is_quarter_fat():
    rep = is_tau_fat(Disk(Point(0, 0), 1.0), 0.25)
    # worst case: boundary center with the ball just covering the disk
    assert rep.tau_estimate >= 0.25 - 1e-3
    assert rep.tau_estimate <= 0.25 + 0.02
    assert rep.verdict == (rep.tau_estimate >= rep.tau)


def test_unit_square_fatness():
    rep = is_tau_fat(AxisRect(Point(0, 0), 1, 1), 1 / (2 * math.pi))
    # worst case: corner center, radius near the diagonal
    want = 1 / (2 * math.pi)
    assert rep.tau_estimate >= want - 1e-3
    assert rep.tau_estimate <= want + 0.02


def test_long_rect_fatness_vs_grid_oracle():
    rep = is_tau_fat(AxisRect(Point(0, 0), 10, 1), 1 / (20 * math.pi))
    oracle = rect_fatness_oracle(10, 1)
    # the aspect-ratio lower bound holds with room to spare
    assert rep.tau_estimate >= 1 / (20 * math.pi) - 1e-3
    assert oracle >= 1 / (20 * math.pi) - 1e-3
    # both searches find the same worst-case basin (corner, large radius)
    assert rep.tau_estimate <= oracle * 1.10 + 1e-9
    (wx, r) = rep.witness_worst
    assert contains_point(AxisRect(Point(0, 0), 10, 1), wx.x, wx.y)
    far = max(math.hypot(wx.x - a, wx.y - b)
              for a, b in [(0, 0), (10, 0), (10, 1), (0, 1)])
    assert r < far + 1e-9  # witness ball must not swallow the rect


def test_fatness_rejects_degenerate():
    with pytest.raises(DegenerateContinuum):
        is_tau_fat(PointSet(Point(0, 0)), 0.25)


# ---------------------------------------------------------------------------
# quasiroundness


def test_quasiroundness_closed_forms():
    assert quasiroundness(Disk(Point(2, -1), 3.0)) == 1.0
    assert quasiroundness(AxisRect(Point(0, 0), 1, 1)) == pytest.approx(
        math.sqrt(2), rel=1e-12
    )
    assert quasiroundness(AxisRect(Point(5, 5), 4, 1)) == pytest.approx(
        math.sqrt(17), rel=1e-12
    )


def test_quasiroundness_polygon_square_matches_rect():
    sq = Polygon((Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)))
    assert quasiroundness(sq) == pytest.approx(math.sqrt(2), rel=1e-5)


def test_quasiroundness_triangle_incenter_search():
    # 3-4-5 right triangle: inradius 1 at (1,1); farthest vertex (4,0)
    tri = Polygon((Point(0, 0), Point(4, 0), Point(0, 3)))
    lam = quasiroundness(tri)
    assert lam <= math.sqrt(10) + 1e-4
    assert lam >= 1.0


def test_quasiroundness_rejects_points():
    with pytest.raises(EmptyInterior):
        quasiroundness(PointSet(Point(0, 0)))


# ---------------------------------------------------------------------------
# annular width and radial reach


def test_width_zero_when_disjoint():
    a = Annulus(Point(0, 0), 1.0, 3.0)
    assert annular_width(a, Disk(Point(10, 0), 0.5)) == 0.0
    assert radial_reach(a, Disk(Point(10, 0), 0.5)) is None
    # inside the hole also counts as disjoint from the ring
    assert annular_width(a, Disk(Point(0, 0), 0.5)) == 0.0


def test_width_full_crossing():
    a = Annulus(Point(0, 0), 1.0, 3.0)
    big = Disk(Point(0, 0), 5.0)
    assert annular_width(a, big) == pytest.approx(math.log(3.0), rel=1e-12)
    assert radial_reach(a, big) == pytest.approx((1.0, 3.0))


def test_width_outer_half_disk():
    a = Annulus(Point(0, 0), 1.0, 3.0)
    c = Disk(Point(2.5, 0), 0.5)
    # reaches radii [2.0, 3.0] exactly
    assert radial_reach(a, c) == pytest.approx((2.0, 3.0))
    assert annular_width(a, c) == pytest.approx(math.log(1.5), rel=1e-12)


def test_width_rect_reach():
    a = Annulus(Point(0, 0), 1.0, 3.0)
    c = AxisRect(Point(2, -0.5), 1, 1)
    lo, hi = radial_reach(a, c)
    assert lo == pytest.approx(2.0, rel=1e-12)
    assert hi == pytest.approx(3.0, rel=1e-12)  # corner sqrt(9.25) clamps to R
    assert annular_width(a, c) == pytest.approx(math.log(1.5), rel=1e-12)


def test_width_matches_disk_closed_form_randomized():
    rng = np.random.default_rng(7)
    a = Annulus(Point(0.3, -0.2), 0.7, 4.1)
    for _ in range(300):
        c = (rng.uniform(-6, 6), rng.uniform(-6, 6))
        rho = rng.uniform(0.05, 2.5)
        want = disk_reach(a, c, rho)
        got = annular_width(a, Disk(Point(*c), rho))
        if want is None:
            assert got == 0.0
        else:
            lo, hi = want
            assert got == pytest.approx(math.log(hi / lo), abs=1e-12)


def test_width_monotone_under_inclusion():
    rng = np.random.default_rng(11)
    a = Annulus(Point(0, 0), 1.0, 3.0)
    for _ in range(200):
        c = (rng.uniform(-4, 4), rng.uniform(-4, 4))
        r_small = rng.uniform(0.05, 1.5)
        r_big = r_small + rng.uniform(0.0, 2.0)
        w_small = annular_width(a, Disk(Point(*c), r_small))
        w_big = annular_width(a, Disk(Point(*c), r_big))
        assert w_small <= w_big + 1e-12


def test_width_superadditive_on_chains():
    # overlapping disks whose union is connected inside the ring:
    # the per-piece widths must sum to at least the union's width
    a = Annulus(Point(0, 0), 1.0, 3.0)
    chain = [
        (np.array([1.2, 0.0]), 0.35),
        (np.array([1.8, 0.1]), 0.40),
        (np.array([2.5, 0.0]), 0.45),
    ]
    for (c1, r1), (c2, r2) in zip(chain, chain[1:]):
        assert np.hypot(*(c1 - c2)) < r1 + r2  # consecutive pieces overlap
    total = sum(annular_width(a, Disk(Point(*c), r)) for c, r in chain)
    reaches = [disk_reach(a, c, r) for c, r in chain]
    lo = min(x[0] for x in reaches)
    hi = max(x[1] for x in reaches)
    assert total >= math.log(hi / lo) - 1e-12

    rng = np.random.default_rng(23)
    for _ in range(100):
        # random radial chains from the hole outward
        k = rng.integers(2, 6)
        ts = np.sort(rng.uniform(1.0, 3.0, size=k))
        disks = [(np.array([t * math.cos(0.3), t * math.sin(0.3)]),
                  rng.uniform(0.3, 0.8)) for t in ts]
        ok = all(np.hypot(*(a1 - a2)) < r1 + r2
                 for (a1, r1), (a2, r2) in zip(disks, disks[1:]))
        if not ok:
            continue
        total = sum(annular_width(a, Disk(Point(*c), r)) for c, r in disks)
        reaches = [disk_reach(a, c, r) for c, r in disks]
        reaches = [x for x in reaches if x is not None]
        if not reaches:
            continue
        lo = min(x[0] for x in reaches)
        hi = max(x[1] for x in reaches)
        assert total >= math.log(hi / lo) - 1e-12


# ---------------------------------------------------------------------------
# crossing-disk counting


def test_two_crossing_disks_counted():
    a = Annulus(Point(0, 0), 1.0, 14.0)
    disks = [Disk(Point(7.5, 0), 6.55), Disk(Point(-7.5, 0), 6.55)]
    assert count_crossing_disks(a, disks) == 2


def test_three_crossings_in_a_thin_annulus():
    # R/r = 3 admits three disjoint crossing disks at 120 degree spacing
    a = Annulus(Point(0, 0), 1.0, 3.0)
    disks = []
    for k in range(3):
        th = 2 * math.pi * k / 3
        disks.append(Disk(Point(2 * math.cos(th), 2 * math.sin(th)), 1.2))
    assert count_crossing_disks(a, disks) == 3


def test_overlapping_disks_rejected():
    a = Annulus(Point(0, 0), 1.0, 3.0)
    with pytest.raises(OverlappingDisks):
        count_crossing_disks(a, [Disk(Point(2, 0), 1.1), Disk(Point(2.5, 0), 1.1)])


def test_thick_annulus_never_admits_three():
    # adversarial greedy packings of crossing disks at aspect 14:
    # a disk crossing from radius d needs radius >= max(d - r, R - d)
    rng = np.random.default_rng(101)
    a = Annulus(Point(0, 0), 1.0, 14.0)
    worst = 0
    for _ in range(400):
        kept = []
        for _ in range(40):
            th = rng.uniform(0, 2 * math.pi)
            d = rng.uniform(1.0, 14.0)
            rho = max(d - 1.0, 14.0 - d) + rng.uniform(0.0, 0.5)
            c = np.array([d * math.cos(th), d * math.sin(th)])
            if all(np.hypot(*(c - k[0])) > rho + k[1] + 1e-9 for k in kept):
                kept.append((c, rho))
        n = count_crossing_disks(a, [Disk(Point(*c), r) for c, r in kept])
        assert n == len(kept)  # every generated disk crosses by construction
        worst = max(worst, n)
        assert n <= 2
    assert worst == 2  # the packer does reach the extremal configuration


# ---------------------------------------------------------------------------
# fat-set counting


def test_fat_meeting_bound_value():
    assert fat_meeting_bound(0.25, 1.0) == pytest.approx(32.0, abs=1e-12)
    assert fat_meeting_bound(0.25, 2.0) == pytest.approx(68.0, abs=1e-12)


def test_four_unit_disks_meeting_a_unit_disk():
    e = Disk(Point(0, 0), 0.5)
    sets = [
        Disk(Point(0.99, 0), 0.5),
        Disk(Point(-0.99, 0), 0.5),
        Disk(Point(0, 0.99), 0.5),
        Disk(Point(0, -0.99), 0.5),
    ]
    n = count_fat_meeting(e, sets, 0.25, 1.0)
    assert n == 4
    assert n <= fat_meeting_bound(0.25, 1.0)


def test_six_half_disks_meeting_a_unit_disk():
    # lam = 2 admits members of half the diameter; bound loosens to 68
    e = Disk(Point(0, 0), 1.0)
    sets = [
        Disk(Point(1.4 * math.cos(k * math.pi / 3),
                   1.4 * math.sin(k * math.pi / 3)), 0.5)
        for k in range(6)
    ]
    n = count_fat_meeting(e, sets, 0.25, 2.0)
    assert n == 6
    assert n <= fat_meeting_bound(0.25, 2.0)


def test_fat_meeting_precondition_errors():
    e = Disk(Point(0, 0), 1.0)
    with pytest.raises(PreconditionViolated):
        # member smaller than diam(E)/lam
        count_fat_meeting(e, [Disk(Point(3, 0), 0.4)], 0.25, 1.0)
    with pytest.raises(PreconditionViolated):
        # members touch each other
        count_fat_meeting(
            e, [Disk(Point(3, 0), 1.0), Disk(Point(5, 0), 1.0)], 0.25, 1.0
        )


def test_random_disk_packings_respect_bound():
    rng = np.random.default_rng(5)
    bound = fat_meeting_bound(0.25, 1.0)
    for _ in range(500):
        re = rng.uniform(0.3, 1.5)
        e = Disk(Point(0, 0), re)
        kept = []
        for _ in range(60):
            # bias candidates to actually meet E
            rho = rng.uniform(re, 3 * re)
            d = rng.uniform(0.0, re + rho)
            th = rng.uniform(0, 2 * math.pi)
            c = np.array([d * math.cos(th), d * math.sin(th)])
            if all(np.hypot(*(c - k[0])) > rho + k[1] + 1e-9 for k in kept):
                kept.append((c, rho))
        n = count_fat_meeting(
            e, [Disk(Point(*c), r) for c, r in kept], 0.25, 1.0
        )
        assert n <= bound


# ---------------------------------------------------------------------------
# squared mass of ball sums


def test_single_ball_mass():
    got = balls_squared_mass([Point(1, 2)], [3.0], [0.5])
    assert got == pytest.approx(0.25 * math.pi * 9.0, rel=1e-12)


def test_disjoint_balls_add():
    got = balls_squared_mass([Point(0, 0), Point(10, 0)], [1.0, 2.0], [2.0, 0.5])
    want = 4.0 * math.pi + 0.25 * math.pi * 4.0
    assert got == pytest.approx(want, rel=1e-12)


def test_overlapping_pair_cross_term():
    d, r1, r2, a1, a2 = 1.5, 1.0, 1.2, 0.7, -0.4
    got = balls_squared_mass([Point(0, 0), Point(d, 0)], [r1, r2], [a1, a2])
    want = (a1 * a1 * math.pi * r1 * r1 + a2 * a2 * math.pi * r2 * r2
            + 2 * a1 * a2 * lens_area(d, r1, r2))
    assert got == pytest.approx(want, rel=1e-12)


def test_nested_balls_cross_term_is_small_ball():
    got = balls_squared_mass([Point(0, 0), Point(0.1, 0)], [2.0, 0.3], [1.0, 1.0])
    want = math.pi * 4.0 + math.pi * 0.09 + 2 * math.pi * 0.09
    assert got == pytest.approx(want, rel=1e-12)


def test_scale_multiplies_radii_only():
    centers = [Point(0, 0), Point(2, 1), Point(-1, 3)]
    radii = [0.5, 1.0, 0.8]
    coeffs = [1.0, -2.0, 0.3]
    got = balls_squared_mass(centers, radii, coeffs, scale=1.7)
    want = balls_squared_mass(centers, [1.7 * r for r in radii], coeffs)
    assert got == pytest.approx(want, rel=1e-12)


def test_ball_mass_against_grid_integration():
    centers = [Point(0, 0), Point(1.1, 0.4), Point(-0.6, 0.9), Point(0.3, -1.2)]
    radii = [1.0, 0.8, 0.7, 0.9]
    coeffs = [1.0, 0.6, -0.5, 0.9]
    n = 2400
    xs = np.linspace(-2.5, 2.5, n)
    X, Y = np.meshgrid(xs, xs)
    field = np.zeros_like(X)
    for c, r, a in zip(centers, radii, coeffs):
        field += a * ((X - c.x) ** 2 + (Y - c.y) ** 2 <= r * r)
    cell = (xs[1] - xs[0]) ** 2
    approx = float(np.sum(field**2) * cell)
    got = balls_squared_mass(centers, radii, coeffs)
    assert got == pytest.approx(approx, rel=5e-3)
