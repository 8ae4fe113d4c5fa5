"""Tests for the quadratic path-family optimizer.

Expected values: closed forms for rectangles (a w-by-1 crossing family
has value 1/w), the round ring value 2*pi*/log(R/r), and hand-checked
step lengths for the discrete length functional.
"""

import math

import numpy as np
import pytest

from transmod.domain import CurveFamilySpec, DomainSpec, rasterize
from transmod.errors import EmptyEndpointSet
from transmod.geom import Annulus, AxisRect, Disk, Point
from transmod.modsolve import (
    DensityCertificate,
    ModulusResult,
    SolverConfig,
    build_graph,
    modulus,
    modulus_union,
    shortest_path,
    transboundary_length,
    verify_admissible,
)


def box_domain(w=1.0, hgt=1.0, **kw):
    return DomainSpec(ambient=(Point(0, 0), Point(w, hgt)), continua=(), **kw)


def crossing(w=1.0, hgt=1.0, margin=0.02):
    return CurveFamilySpec(
        source=AxisRect(Point(0, 0), margin * w, hgt),
        sink=AxisRect(Point(w * (1 - margin), 0), margin * w, hgt),
    )


def ring_domain(R=math.e):
    pad = 0.25
    w = R + pad
    return DomainSpec(ambient=(Point(-w, -w), Point(w, w)), continua=())


def ring_family(r=1.0, R=math.e):
    from transmod.geom import PolarRect

    return CurveFamilySpec(
        source=Disk(Point(0, 0), r),
        sink=PolarRect(Point(0, 0), R, R + 0.2, 0.0, 2 * math.pi),
    )


# ---------------------------------------------------------------------------
# values with closed forms


def test_unit_square_crossing_value():
    g = rasterize(box_domain(), 1 / 32)
    res = modulus(g, crossing())
    assert res.status == "converged"
    assert res.value == pytest.approx(1.0, rel=0.02)
    assert res.lower_bound <= res.value <= res.upper_bound + 1e-12


def test_wide_rect_value_reciprocal_width():
    # conformal module of a w x 1 rectangle crossed the long way is 1/w
    for w in (2.0, 4.0):
        g = rasterize(box_domain(w=w), 1 / 16)
        res = modulus(g, crossing(w=w))
        assert res.value == pytest.approx(1.0 / w, rel=0.05)


def test_tall_rect_value_height_over_width():
    g = rasterize(box_domain(w=1.0, hgt=2.0), 1 / 16)
    res = modulus(g, crossing(hgt=2.0))
    assert res.value == pytest.approx(2.0, rel=0.05)


def test_result_contract_fields():
    g = rasterize(box_domain(), 1 / 16)
    res = modulus(g, crossing())
    assert isinstance(res, ModulusResult)
    assert res.status in ("converged", "iteration_cap", "infeasible_family")
    assert res.lower_bound <= res.value <= res.upper_bound + 1e-12
    assert res.iterations >= 1
    assert res.density.rho_cells.shape == (16, 16)
    assert res.density.h == g.h
    if res.status == "converged":
        assert res.shortest_final >= 1.0 - 1e-6


def test_infeasible_family_reports_zero():
    # the wall spans the family's restriction band; the global free region
    # stays connected around it, but the restricted family cannot pass once
    # the wall is forbidden
    wall = AxisRect(Point(0.45, 0.1), 0.1, 0.8)
    spec = DomainSpec(ambient=(Point(0, 0), Point(1, 1)), continua=(wall,))
    fam = CurveFamilySpec(
        source=AxisRect(Point(0, 0.3), 0.02, 0.4),
        sink=AxisRect(Point(0.98, 0.3), 0.02, 0.4),
        forbidden=frozenset({0}),
        ambient_restriction=(Point(0, 0.2), Point(1, 0.8)),
    )
    g = rasterize(spec, 1 / 64)
    res = modulus(g, fam)
    assert res.status == "infeasible_family"
    assert res.value == 0.0
    assert res.lower_bound == 0.0

    # same family with the wall crossable has positive value
    open_fam = CurveFamilySpec(
        source=fam.source,
        sink=fam.sink,
        ambient_restriction=fam.ambient_restriction,
    )
    assert modulus(g, open_fam).value > 0.1


def test_ring_value_near_conformal_module():
    g = rasterize(ring_domain(), 1 / 16)
    res = modulus(g, ring_family())
    # circular condenser B(0,1) -> {|x| >= e}: module 2*pi/log(e/1);
    # coarse grids overshoot, so the tolerance here is loose
    assert res.value == pytest.approx(2 * math.pi, rel=0.20)
    assert res.lower_bound <= res.value


# ---------------------------------------------------------------------------
# lengths and admissibility


def test_transboundary_length_manhattan():
    g = rasterize(box_domain(), 1 / 4)
    rho = np.ones((4, 4))
    cert = DensityCertificate(rho_cells=rho, vertex_weights={}, h=0.25)
    # lengths integrate rho over the chord through each visited cell:
    # every step pays h/2 at both endpoint cells, and the first/last cell
    # pays an extra h/2 stub so a full crossing of the unit square scores 1
    path = [("cell", 0, 0), ("cell", 1, 0), ("cell", 2, 0), ("cell", 3, 0)]
    got = transboundary_length(g, cert, path)
    assert got == pytest.approx(4 * 0.25, rel=1e-9)
    diag = transboundary_length(g, cert, [("cell", 0, 0), ("cell", 1, 1)])
    assert diag == pytest.approx(math.sqrt(2) * 0.25 / 2 * 2 + 0.25, rel=1e-9)


def test_transboundary_length_counts_vertices():
    hole = Disk(Point(0.5, 0.5), 0.1)
    spec = DomainSpec(ambient=(Point(0, 0), Point(1, 1)), continua=(hole,))
    g = rasterize(spec, 1 / 16)
    rho = np.ones((16, 16))
    cert = DensityCertificate(rho_cells=rho, vertex_weights={0: 7.0}, h=g.h)
    path = [("cell", 0, 8), ("vertex", 0), ("cell", 15, 8)]
    got = transboundary_length(g, cert, path)
    # vertex weight once, plus attachment and stub half-cells at both ends
    assert got == pytest.approx(7.0 + 2 * g.h, rel=1e-9)


def test_shortest_path_on_flat_density():
    g = rasterize(box_domain(), 1 / 8)
    cert = DensityCertificate(np.ones((8, 8)), {}, g.h)
    length, steps = shortest_path(g, cert, crossing())
    # crossing a unit square against rho=1 costs at least ~1
    assert length == pytest.approx(1.0, rel=0.05)
    assert steps[0][0] == "cell" and steps[-1][0] == "cell"


def test_verify_admissible_on_solver_output():
    g = rasterize(box_domain(), 1 / 32)
    res = modulus(g, crossing())
    rep = verify_admissible(g, res.density, crossing(), n_random_paths=100)
    assert rep.ok
    assert rep.shortest_length >= 1.0 - 1e-6
    assert rep.min_sampled >= rep.shortest_length - 1e-9
    assert rep.n_paths_checked >= 100


def test_missing_endpoints_raise():
    hole = AxisRect(Point(0.4, 0.4), 0.2, 0.2)
    spec = DomainSpec(ambient=(Point(0, 0), Point(1, 1)), continua=(hole,))
    g = rasterize(spec, 1 / 32)
    fam = CurveFamilySpec(
        source=Disk(Point(0.5, 0.5), 0.02),
        sink=AxisRect(Point(0.98, 0), 0.02, 1.0),
    )
    with pytest.raises(EmptyEndpointSet):
        modulus(g, fam)


# ---------------------------------------------------------------------------
# transboundary behavior


def test_contracted_hole_shortens_paths():
    # a free-to-cross continuum acts as a zero-cost highway, so the
    # modulus with the hole crossable exceeds the plain square value
    hole = Disk(Point(0.5, 0.5), 0.15)
    spec = DomainSpec(ambient=(Point(0, 0), Point(1, 1)), continua=(hole,))
    g = rasterize(spec, 1 / 32)
    res = modulus(g, crossing())
    base = modulus(rasterize(box_domain(), 1 / 32), crossing())
    assert res.value > base.value - 1e-9


def test_forbidden_hole_lengthens_paths():
    hole = Disk(Point(0.5, 0.5), 0.15)
    spec = DomainSpec(ambient=(Point(0, 0), Point(1, 1)), continua=(hole,))
    g = rasterize(spec, 1 / 32)
    fam = CurveFamilySpec(
        source=AxisRect(Point(0, 0), 0.02, 1.0),
        sink=AxisRect(Point(0.98, 0), 0.02, 1.0),
        forbidden=frozenset({0}),
    )
    res = modulus(g, fam)
    base = modulus(rasterize(box_domain(), 1 / 32), crossing())
    assert res.value < base.value + 1e-9


def test_vertex_weight_appears_in_certificate():
    hole = Disk(Point(0.5, 0.5), 0.15)
    spec = DomainSpec(ambient=(Point(0, 0), Point(1, 1)), continua=(hole,))
    g = rasterize(spec, 1 / 32)
    res = modulus(g, crossing())
    assert set(res.density.vertex_weights) == {0}
    assert res.density.vertex_weights[0] >= 0.0


# ---------------------------------------------------------------------------
# determinism and unions


def test_identical_runs_bit_identical():
    g = rasterize(box_domain(), 1 / 16)
    cfg = SolverConfig(seed=3)
    a = modulus(g, crossing(), cfg)
    b = modulus(g, crossing(), cfg)
    assert a.value == b.value
    assert a.lower_bound == b.lower_bound
    assert a.iterations == b.iterations
    assert np.array_equal(a.density.rho_cells, b.density.rho_cells)
    assert a.density.vertex_weights == b.density.vertex_weights


def test_union_at_least_each_member():
    g = rasterize(box_domain(), 1 / 16)
    horiz = crossing()
    vert = CurveFamilySpec(
        source=AxisRect(Point(0, 0), 1.0, 0.02),
        sink=AxisRect(Point(0, 0.98), 1.0, 0.02),
    )
    both = modulus_union(g, [horiz, vert])
    h_only = modulus(g, horiz)
    v_only = modulus(g, vert)
    # monotone above each member, subadditive below the sum
    assert both.value >= max(h_only.value, v_only.value) - 1e-9
    assert both.value <= h_only.value + v_only.value + 1e-9
    # rho = 1 serves both crossings of the square at once: union value 1
    assert both.value == pytest.approx(1.0, rel=0.03)


def test_union_shares_prebuilt_graph():
    g = rasterize(box_domain(), 1 / 16)
    fams = [crossing()]
    pg = build_graph(g, fams)
    res = modulus_union(g, fams, graph=pg)
    assert res.value == pytest.approx(modulus(g, fams[0]).value, abs=0.0)
