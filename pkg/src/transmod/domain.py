"""Domain specifications and their discretization.

A DomainSpec is an ambient axis box minus an ordered list of pairwise
disjoint continua (plus optional degenerate point components, which the
discretizer deliberately ignores).  rasterize() classifies grid cells by
their center point and produces a QuotientGrid in which every continuum
that claims at least one cell becomes a single contracted vertex; paths
enter and leave a contracted vertex through the free cells bordering it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .errors import (
    DisconnectedComplement,
    EmptyEndpointSet,
    InvalidDomain,
    PreconditionViolated,
    SpacingTooCoarse,
)
from .geom import (
    AxisRect,
    Disk,
    PlanarSet,
    Point,
    PointSet,
    PolarRect,
    Polygon,
    bounding_box,
    pdist,
    set_distance,
    sets_overlap,
    validate_planar_set,
)

# Cell status codes inside QuotientGrid.status: >= 0 is a continuum index.
FREE = -1
OUTSIDE = -2


@dataclass(frozen=True)
class DomainSpec:
    ambient: tuple[Point, Point]
    continua: tuple[PlanarSet, ...]
    point_components: tuple[Point, ...] = ()
    label: str = ""
    outer: bool = False

    def validate(self) -> None:
        lo, hi = self.ambient
        if not (lo.x < hi.x and lo.y < hi.y):
            raise InvalidDomain("ambient", "min corner must be below max corner")
        for i, c in enumerate(self.continua):
            validate_planar_set(c, f"continua[{i}]")
            bb = bounding_box(c)
            if not (
                lo.x < bb[0] and lo.y < bb[1] and bb[2] < hi.x and bb[3] < hi.y
            ):
                raise InvalidDomain(
                    f"continua[{i}]", "must lie strictly inside the ambient box"
                )
        for i in range(len(self.continua)):
            for j in range(i + 1, len(self.continua)):
                if _fast_gap(self.continua[i], self.continua[j]) <= 1e-9:
                    raise InvalidDomain(
                        f"continua[{j}]", f"touches or overlaps continua[{i}]"
                    )
        for i, p in enumerate(self.point_components):
            if not (lo.x < p.x < hi.x and lo.y < p.y < hi.y):
                raise InvalidDomain(
                    f"points[{i}]", "must lie strictly inside the ambient box"
                )

    def min_gap(self) -> float:
        """Smallest pairwise distance between continua (inf if < 2)."""
        best = math.inf
        for i in range(len(self.continua)):
            for j in range(i + 1, len(self.continua)):
                best = min(best, _fast_gap(self.continua[i], self.continua[j]))
        return best


def _fast_gap(a: PlanarSet, b: PlanarSet) -> float:
    if isinstance(a, Disk) and isinstance(b, Disk):
        return pdist(a.center, b.center) - a.radius - b.radius
    if isinstance(a, AxisRect) and isinstance(b, AxisRect):
        dx = max(b.corner.x - (a.corner.x + a.width), a.corner.x - (b.corner.x + b.width), 0.0)
        dy = max(b.corner.y - (a.corner.y + a.height), a.corner.y - (b.corner.y + b.height), 0.0)
        return math.hypot(dx, dy)
    return set_distance(a, b)


@dataclass(frozen=True)
class CurveFamilySpec:
    """Connecting family Gamma(source, sink) with optional forbidden
    contracted vertices and an optional traversable sub-box."""

    source: PlanarSet
    sink: PlanarSet
    forbidden: frozenset[int] = frozenset()
    ambient_restriction: Optional[tuple[Point, Point]] = None
    label: str = ""


@dataclass
class QuotientGrid:
    """Uniform cell grid over the ambient box with contracted continua.

    status[iy, ix]: FREE, OUTSIDE, or the claiming continuum index.
    Cell (ix, iy) center: (x0 + (ix+0.5)h, y0 + (iy+0.5)h).
    outer_vertex is the contracted index of the ambient boundary when the
    spec models a bounded domain (DomainSpec.outer), else None.
    """

    spec: DomainSpec
    h: float
    x0: float
    y0: float
    nx: int
    ny: int
    status: np.ndarray
    contracted: tuple[int, ...]
    outer_vertex: Optional[int] = None
    _free_count: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        self._free_count = int(np.count_nonzero(self.status == FREE))

    @property
    def n_free(self) -> int:
        return self._free_count

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        xs = self.x0 + (np.arange(self.nx) + 0.5) * self.h
        ys = self.y0 + (np.arange(self.ny) + 0.5) * self.h
        return np.meshgrid(xs, ys)

    def cell_of_point(self, x: float, y: float) -> Optional[tuple[int, int]]:
        ix = int(math.floor((x - self.x0) / self.h))
        iy = int(math.floor((y - self.y0) / self.h))
        if 0 <= ix < self.nx and 0 <= iy < self.ny:
            return ix, iy
        return None

    def free_area(self) -> float:
        return self.n_free * self.cell_area


def _classify(spec: DomainSpec, h: float, nx: int, ny: int, x0: float, y0: float) -> np.ndarray:
    xs = x0 + (np.arange(nx) + 0.5) * h
    ys = y0 + (np.arange(ny) + 0.5) * h
    X, Y = np.meshgrid(xs, ys)
    status = np.full((ny, nx), FREE, dtype=np.int32)
    lo, hi = spec.ambient
    outside = (X < lo.x) | (X > hi.x) | (Y < lo.y) | (Y > hi.y)
    status[outside] = OUTSIDE
    for idx, c in enumerate(spec.continua):
        mask = _mask_for(c, X, Y)
        status[mask & (status == FREE)] = idx
    return status


def _mask_for(c: PlanarSet, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    if isinstance(c, Disk):
        return (X - c.center.x) ** 2 + (Y - c.center.y) ** 2 <= c.radius**2
    if isinstance(c, AxisRect):
        return (
            (X >= c.corner.x)
            & (X <= c.corner.x + c.width)
            & (Y >= c.corner.y)
            & (Y <= c.corner.y + c.height)
        )
    if isinstance(c, PolarRect):
        dx, dy = X - c.center.x, Y - c.center.y
        r = np.hypot(dx, dy)
        radial = (r >= c.r_in) & (r <= c.r_out)
        span = c.theta_max - c.theta_min
        if span >= 2 * math.pi - 1e-12:
            return radial
        ang = (np.arctan2(dy, dx) - c.theta_min) % (2 * math.pi)
        return radial & (ang <= span)
    if isinstance(c, Polygon):
        inside = np.zeros_like(X, dtype=bool)
        v = c.vertices
        n = len(v)
        j = n - 1
        for i in range(n):
            xi, yi = v[i].x, v[i].y
            xj, yj = v[j].x, v[j].y
            cond = (yi > Y) != (yj > Y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xc = xi + (Y - yi) * (xj - xi) / (yj - yi)
            inside ^= cond & (X < xc)
            j = i
        return inside
    if isinstance(c, PointSet):
        return np.zeros_like(X, dtype=bool)
    raise TypeError(type(c).__name__)


def rasterize(spec: DomainSpec, h: float) -> QuotientGrid:
    """Discretize the domain at spacing h.

    Requires h <= (min pairwise continuum gap)/4 so disjoint continua can
    never abut through the grid, and requires the free subgraph to stay
    4-connected.
    """
    if h <= 0:
        raise InvalidDomain("h", "spacing must be positive")
    spec.validate()
    gap = spec.min_gap()
    if gap < 4.0 * h * (1.0 - 1e-12):
        raise SpacingTooCoarse(
            f"h={h:g} exceeds a quarter of the minimal continuum gap {gap:g}"
        )
    lo, hi = spec.ambient
    nx = max(1, int(round((hi.x - lo.x) / h)))
    ny = max(1, int(round((hi.y - lo.y) / h)))
    status = _classify(spec, h, nx, ny, lo.x, lo.y)
    free = status == FREE
    if not free.any():
        raise DisconnectedComplement("no free cells at this spacing")
    labels, count = ndimage.label(
        free, structure=np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    )
    if count > 1:
        sizes = ndimage.sum_labels(free, labels, index=range(1, count + 1))
        raise DisconnectedComplement(
            f"free cells split into {count} components (sizes {sizes.astype(int).tolist()})"
        )
    contracted = tuple(
        i for i in range(len(spec.continua)) if bool((status == i).any())
    )
    outer_vertex = len(spec.continua) if spec.outer else None
    return QuotientGrid(
        spec=spec,
        h=h,
        x0=lo.x,
        y0=lo.y,
        nx=nx,
        ny=ny,
        status=status,
        contracted=contracted,
        outer_vertex=outer_vertex,
    )


def _cells_meeting(grid: QuotientGrid, s: PlanarSet) -> np.ndarray:
    """Boolean (ny, nx) mask of cells whose closed square intersects s."""
    h = grid.h
    bb = bounding_box(s)
    ix0 = max(0, int(math.floor((bb[0] - grid.x0) / h)) - 1)
    iy0 = max(0, int(math.floor((bb[1] - grid.y0) / h)) - 1)
    ix1 = min(grid.nx - 1, int(math.ceil((bb[2] - grid.x0) / h)) + 1)
    iy1 = min(grid.ny - 1, int(math.ceil((bb[3] - grid.y0) / h)) + 1)
    out = np.zeros((grid.ny, grid.nx), dtype=bool)
    if ix1 < ix0 or iy1 < iy0:
        return out
    xs = grid.x0 + (np.arange(ix0, ix1 + 1) + 0.5) * h
    ys = grid.y0 + (np.arange(iy0, iy1 + 1) + 0.5) * h
    X, Y = np.meshgrid(xs, ys)
    if isinstance(s, Disk):
        cx = np.clip(s.center.x, X - h / 2, X + h / 2)
        cy = np.clip(s.center.y, Y - h / 2, Y + h / 2)
        hit = (cx - s.center.x) ** 2 + (cy - s.center.y) ** 2 <= s.radius**2
    elif isinstance(s, AxisRect):
        hit = (
            (X + h / 2 >= s.corner.x)
            & (X - h / 2 <= s.corner.x + s.width)
            & (Y + h / 2 >= s.corner.y)
            & (Y - h / 2 <= s.corner.y + s.height)
        )
    elif isinstance(s, PointSet):
        hit = (
            (np.abs(X - s.point.x) <= h / 2) & (np.abs(Y - s.point.y) <= h / 2)
        )
    elif isinstance(s, PolarRect):
        # Radial reach of each cell square from the sector center, exact
        # via corner distances and axis-crossing checks.
        dx0, dx1 = X - h / 2 - s.center.x, X + h / 2 - s.center.x
        dy0, dy1 = Y - h / 2 - s.center.y, Y + h / 2 - s.center.y
        nearx = np.where(dx0 > 0, dx0, np.where(dx1 < 0, -dx1, 0.0))
        neary = np.where(dy0 > 0, dy0, np.where(dy1 < 0, -dy1, 0.0))
        dmin = np.hypot(nearx, neary)
        dmax = np.sqrt(
            np.maximum(dx0**2, dx1**2) + np.maximum(dy0**2, dy1**2)
        )
        hit = (dmax >= s.r_in) & (dmin <= s.r_out)
        span = s.theta_max - s.theta_min
        if span < 2 * math.pi - 1e-12:
            # Conservative angular test at cell centers, padded by the
            # angle a half-diagonal subtends at the cell's distance.
            ang = (np.arctan2(Y - s.center.y, X - s.center.x) - s.theta_min) % (
                2 * math.pi
            )
            with np.errstate(divide="ignore", invalid="ignore"):
                pad = np.minimum(math.pi, 0.7072 * h / np.maximum(dmin, 1e-300))
            hit &= (ang <= span + pad) | (ang >= 2 * math.pi - pad)
    else:
        hit = np.zeros_like(X, dtype=bool)
        for jy in range(hit.shape[0]):
            for jx in range(hit.shape[1]):
                cell = AxisRect(
                    Point(X[jy, jx] - h / 2, Y[jy, jx] - h / 2), h, h
                )
                hit[jy, jx] = sets_overlap(cell, s)
    out[iy0 : iy1 + 1, ix0 : ix1 + 1] = hit
    return out


def family_endpoints(
    grid: QuotientGrid, fam: CurveFamilySpec
) -> tuple[np.ndarray, np.ndarray]:
    """Free-cell masks for the source and sink sets.

    Cells are 'free' here also in the sense of the family's optional
    sub-box restriction.  Raises EmptyEndpointSet when either set misses
    every free cell, PreconditionViolated when the two sets collide.
    """
    traversable = grid.status == FREE
    if fam.ambient_restriction is not None:
        lo, hi = fam.ambient_restriction
        X, Y = grid.centers()
        traversable &= (X >= lo.x) & (X <= hi.x) & (Y >= lo.y) & (Y <= hi.y)
    for idx in fam.forbidden:
        if not (0 <= idx <= len(grid.spec.continua)):
            raise PreconditionViolated(f"forbidden index {idx} out of range")
    src = _cells_meeting(grid, fam.source) & traversable
    snk = _cells_meeting(grid, fam.sink) & traversable
    if not src.any():
        raise EmptyEndpointSet("source set meets no traversable cell")
    if not snk.any():
        raise EmptyEndpointSet("sink set meets no traversable cell")
    if (src & snk).any():
        raise PreconditionViolated("source and sink sets share cells")
    return src, snk


# ---------------------------------------------------------------------------
# JSON round trip


def _fxy(p: Point) -> list[float]:
    # ints round-trip as floats; emit floats so re-serialization is stable
    return [float(p.x), float(p.y)]


def _set_to_json(s: PlanarSet) -> dict:
    if isinstance(s, Disk):
        return {"kind": "disk", "center": _fxy(s.center), "radius": float(s.radius)}
    if isinstance(s, PointSet):
        return {"kind": "point", "point": _fxy(s.point)}
    if isinstance(s, AxisRect):
        return {
            "kind": "axis_rect",
            "corner": _fxy(s.corner),
            "width": float(s.width),
            "height": float(s.height),
        }
    if isinstance(s, PolarRect):
        return {
            "kind": "polar_rect",
            "center": _fxy(s.center),
            "r_in": float(s.r_in),
            "r_out": float(s.r_out),
            "theta_min": float(s.theta_min),
            "theta_max": float(s.theta_max),
        }
    if isinstance(s, Polygon):
        return {"kind": "polygon", "vertices": [_fxy(p) for p in s.vertices]}
    raise TypeError(type(s).__name__)


def _require(d: dict, key: str, field: str):
    if key not in d:
        raise InvalidDomain(f"{field}.{key}", "missing required field")
    return d[key]


def _num(v, field: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InvalidDomain(field, "expected a number")
    if not math.isfinite(v):
        raise InvalidDomain(field, "must be finite")
    return float(v)


def _xy(v, field: str) -> Point:
    if not (isinstance(v, list) and len(v) == 2):
        raise InvalidDomain(field, "expected [x, y]")
    return Point(_num(v[0], f"{field}[0]"), _num(v[1], f"{field}[1]"))


def set_from_json(d: dict, field: str = "set") -> PlanarSet:
    if not isinstance(d, dict):
        raise InvalidDomain(field, "expected an object")
    kind = _require(d, "kind", field)
    if kind == "disk":
        s: PlanarSet = Disk(
            _xy(_require(d, "center", field), f"{field}.center"),
            _num(_require(d, "radius", field), f"{field}.radius"),
        )
    elif kind == "point":
        s = PointSet(_xy(_require(d, "point", field), f"{field}.point"))
    elif kind == "axis_rect":
        s = AxisRect(
            _xy(_require(d, "corner", field), f"{field}.corner"),
            _num(_require(d, "width", field), f"{field}.width"),
            _num(_require(d, "height", field), f"{field}.height"),
        )
    elif kind == "polar_rect":
        s = PolarRect(
            _xy(_require(d, "center", field), f"{field}.center"),
            _num(_require(d, "r_in", field), f"{field}.r_in"),
            _num(_require(d, "r_out", field), f"{field}.r_out"),
            _num(_require(d, "theta_min", field), f"{field}.theta_min"),
            _num(_require(d, "theta_max", field), f"{field}.theta_max"),
        )
    elif kind == "polygon":
        verts = _require(d, "vertices", field)
        if not isinstance(verts, list):
            raise InvalidDomain(f"{field}.vertices", "expected a list")
        s = Polygon(
            tuple(_xy(v, f"{field}.vertices[{i}]") for i, v in enumerate(verts))
        )
    else:
        raise InvalidDomain(f"{field}.kind", f"unknown kind {kind!r}")
    validate_planar_set(s, field)
    return s


def domain_to_json(spec: DomainSpec) -> dict:
    lo, hi = spec.ambient
    return {
        "label": spec.label,
        "ambient": {"min": _fxy(lo), "max": _fxy(hi)},
        "continua": [_set_to_json(c) for c in spec.continua],
        "points": [_fxy(p) for p in spec.point_components],
        "outer": spec.outer,
    }


def domain_from_json(d: dict) -> DomainSpec:
    if not isinstance(d, dict):
        raise InvalidDomain("domain", "expected a JSON object")
    amb = _require(d, "ambient", "domain")
    if not isinstance(amb, dict):
        raise InvalidDomain("domain.ambient", "expected an object")
    lo = _xy(_require(amb, "min", "domain.ambient"), "domain.ambient.min")
    hi = _xy(_require(amb, "max", "domain.ambient"), "domain.ambient.max")
    raw = d.get("continua", [])
    if not isinstance(raw, list):
        raise InvalidDomain("domain.continua", "expected a list")
    continua = tuple(
        set_from_json(c, f"domain.continua[{i}]") for i, c in enumerate(raw)
    )
    pts_raw = d.get("points", [])
    if not isinstance(pts_raw, list):
        raise InvalidDomain("domain.points", "expected a list")
    pts = tuple(_xy(p, f"domain.points[{i}]") for i, p in enumerate(pts_raw))
    label = d.get("label", "")
    if not isinstance(label, str):
        raise InvalidDomain("domain.label", "expected a string")
    outer = d.get("outer", False)
    if not isinstance(outer, bool):
        raise InvalidDomain("domain.outer", "expected a boolean")
    spec = DomainSpec(
        ambient=(lo, hi),
        continua=continua,
        point_components=pts,
        label=label,
        outer=outer,
    )
    spec.validate()
    return spec


def save_domain(spec: DomainSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(domain_to_json(spec), f, indent=2)
        f.write("\n")


def load_domain(path: str) -> DomainSpec:
    try:
        with open(path, "r", encoding="utf-8") as f:
            d = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidDomain("domain", f"malformed JSON: {e}") from e
    return domain_from_json(d)


def family_to_json(fam: CurveFamilySpec) -> dict:
    out = {
        "label": fam.label,
        "source": _set_to_json(fam.source),
        "sink": _set_to_json(fam.sink),
        "forbidden": sorted(fam.forbidden),
    }
    if fam.ambient_restriction is not None:
        lo, hi = fam.ambient_restriction
        out["restriction"] = {"min": _fxy(lo), "max": _fxy(hi)}
    else:
        out["restriction"] = None
    return out


def family_from_json(d: dict) -> CurveFamilySpec:
    if not isinstance(d, dict):
        raise InvalidDomain("family", "expected a JSON object")
    source = set_from_json(_require(d, "source", "family"), "family.source")
    sink = set_from_json(_require(d, "sink", "family"), "family.sink")
    forb = d.get("forbidden", [])
    if not isinstance(forb, list) or not all(
        isinstance(i, int) and not isinstance(i, bool) for i in forb
    ):
        raise InvalidDomain("family.forbidden", "expected a list of integers")
    restriction = None
    r = d.get("restriction")
    if r is not None:
        if not isinstance(r, dict):
            raise InvalidDomain("family.restriction", "expected an object or null")
        restriction = (
            _xy(_require(r, "min", "family.restriction"), "family.restriction.min"),
            _xy(_require(r, "max", "family.restriction"), "family.restriction.max"),
        )
    label = d.get("label", "")
    if not isinstance(label, str):
        raise InvalidDomain("family.label", "expected a string")
    return CurveFamilySpec(
        source=source,
        sink=sink,
        forbidden=frozenset(forb),
        ambient_restriction=restriction,
        label=label,
    )


def load_family(path: str) -> CurveFamilySpec:
    try:
        with open(path, "r", encoding="utf-8") as f:
            d = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidDomain("family", f"malformed JSON: {e}") from e
    return family_from_json(d)


def save_family(fam: CurveFamilySpec, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(family_to_json(fam), f, indent=2)
        f.write("\n")
