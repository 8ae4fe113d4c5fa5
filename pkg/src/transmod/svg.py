"""Minimal SVG output: domain outlines and density heat maps.

Decoration only; nothing in the verification pipeline reads these
files back.  The writer is self-contained string assembly, and every
float is emitted with a fixed short format so the files are stable
across runs.
"""
from __future__ import annotations

import math

import numpy as np

from .domain import CurveFamilySpec, DomainSpec, QuotientGrid
from .geom import AxisRect, Disk, PlanarSet, PointSet, PolarRect, Polygon

_CANVAS = 720.0
_PAD = 12.0


def _fmt(x: float) -> str:
    return f"{x:.3f}"


class _Mapper:
    """Affine map from world coordinates to a padded SVG canvas."""

    def __init__(self, xlo: float, ylo: float, xhi: float, yhi: float):
        span = max(xhi - xlo, yhi - ylo, 1e-12)
        self.scale = (_CANVAS - 2.0 * _PAD) / span
        self.xlo = xlo
        self.yhi = yhi
        self.w = _PAD * 2.0 + (xhi - xlo) * self.scale
        self.h = _PAD * 2.0 + (yhi - ylo) * self.scale

    def x(self, wx: float) -> float:
        return _PAD + (wx - self.xlo) * self.scale

    def y(self, wy: float) -> float:
        # SVG y grows downward
        return _PAD + (self.yhi - wy) * self.scale


def _shape_svg(s: PlanarSet, m: _Mapper, style: str) -> str:
    if isinstance(s, Disk):
        return (
            f'<circle cx="{_fmt(m.x(s.center.x))}" cy="{_fmt(m.y(s.center.y))}"'
            f' r="{_fmt(s.radius * m.scale)}" {style}/>'
        )
    if isinstance(s, AxisRect):
        return (
            f'<rect x="{_fmt(m.x(s.corner.x))}"'
            f' y="{_fmt(m.y(s.corner.y + s.height))}"'
            f' width="{_fmt(s.width * m.scale)}"'
            f' height="{_fmt(s.height * m.scale)}" {style}/>'
        )
    if isinstance(s, PointSet):
        return (
            f'<circle cx="{_fmt(m.x(s.point.x))}" cy="{_fmt(m.y(s.point.y))}"'
            f' r="2.0" {style}/>'
        )
    if isinstance(s, Polygon):
        pts = " ".join(
            f"{_fmt(m.x(p.x))},{_fmt(m.y(p.y))}" for p in s.vertices
        )
        return f'<polygon points="{pts}" {style}/>'
    if isinstance(s, PolarRect):
        return _polar_path(s, m, style)
    raise TypeError(f"no SVG form for {type(s).__name__}")


def _polar_path(s: PolarRect, m: _Mapper, style: str) -> str:
    span = s.theta_max - s.theta_min
    if span >= 2.0 * math.pi - 1e-12:
        # full band: two concentric circles, even-odd fill
        cx, cy = _fmt(m.x(s.center.x)), _fmt(m.y(s.center.y))
        ro, ri = _fmt(s.r_out * m.scale), _fmt(s.r_in * m.scale)
        d = (
            f"M {cx} {cy} m -{ro},0 a {ro},{ro} 0 1,0 {_fmt(2 * s.r_out * m.scale)},0"
            f" a {ro},{ro} 0 1,0 -{_fmt(2 * s.r_out * m.scale)},0"
            f" M {cx} {cy} m -{ri},0 a {ri},{ri} 0 1,0 {_fmt(2 * s.r_in * m.scale)},0"
            f" a {ri},{ri} 0 1,0 -{_fmt(2 * s.r_in * m.scale)},0"
        )
        return f'<path d="{d}" fill-rule="evenodd" {style}/>'
    # annular sector: outer arc forward, inner arc back
    n_arc = max(8, int(span / 0.1))
    outer = [
        (
            s.center.x + s.r_out * math.cos(s.theta_min + span * k / n_arc),
            s.center.y + s.r_out * math.sin(s.theta_min + span * k / n_arc),
        )
        for k in range(n_arc + 1)
    ]
    inner = [
        (
            s.center.x + s.r_in * math.cos(s.theta_max - span * k / n_arc),
            s.center.y + s.r_in * math.sin(s.theta_max - span * k / n_arc),
        )
        for k in range(n_arc + 1)
    ]
    pts = outer + inner
    path = "M " + " L ".join(f"{_fmt(m.x(px))} {_fmt(m.y(py))}" for px, py in pts) + " Z"
    return f'<path d="{path}" {style}/>'


def domain_svg(spec: DomainSpec, family: CurveFamilySpec | None = None) -> str:
    """Outline drawing: window frame, continua, endpoint sets."""
    lo, hi = spec.ambient
    m = _Mapper(lo.x, lo.y, hi.x, hi.y)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(m.w)}"'
        f' height="{_fmt(m.h)}" viewBox="0 0 {_fmt(m.w)} {_fmt(m.h)}">',
        f'<rect x="0" y="0" width="{_fmt(m.w)}" height="{_fmt(m.h)}" fill="white"/>',
        f'<rect x="{_fmt(m.x(lo.x))}" y="{_fmt(m.y(hi.y))}"'
        f' width="{_fmt((hi.x - lo.x) * m.scale)}"'
        f' height="{_fmt((hi.y - lo.y) * m.scale)}"'
        f' fill="none" stroke="#444" stroke-width="1"/>',
    ]
    for s in spec.continua:
        parts.append(_shape_svg(s, m, 'fill="#b0b6c0" stroke="#555" stroke-width="0.8"'))
    if family is not None:
        if family.ambient_restriction is not None:
            a, b = family.ambient_restriction
            parts.append(
                f'<rect x="{_fmt(m.x(a.x))}" y="{_fmt(m.y(b.y))}"'
                f' width="{_fmt((b.x - a.x) * m.scale)}"'
                f' height="{_fmt((b.y - a.y) * m.scale)}"'
                f' fill="none" stroke="#888" stroke-width="1" stroke-dasharray="5,4"/>'
            )
        parts.append(_shape_svg(family.source, m, 'fill="#2b7de9" stroke="none"'))
        parts.append(_shape_svg(family.sink, m, 'fill="#e0483c" stroke="none"'))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _heat_color(t: float) -> str:
    """Five-stop ramp from near-black through blue and orange to yellow."""
    stops = [
        (0.05, 0.03, 0.14),
        (0.23, 0.32, 0.55),
        (0.48, 0.52, 0.47),
        (0.87, 0.55, 0.20),
        (0.99, 0.91, 0.14),
    ]
    t = min(max(t, 0.0), 1.0) * (len(stops) - 1)
    k = min(int(t), len(stops) - 2)
    f = t - k
    rgb = [
        int(round(255 * (stops[k][c] * (1 - f) + stops[k + 1][c] * f)))
        for c in range(3)
    ]
    return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"


def density_svg(grid: QuotientGrid, rho_cells: np.ndarray, max_side: int = 180) -> str:
    """Heat map of a cell density, block-averaged down to a drawable size."""
    arr = np.asarray(rho_cells, dtype=float)
    if arr.shape != (grid.ny, grid.nx):
        raise ValueError(f"density shape {arr.shape} != grid {(grid.ny, grid.nx)}")
    step = max(1, int(math.ceil(max(grid.nx, grid.ny) / max_side)))
    ny = grid.ny // step
    nx = grid.nx // step
    trimmed = arr[: ny * step, : nx * step]
    blocks = trimmed.reshape(ny, step, nx, step).mean(axis=(1, 3))
    top = float(blocks.max())
    m = _Mapper(0.0, 0.0, float(nx), float(ny))
    cell = m.scale
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(m.w)}"'
        f' height="{_fmt(m.h)}" viewBox="0 0 {_fmt(m.w)} {_fmt(m.h)}">',
        f'<rect x="0" y="0" width="{_fmt(m.w)}" height="{_fmt(m.h)}" fill="white"/>',
    ]
    if top > 0.0:
        for j in range(ny):
            for i in range(nx):
                v = blocks[j, i]
                if v <= 0.0:
                    continue
                parts.append(
                    f'<rect x="{_fmt(m.x(float(i)))}" y="{_fmt(m.y(float(j + 1)))}"'
                    f' width="{_fmt(cell)}" height="{_fmt(cell)}"'
                    f' fill="{_heat_color(v / top)}"/>'
                )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
