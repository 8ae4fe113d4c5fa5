"""Parameterized domain constructions with analytic bounds attached.

Each generator returns a ScenarioCase: a domain, a connecting curve
family, the closed-form bound the computed modulus must respect, and
the exact relative distance of the ideal endpoint sets.  Together they
form the regression corpus for the decay laws:

    polar rectangle with a 1/n slit     value ~ 1/n      Delta = 2/3
    twin unit squares, gap 1/n          value ~ 1/n      Delta = 1
    kissing disks, separation 1/(n+1)   value ~ 1/sqrt n Delta = 1
    staircase of shrinking squares      value ~ eps_n    Delta -> 0

Endpoint segments and circles are thickened by one grid cell before
rasterization (discrete families need two-dimensional endpoint sets);
the stored delta_exact always refers to the ideal, unthickened sets.

Finite ambient windows stand in for the plane.  Where an untruncated
construction would let curves disperse through far-away space, the
family carries an ambient restriction to the region that drives the
decay law; the restricted family is a subfamily, so every upper bound
stated here remains valid for it.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .domain import (
    CurveFamilySpec,
    DomainSpec,
    domain_to_json,
    family_to_json,
)
from .errors import InvalidDomain, PackingFailed
from .geom import AxisRect, Disk, Point, PolarRect, relative_distance

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AnalyticBound:
    """Closed-form bound on the family's modulus.

    kind is "upper" or "lower"; source is a short derivation note.
    """

    kind: str
    value: float
    source: str

    def __post_init__(self) -> None:
        if self.kind not in ("upper", "lower"):
            raise InvalidDomain("bound.kind", self.kind)
        if not (math.isfinite(self.value) and self.value > 0.0):
            raise InvalidDomain("bound.value", f"{self.value}")


@dataclass(frozen=True)
class ScenarioCase:
    domain: DomainSpec
    family: CurveFamilySpec
    analytic_bound: AnalyticBound
    n: int
    delta_exact: float
    ref_h: float
    label: str


def _pow2_spacing(limit: float, coarsest: float = 1.0 / 64) -> float:
    """Largest power-of-two spacing at most min(limit, coarsest)."""
    h = coarsest
    while h > limit:
        h *= 0.5
    return h


# ---------------------------------------------------------------------------
# slit annulus


def polar_rectangle_domain(n: int, h: float = 1.0 / 128) -> ScenarioCase:
    """Annular band with a slit of angular width 1/n as the only passage.

    The band {1 <= r <= 2} around (6n, 0) is removed except for the
    sector |theta| < 1/(2n).  Curves join the circle of radius 0.9 to
    the circle of radius 2.1, both thickened one cell.  Every
    connecting curve crosses the slit sector, whose crossing modulus
    is the angular width over the log of the radial depth, giving the
    upper bound (1/n)/log 2.  The relative distance stays 2/3 for all
    n, so the family witnesses modulus decay at fixed separation.
    """
    if n < 1:
        raise InvalidDomain("n", "need n >= 1")
    c = Point(6.0 * n, 0.0)
    half_slit = 0.5 / n
    band = PolarRect(c, 1.0, 2.0, half_slit, TWO_PI - half_slit)
    E = PolarRect(c, 0.9 - h, 0.9, 0.0, TWO_PI)
    F = PolarRect(c, 2.1, 2.1 + h, 0.0, TWO_PI)
    spec = DomainSpec(
        ambient=(Point(c.x - 2.5, c.y - 2.5), Point(c.x + 2.5, c.y + 2.5)),
        continua=(band,),
        label=f"slit-annulus n={n}",
    )
    fam = CurveFamilySpec(
        source=E, sink=F, forbidden=frozenset({0}), label="across the band"
    )
    delta = relative_distance(Disk(c, 0.9), F)  # ideal inner circle vs ring
    return ScenarioCase(
        domain=spec,
        family=fam,
        analytic_bound=AnalyticBound(
            kind="upper",
            value=(1.0 / n) / math.log(2.0),
            source="slit angular width over log radial depth",
        ),
        n=n,
        delta_exact=delta,
        ref_h=h,
        label=f"slit-annulus n={n}",
    )


# ---------------------------------------------------------------------------
# twin squares


def twin_squares_domain(n: int, h: float = 1.0 / 128) -> ScenarioCase:
    """Two unit squares separated by a 1/n gap, endpoints inside the gap.

    E and F are segments on the gap's centerline at heights [1/8, 3/8]
    and [5/8, 7/8], thickened one cell.  Wherever a connecting curve
    runs, it crosses one of the three gap sub-rectangles (below, between
    or above the endpoint heights) in the short direction; the three
    crossing moduli sum to (1/n)(8 + 4 + 8) = 20/n.  The family is
    restricted to the gap column: a finite window would otherwise
    reroute curves through truncated outside space and distort the
    decay this construction exhibits.  Relative distance is exactly 1.
    """
    if n < 2:
        raise InvalidDomain("n", "need n >= 2")
    x0 = 3.0 * n
    gap = 1.0 / n
    S = AxisRect(Point(x0, 0.0), 1.0, 1.0)
    T = AxisRect(Point(x0 + 1.0 + gap, 0.0), 1.0, 1.0)
    xm = x0 + 1.0 + 0.5 * gap
    E = AxisRect(Point(xm - 0.5 * h, 0.125), h, 0.25)
    F = AxisRect(Point(xm - 0.5 * h, 0.625), h, 0.25)
    spec = DomainSpec(
        ambient=(Point(x0 - 1.2, -1.2), Point(x0 + 2.2 + gap, 2.2)),
        continua=(S, T),
        label=f"twin-squares n={n}",
    )
    fam = CurveFamilySpec(
        source=E,
        sink=F,
        forbidden=frozenset({0, 1}),
        ambient_restriction=(
            Point(x0 + 1.0, -0.5),
            Point(x0 + 1.0 + gap, 1.5),
        ),
        label="across the gap column",
    )
    # ideal segments: distance 1/4, both diameters 1/4
    return ScenarioCase(
        domain=spec,
        family=fam,
        analytic_bound=AnalyticBound(
            kind="upper",
            value=20.0 / n,
            source="sum of the three gap-column crossing moduli",
        ),
        n=n,
        delta_exact=1.0,
        ref_h=h,
        label=f"twin-squares n={n}",
    )


# ---------------------------------------------------------------------------
# kissing disks


def kissing_alpha(n: int) -> float:
    """Full height of the throat strip, alpha = sqrt(2d - d^2).

    At heights +-alpha/2 the horizontal gap between the disks has
    grown to exactly twice the minimal gap d = 1/(n+1).
    """
    d = 1.0 / (n + 1)
    return math.sqrt(2.0 * d - d * d)


def kissing_disks_domain(n: int, h: float | None = None) -> ScenarioCase:
    """Two unit-diameter disks at relative distance 1/(n+1).

    The throat between the disks widens to twice the minimal gap d at
    heights +-alpha/2; the strip spanning that interval has width
    exactly 2d.  E and F sit on the throat centerline at heights
    [alpha/8, 3*alpha/8] above and mirrored below, thickened one cell.
    Crossing the throat costs on the order of sqrt(d), and since the
    relative distance is below 1/n the bound takes the closed form
    (160/pi)*sqrt(1/(2n-1)).  The family is restricted to the throat
    strip so a finite window cannot flatten the decay.
    """
    if n < 1:
        raise InvalidDomain("n", "need n >= 1")
    d = 1.0 / (n + 1)
    if h is None:
        h = _pow2_spacing(d / 4.2)
    alpha = kissing_alpha(n)
    C = Disk(Point(0.0, 0.0), 0.5)
    D = Disk(Point(1.0 + d, 0.0), 0.5)
    x_mid = 0.5 * (1.0 + d)
    E = AxisRect(Point(x_mid - 0.5 * h, alpha / 8.0), h, alpha / 4.0)
    F = AxisRect(Point(x_mid - 0.5 * h, -3.0 * alpha / 8.0), h, alpha / 4.0)
    spec = DomainSpec(
        ambient=(Point(-0.65, -0.65), Point(1.0 + d + 0.65, 0.65)),
        continua=(C, D),
        label=f"kissing-disks n={n}",
    )
    # alpha-good rectangle: x in [(1-d)/2, (1+3d)/2], width 2d; pad a bit
    x_left = 0.5 * (1.0 - d)
    x_right = 0.5 * (1.0 + 3.0 * d)
    fam = CurveFamilySpec(
        source=E,
        sink=F,
        forbidden=frozenset({0, 1}),
        ambient_restriction=(
            Point(x_left - 0.25 * d, -0.5 * alpha),
            Point(x_right + 0.25 * d, 0.5 * alpha),
        ),
        label="through the throat",
    )
    return ScenarioCase(
        domain=spec,
        family=fam,
        analytic_bound=AnalyticBound(
            kind="upper",
            value=(160.0 / math.pi) * math.sqrt(1.0 / (2.0 * n - 1.0)),
            source="throat crossing estimate at separation below 1/n",
        ),
        n=n,
        delta_exact=1.0,  # ideal segments: distance alpha/4, diameters alpha/4
        ref_h=h,
        label=f"kissing-disks n={n}",
    )


# ---------------------------------------------------------------------------
# staircase of shrinking squares


def bonk_squares(n: int, h: float = 1.0 / 32) -> ScenarioCase:
    """Squares Q_k = [k, k+1-eps_k] x [0, 1-eps_k] with eps_k = 1/(k+2).

    The gaps between consecutive squares shrink like 1/k while the
    squares keep unit scale, so the relative distance of neighbours
    tends to 0: the configuration is not uniformly relatively
    separated.  The family crosses the gap column right of Q_n from
    bottom to top; its modulus is at most the column width over the
    crossing height, below 2*eps_n.
    """
    if n < 1:
        raise InvalidDomain("n", "need n >= 1")
    eps = [1.0 / (k + 2) for k in range(1, n + 1)]
    squares = tuple(
        AxisRect(Point(float(k), 0.0), 1.0 - e, 1.0 - e)
        for k, e in zip(range(1, n + 1), eps)
    )
    e_n = eps[-1]
    side = 1.0 - e_n
    col_x = n + 1.0 - e_n
    E = AxisRect(Point(col_x, 0.0), e_n, 0.1 * side)
    F = AxisRect(Point(col_x, 0.9 * side), e_n, 0.1 * side)
    spec = DomainSpec(
        ambient=(Point(0.5, -0.3), Point(n + 1.3, 1.3)),
        continua=squares,
        label=f"staircase-squares n={n}",
    )
    fam = CurveFamilySpec(
        source=E,
        sink=F,
        forbidden=frozenset(range(n)),
        ambient_restriction=(Point(col_x, 0.0), Point(n + 1.0, side)),
        label="across the last gap column",
    )
    if n >= 2:
        delta = relative_distance(squares[-2], squares[-1])
    else:
        delta = math.nan
    return ScenarioCase(
        domain=spec,
        family=fam,
        analytic_bound=AnalyticBound(
            kind="upper",
            value=2.0 * e_n,
            source="gap-column width over crossing height",
        ),
        n=n,
        delta_exact=delta,
        ref_h=h,
        label=f"staircase-squares n={n}",
    )


# ---------------------------------------------------------------------------
# random circle domains


def circle_domain_random(
    seed: int, count: int, c: float, max_rejects: int = 4000
) -> DomainSpec:
    """Disjoint random disks in the unit box, pairwise relative distance > c.

    Rejection sampling with a deterministic generator; the achieved
    minimal separation is recorded on the label.  Raises PackingFailed
    once the rejection budget is exhausted, which happens when count
    and c together overfill the box.
    """
    if count < 1:
        raise InvalidDomain("count", "need count >= 1")
    if c <= 0.0:
        raise InvalidDomain("c", "need c > 0")
    rng = np.random.default_rng(seed)
    margin = 0.06
    r_hi = min(0.09, 0.35 / math.sqrt(count))
    disks: list[Disk] = []
    rejects = 0
    budget = max_rejects * count
    while len(disks) < count:
        if rejects > budget:
            raise PackingFailed(
                f"placed {len(disks)}/{count} disks after {rejects} rejections"
            )
        r = float(rng.uniform(0.03, r_hi))
        x = float(rng.uniform(margin + r, 1.0 - margin - r))
        y = float(rng.uniform(margin + r, 1.0 - margin - r))
        cand = Disk(Point(x, y), r)
        ok = True
        for dk in disks:
            gap = math.hypot(dk.center.x - x, dk.center.y - y) - dk.radius - r
            if gap < 0.07 or gap <= c * 2.0 * min(dk.radius, r):
                ok = False
                break
        if ok:
            disks.append(cand)
        else:
            rejects += 1
    achieved = math.inf
    for i in range(len(disks)):
        for j in range(i + 1, len(disks)):
            achieved = min(achieved, relative_distance(disks[i], disks[j]))
    return DomainSpec(
        ambient=(Point(0.0, 0.0), Point(1.0, 1.0)),
        continua=tuple(disks),
        label=(
            f"random-circle-domain seed={seed} count={count}"
            f" sep>{c:g} achieved={achieved:.6g}"
        ),
    )


# ---------------------------------------------------------------------------
# fixture corpus


def corpus_cases() -> list[ScenarioCase]:
    """The canonical regression corpus, in fixed order."""
    cases: list[ScenarioCase] = []
    for n in (2, 5, 10, 20):
        cases.append(polar_rectangle_domain(n))
    for n in (2, 5, 10, 20):
        cases.append(twin_squares_domain(n))
    for n in (2, 8, 32):
        cases.append(kissing_disks_domain(n))
    for n in (1, 3, 6):
        cases.append(bonk_squares(n))
    return cases


def case_to_json(case: ScenarioCase) -> dict:
    return {
        "label": case.label,
        "n": case.n,
        "ref_h": case.ref_h,
        "delta_exact": None if math.isnan(case.delta_exact) else case.delta_exact,
        "bound": {
            "kind": case.analytic_bound.kind,
            "value": case.analytic_bound.value,
            "source": case.analytic_bound.source,
        },
        "domain": domain_to_json(case.domain),
        "family": family_to_json(case.family),
    }


def write_fixture_corpus(directory: str) -> list[str]:
    """Write every corpus case as <slug>.json; returns the file names."""
    os.makedirs(directory, exist_ok=True)
    names = []
    for case in corpus_cases():
        slug = case.label.replace(" ", "-").replace("=", "")
        name = f"{slug}.json"
        with open(os.path.join(directory, name), "w", encoding="utf-8") as f:
            json.dump(case_to_json(case), f, indent=1, sort_keys=True)
            f.write("\n")
        names.append(name)
    index = {"cases": names}
    with open(os.path.join(directory, "corpus.json"), "w", encoding="utf-8") as f:
        json.dump(index, f, indent=1, sort_keys=True)
        f.write("\n")
    return names
