"""Verification campaign: a deterministic check table rendered to CSV.

Each check produces one row (check id, reference note, expected,
observed, slack, status).  Rows are computed independently, sorted by
check id, and written with a fixed number format, so the output file
is byte-identical for a fixed seed and configuration regardless of
worker count.

Checks:
  oracle/*    closed-form classical moduli (unit square, concentric ring)
  fixtures/*  shipped fixture files agree with the generators
  bounds/*    solver value respects each fixture's analytic bound,
              up to the solver's own certified gap
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .domain import CurveFamilySpec, DomainSpec, rasterize
from .gallery import ScenarioCase, case_to_json, corpus_cases
from .geom import AxisRect, Disk, Point, PolarRect
from .modsolve import SolverConfig, modulus

TWO_PI = 2.0 * math.pi
ORACLE_TOL = 0.10

CSV_HEADER = "check,reference,expected,observed,slack,status"


@dataclass(frozen=True)
class CheckRow:
    check: str
    reference: str
    expected: float
    observed: float
    slack: float
    status: str  # pass | fail

    def csv(self) -> str:
        ref = self.reference.replace(",", ";")
        return (
            f"{self.check},{ref},{self.expected:.17g},"
            f"{self.observed:.17g},{self.slack:.17g},{self.status}"
        )


def rows_to_csv(rows: list[CheckRow]) -> str:
    return "\n".join([CSV_HEADER] + [r.csv() for r in rows]) + "\n"


def _pow2_floor(x: float) -> float:
    h = 1.0
    while h > x:
        h *= 0.5
    return h


def _slug(label: str) -> str:
    return label.replace(" ", "-").replace("=", "")


def _feature_size(case: ScenarioCase) -> float:
    """Smallest geometric feature the grid must resolve: the gap width."""
    n = case.n
    if case.label.startswith("slit-annulus"):
        return 1.0 / n
    if case.label.startswith("twin-squares"):
        return 1.0 / n
    if case.label.startswith("kissing-disks"):
        return 1.0 / (n + 1)
    if case.label.startswith("staircase-squares"):
        return 1.0 / (n + 2)
    return 4.0 * case.ref_h


def _row_spacing(case: ScenarioCase, h_scale: float) -> float:
    """Campaign spacing: a quick default, scaled, clamped to a quarter
    of the limiting feature so rasterization always resolves the gap."""
    if case.label.startswith(("slit-annulus", "twin-squares")):
        quick = 1.0 / 64
    else:
        quick = case.ref_h
    return _pow2_floor(min(quick * h_scale, _feature_size(case) / 4.0))


# ---------------------------------------------------------------------------
# oracle rows


def _check_square(h: float, seed: int) -> CheckRow:
    spec = DomainSpec(
        ambient=(Point(0.0, 0.0), Point(1.0, 1.0)),
        continua=(),
        label="unit-square",
    )
    fam = CurveFamilySpec(
        source=AxisRect(Point(0.0, 0.0), h, 1.0),
        sink=AxisRect(Point(1.0 - h, 0.0), h, 1.0),
        label="left wall to right wall",
    )
    res = modulus(rasterize(spec, h), fam, SolverConfig(seed=seed))
    err = abs(res.value - 1.0)
    return CheckRow(
        check="oracle/unit-square",
        reference="crossing modulus of a square is side over side",
        expected=1.0,
        observed=res.value,
        slack=ORACLE_TOL - err,
        status="pass" if err <= ORACLE_TOL else "fail",
    )


def _check_ring(h: float, seed: int) -> CheckRow:
    # curves joining the unit circle to the circle of radius e: the
    # radial extremal density is admissible even for curves that stray
    # outside the ring, so the window corners do not move the value
    c = Point(0.0, 0.0)
    R = math.e
    half = R + 0.1
    spec = DomainSpec(
        ambient=(Point(-half, -half), Point(half, half)),
        continua=(Disk(c, 1.0),),
        label="concentric-ring",
    )
    fam = CurveFamilySpec(
        source=PolarRect(c, 1.0, 1.0 + 2.0 * h, 0.0, TWO_PI),
        sink=PolarRect(c, R - 2.0 * h, R, 0.0, TWO_PI),
        forbidden=frozenset({0}),
        label="across the ring",
    )
    res = modulus(rasterize(spec, h), fam, SolverConfig(seed=seed))
    rel = abs(res.value - TWO_PI) / TWO_PI
    return CheckRow(
        check="oracle/concentric-ring",
        reference="ring of log-ratio one has crossing modulus two pi",
        expected=TWO_PI,
        observed=res.value,
        slack=ORACLE_TOL - rel,
        status="pass" if rel <= ORACLE_TOL else "fail",
    )


# ---------------------------------------------------------------------------
# fixture rows


def default_fixture_dir() -> str:
    return os.path.join(os.path.dirname(__file__), "fixtures")


def _load_fixture(fixture_dir: str, name: str) -> dict:
    with open(os.path.join(fixture_dir, name), encoding="utf-8") as f:
        return json.load(f)


def _integrity_row(case: ScenarioCase, shipped: dict) -> CheckRow:
    match = shipped == case_to_json(case)
    return CheckRow(
        check=f"fixtures/{_slug(case.label)}",
        reference="shipped fixture equals the generator output",
        expected=1.0,
        observed=1.0 if match else 0.0,
        slack=0.0 if match else -1.0,
        status="pass" if match else "fail",
    )


def _bound_row(
    case: ScenarioCase, shipped: dict, h_scale: float, seed: int
) -> CheckRow:
    bound = float(shipped["bound"]["value"])
    h = _row_spacing(case, h_scale)
    res = modulus(rasterize(case.domain, h), case.family, SolverConfig(seed=seed))
    gap = max(0.0, res.value - res.lower_bound)
    slack = bound + gap - res.value
    return CheckRow(
        check=f"bounds/{_slug(case.label)}",
        reference=case.analytic_bound.source,
        expected=bound,
        observed=res.value,
        slack=slack,
        status="pass" if slack >= -1e-12 else "fail",
    )


# ---------------------------------------------------------------------------
# driver


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("TRANSMOD_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return 1


def run_campaign(
    out_dir: str | None = None,
    seed: int = 0,
    h_scale: float = 1.0,
    threads: int | None = None,
    fixture_dir: str | None = None,
) -> list[CheckRow]:
    """Run every check; write out_dir/campaign.csv when a directory is given.

    Row order and formatting are independent of the worker count, so
    repeated runs with the same seed and scale produce identical bytes.
    """
    fixture_dir = fixture_dir or default_fixture_dir()
    index = _load_fixture(fixture_dir, "corpus.json")
    by_slug = {_slug(c.label): c for c in corpus_cases()}

    tasks = [lambda: _check_square(1.0 / 64, seed), lambda: _check_ring(1.0 / 64, seed)]
    for name in index["cases"]:
        case = by_slug.get(name.removesuffix(".json"))
        if case is None:
            raise ValueError(f"fixture {name} has no matching generator")
        shipped = _load_fixture(fixture_dir, name)
        tasks.append(lambda c=case, s=shipped: _integrity_row(c, s))
        tasks.append(lambda c=case, s=shipped: _bound_row(c, s, h_scale, seed))

    n = _thread_count(threads)
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            futures = [pool.submit(t) for t in tasks]
            rows = [f.result() for f in futures]
    else:
        rows = [t() for t in tasks]
    rows.sort(key=lambda r: r.check)

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "campaign.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(rows_to_csv(rows))
    return rows


def summary(rows: list[CheckRow]) -> str:
    failed = [r for r in rows if r.status != "pass"]
    if not failed:
        return f"all {len(rows)} checks pass"
    lines = [f"{len(failed)} of {len(rows)} checks FAIL:"]
    lines += [f"  {r.csv()}" for r in failed]
    return "\n".join(lines)
