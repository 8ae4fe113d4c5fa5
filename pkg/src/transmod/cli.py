"""Command-line front end.

    transmod compute --domain d.json --family f.json --h 0.0078125 --out run/
    transmod campaign --out run/ [--seed N] [--h-scale S] [--threads N]
    transmod gallery-list [--format csv|human]
    transmod check-geometry --domain d.json [--family f.json] --h H

Exit codes: 0 success (solver converged, or every campaign row passed),
1 campaign failures, 2 solver stopped at its iteration cap, 3 input
error (one-line diagnostic on stderr).  A family that admits no
connecting curve at all is a definitive answer, reported as success.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .campaign import run_campaign, rows_to_csv, summary
from .domain import (
    CurveFamilySpec,
    QuotientGrid,
    family_from_json,
    load_domain,
    load_family,
    rasterize,
)
from .errors import TransmodError
from .gallery import corpus_cases
from .modsolve import ModulusResult, SolverConfig, modulus
from .svg import density_svg, domain_svg

RESULT_HEADER = "label,h,value,lower_bound,upper_bound,iterations,status"


@dataclass
class RunConfig:
    command: str
    domain_path: str | None = None
    family: str | None = None
    h: float = 1.0 / 128
    seed: int = 0
    out_dir: str = "."
    fmt: str = "human"
    svg: bool = False
    max_paths: int | None = None
    path_tol: float | None = None
    h_scale: float = 1.0
    threads: int | None = None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="transmod",
        description="discrete classical and transboundary 2-modulus",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--h", type=float, default=1.0 / 128, help="grid spacing")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--format", choices=("csv", "human"), default="human")

    sp = sub.add_parser("compute", help="modulus of one family on one domain")
    common(sp)
    sp.add_argument("--domain", required=True, help="domain JSON file")
    sp.add_argument("--family", required=True, help="family JSON file or inline JSON")
    sp.add_argument("--svg", action="store_true", help="also write SVG plots")
    sp.add_argument("--max-paths", type=int, default=None)
    sp.add_argument("--path-tol", type=float, default=None)

    sp = sub.add_parser("campaign", help="run the verification campaign")
    common(sp)
    sp.add_argument("--h-scale", type=float, default=1.0)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--fixtures", default=None, help="override fixture directory")

    sp = sub.add_parser("gallery-list", help="list the scenario corpus")
    sp.add_argument("--format", choices=("csv", "human"), default="human")

    sp = sub.add_parser("check-geometry", help="rasterize and report grid health")
    common(sp)
    sp.add_argument("--domain", required=True)
    sp.add_argument("--family", default=None)
    return p


def _load_family_arg(arg: str) -> CurveFamilySpec:
    if os.path.exists(arg):
        return load_family(arg)
    return family_from_json(json.loads(arg))


def _solver_config(cfg: RunConfig) -> SolverConfig:
    sc = SolverConfig(seed=cfg.seed)
    if cfg.max_paths is not None:
        sc.max_paths = cfg.max_paths
    if cfg.path_tol is not None:
        sc.path_tol = cfg.path_tol
    return sc


def _write_density(path: str, grid: QuotientGrid, res: ModulusResult) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# h={grid.h:.17g} nx={grid.nx} ny={grid.ny}\n")
        for idx in sorted(res.density.vertex_weights):
            f.write(f"# weight[{idx}]={res.density.vertex_weights[idx]:.17g}\n")
        np.savetxt(f, res.density.rho_cells, fmt="%.17g")


def cmd_compute(cfg: RunConfig) -> int:
    try:
        spec = load_domain(cfg.domain_path)
        fam = _load_family_arg(cfg.family)
        grid = rasterize(spec, cfg.h)
        res = modulus(grid, fam, _solver_config(cfg))
    except (TransmodError, OSError, ValueError, KeyError) as exc:
        print(f"transmod: {exc}", file=sys.stderr)
        return 3
    os.makedirs(cfg.out_dir, exist_ok=True)
    label = spec.label or "domain"
    with open(
        os.path.join(cfg.out_dir, "result.csv"), "w", encoding="utf-8", newline="\n"
    ) as f:
        f.write(RESULT_HEADER + "\n")
        f.write(res.csv_row(label.replace(",", ";"), cfg.h) + "\n")
    _write_density(os.path.join(cfg.out_dir, "density.txt"), grid, res)
    if cfg.svg:
        with open(
            os.path.join(cfg.out_dir, "domain.svg"), "w", encoding="utf-8"
        ) as f:
            f.write(domain_svg(spec, fam))
        with open(
            os.path.join(cfg.out_dir, "density.svg"), "w", encoding="utf-8"
        ) as f:
            f.write(density_svg(grid, res.density.rho_cells))
    if cfg.fmt == "human":
        print(
            f"{label}: value={res.value:.6g} "
            f"[{res.lower_bound:.6g}, {res.upper_bound:.6g}] "
            f"iters={res.iterations} status={res.status}"
        )
    else:
        print(res.csv_row(label.replace(",", ";"), cfg.h))
    return 2 if res.status == "iteration_cap" else 0


def cmd_campaign(cfg: RunConfig, fixture_dir: str | None) -> int:
    try:
        rows = run_campaign(
            out_dir=cfg.out_dir,
            seed=cfg.seed,
            h_scale=cfg.h_scale,
            threads=cfg.threads,
            fixture_dir=fixture_dir,
        )
    except (TransmodError, OSError, ValueError, KeyError) as exc:
        print(f"transmod: {exc}", file=sys.stderr)
        return 3
    if cfg.fmt == "csv":
        sys.stdout.write(rows_to_csv(rows))
    print(summary(rows))
    return 0 if all(r.status == "pass" for r in rows) else 1


def cmd_gallery_list(fmt: str) -> int:
    cases = corpus_cases()
    if fmt == "csv":
        print("label,n,ref_h,bound_kind,bound_value,delta_exact")
        for c in cases:
            print(
                f"{c.label.replace(',', ';')},{c.n},{c.ref_h:.17g},"
                f"{c.analytic_bound.kind},{c.analytic_bound.value:.17g},"
                f"{c.delta_exact:.17g}"
            )
    else:
        for c in cases:
            print(
                f"{c.label:24s} n={c.n:<3d} h={c.ref_h:<12g} "
                f"{c.analytic_bound.kind} bound {c.analytic_bound.value:.6g}"
            )
    return 0


def cmd_check_geometry(cfg: RunConfig) -> int:
    try:
        spec = load_domain(cfg.domain_path)
        grid = rasterize(spec, cfg.h)
        report = [
            f"grid {grid.nx}x{grid.ny} h={grid.h:g}",
            f"free cells {grid.n_free}",
            f"contracted components {len(grid.contracted)}",
        ]
        if cfg.family is not None:
            from .domain import family_endpoints

            fam = _load_family_arg(cfg.family)
            src, snk = family_endpoints(grid, fam)
            report.append(f"source cells {int(src.sum())}")
            report.append(f"sink cells {int(snk.sum())}")
    except (TransmodError, OSError, ValueError, KeyError) as exc:
        print(f"transmod: {exc}", file=sys.stderr)
        return 3
    print("\n".join(report))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        domain_path=getattr(args, "domain", None),
        family=getattr(args, "family", None),
        h=getattr(args, "h", 1.0 / 128),
        seed=getattr(args, "seed", 0),
        out_dir=getattr(args, "out", "."),
        fmt=getattr(args, "format", "human"),
        svg=getattr(args, "svg", False),
        max_paths=getattr(args, "max_paths", None),
        path_tol=getattr(args, "path_tol", None),
        h_scale=getattr(args, "h_scale", 1.0),
        threads=getattr(args, "threads", None),
    )
    if cfg.h <= 0.0:
        print("transmod: h must be positive", file=sys.stderr)
        return 3
    if cfg.command == "compute":
        return cmd_compute(cfg)
    if cfg.command == "campaign":
        return cmd_campaign(cfg, getattr(args, "fixtures", None))
    if cfg.command == "gallery-list":
        return cmd_gallery_list(cfg.fmt)
    return cmd_check_geometry(cfg)


if __name__ == "__main__":
    sys.exit(main())
