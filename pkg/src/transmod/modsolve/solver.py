"""Discrete modulus of connecting curve families, with certificates.

modulus() seeds from a potential solve, then runs constraint
generation: alternate between (a) finding the density-shortest
connecting paths and (b) shifting a unit path flow toward them by exact
line search, with small path collections re-solved exactly by the
restricted quadratic program.  The flow's usage energy E certifies the
modulus from below (modulus >= 1/E for every unit flow), the mass of a
candidate density rescaled by its true shortest path length certifies
it from above, and the loop stops when the relative gap closes under
the configured tolerance.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from typing import Optional, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _dijkstra

from ..domain import CurveFamilySpec, QuotientGrid
from ..errors import InvalidDomain, PreconditionViolated
from .graph import PathGraph, build_graph
from .harmonic import harmonic_seed
from .qp import _nnls_gram, solve_restricted

PathStep = tuple  # ("cell", ix, iy) | ("vertex", k)


@dataclass
class SolverConfig:
    gap_tol: float = 0.02
    path_tol: float = 1e-3
    batch: int = 56
    stencil: int = 16
    max_rounds: int = 120
    max_paths: Optional[int] = None
    seed: int = 0
    # search effort scales down on large grids: a grid of n variables
    # runs at most round_budget // n refinement rounds (but at least 6);
    # counting work in variable-rounds keeps results machine-independent
    round_budget: int = 8_000_000

    @staticmethod
    def from_json(d: dict) -> "SolverConfig":
        cfg = SolverConfig()
        known = set(cfg.__dataclass_fields__)
        for k, v in d.items():
            if k not in known:
                raise InvalidDomain(f"solver.{k}", "unknown configuration key")
            setattr(cfg, k, v)
        return cfg

    def to_json(self) -> dict:
        return asdict(self)


def load_solver_config(path: str) -> SolverConfig:
    with open(path, "r", encoding="utf-8") as f:
        return SolverConfig.from_json(json.load(f))


@dataclass
class DensityCertificate:
    """Admissible candidate: cell densities on the grid plus one weight
    per contracted vertex (keyed by continuum index)."""

    rho_cells: np.ndarray
    vertex_weights: dict[int, float]
    h: float

    def mass(self) -> float:
        return float(
            self.h * self.h * np.sum(self.rho_cells**2)
            + sum(v * v for v in self.vertex_weights.values())
        )


@dataclass
class ModulusResult:
    value: float
    lower_bound: float
    upper_bound: float
    density: DensityCertificate
    iterations: int
    shortest_final: float
    status: str  # converged | iteration_cap | infeasible_family
    n_constraints: int = 0

    @property
    def gap(self) -> float:
        if self.lower_bound <= 0.0:
            return math.inf if self.upper_bound > 0.0 else 0.0
        return self.upper_bound / self.lower_bound - 1.0

    def csv_row(self, label: str, h: float) -> str:
        return (
            f"{label},{h:.17g},{self.value:.17g},{self.lower_bound:.17g},"
            f"{self.upper_bound:.17g},{self.iterations},{self.status}"
        )


def _shortest_all(graph: PathGraph, rho: np.ndarray, predecessors: bool = False):
    """Forward trees from every super source and reverse trees from every
    super sink, one backend call each."""
    Gf = graph.csr(rho)
    Gr = graph.csr_reverse(rho)
    if predecessors:
        dist_f, pred_f = _dijkstra(
            Gf, directed=True, indices=list(graph.super_sources),
            return_predecessors=True,
        )
        dist_r, pred_r = _dijkstra(
            Gr, directed=True, indices=list(graph.super_sinks),
            return_predecessors=True,
        )
        return dist_f, pred_f, dist_r, pred_r
    dist_f = _dijkstra(Gf, directed=True, indices=list(graph.super_sources))
    return dist_f, None, None, None


def _walk_back(pred_row: np.ndarray, t: int) -> list[int]:
    nodes = [t]
    u = t
    while pred_row[u] >= 0:
        u = int(pred_row[u])
        nodes.append(u)
    nodes.reverse()
    return nodes


def _loop_erase(nodes: list[int]) -> list[int]:
    pos: dict[int, int] = {}
    out: list[int] = []
    for v in nodes:
        if v in pos:
            for u in out[pos[v] + 1 :]:
                del pos[u]
            del out[pos[v] + 1 :]
        else:
            pos[v] = len(out)
            out.append(v)
    return out


def _extract_rows(
    graph: PathGraph,
    dist_f: np.ndarray,
    pred_f: np.ndarray,
    dist_r: np.ndarray,
    pred_r: np.ndarray,
    batch: int,
    threshold: float,
) -> list[tuple[int, dict[int, float]]]:
    """Short connecting paths as (signature, coefficient row) pairs:
    loop-erased shortest paths forced through spatially spread waypoint
    cells whose through-length is under the threshold."""
    C = graph.n_cells
    through = dist_f[:C] + dist_r[:C]
    cand = np.nonzero(through < threshold)[0]
    if len(cand) == 0:
        return []
    order = cand[np.argsort(through[cand], kind="stable")]
    order = order[:20000]

    span = max(graph.grid.nx, graph.grid.ny)
    d_min = max(2, int(span / math.sqrt(4.0 * batch)))
    picks: list[int] = []
    px: list[int] = []
    py: list[int] = []
    must = max(1, batch // 4)
    for m in order:
        if len(picks) >= batch:
            break
        x, y = int(graph.cell_ix[m]), int(graph.cell_iy[m])
        if len(picks) >= must and picks:
            ax = np.abs(np.array(px) - x)
            ay = np.abs(np.array(py) - y)
            if int(np.maximum(ax, ay).min()) < d_min:
                continue
        picks.append(int(m))
        px.append(x)
        py.append(y)

    rows = []
    local: set = set()
    for m in picks:
        head = _walk_back(pred_f, m)          # S .. m
        tail = [m]
        u = m
        while pred_r[u] >= 0:
            u = int(pred_r[u])
            tail.append(u)                     # m .. T in forward arcs
        nodes = _loop_erase(head + tail[1:])
        sig = hash(tuple(nodes))
        if sig in local:
            continue
        local.add(sig)
        rows.append((sig, graph.row_of_node_path(nodes)))
    return rows


def _rows_to_csr(rows: list[dict[int, float]], n_vars: int) -> csr_matrix:
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for r in rows:
        ks = sorted(r)
        indices.extend(ks)
        data.extend(r[k] for k in ks)
        indptr.append(len(indices))
    return csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int32),
         np.array(indptr, dtype=np.int32)),
        shape=(len(rows), n_vars),
    )


def _tree_flow(
    graph: PathGraph,
    dist: np.ndarray,
    pred: np.ndarray,
    sink_cells: np.ndarray,
    mu: np.ndarray,
    reverse: bool = False,
) -> np.ndarray:
    """Usage vector of the unit flow routing mu (summing to one) between
    the tree root and the given terminal cells along the shortest-path
    tree.  With reverse=True the tree hangs from a super sink and arcs
    run child-to-parent in the forward orientation."""
    acc = np.zeros(graph.n_nodes)
    acc[sink_cells] = mu
    finite = np.isfinite(dist)
    nodes = np.nonzero(finite)[0]
    pr = pred[nodes]
    # leaf peeling keeps subtree sums exact even when arc costs tie
    n_children = np.zeros(graph.n_nodes, dtype=np.int64)
    np.add.at(n_children, pr[pr >= 0], 1)
    a_list = acc.tolist()
    kids = n_children.tolist()
    stack = [int(v) for v in nodes[n_children[nodes] == 0]]
    pred_l = pred.tolist()
    while stack:
        v = stack.pop()
        p = pred_l[v]
        if p < 0:
            continue
        x = a_list[v]
        if x != 0.0:
            a_list[p] += x
        kids[p] -= 1
        if kids[p] == 0:
            stack.append(p)
    acc = np.asarray(a_list)

    keep = (pr >= 0) & (acc[nodes] > 0.0)
    vs = nodes[keep]
    if reverse:
        eid = graph.arc_edge[graph.arc_lookup(vs, pred[vs])]
    else:
        eid = graph.arc_edge[graph.arc_lookup(pred[vs], vs)]
    share = graph.edges_w[eid] * acc[vs]
    V4 = graph.edges_vars[eid]
    usage = np.zeros(graph.n_vars)
    for c in range(4):
        col = V4[:, c]
        ok = col >= 0
        np.add.at(usage, col[ok], share[ok])
    # terminal stub charge at each selected sink cell
    usage[sink_cells] += 0.5 * graph.grid.h * mu
    return usage


def _true_shortest(g: PathGraph, rho: np.ndarray, dead: list[bool]) -> float:
    dist_f, *_ = _shortest_all(g, rho)
    vals = [
        dist_f[i, g.super_sinks[i]]
        for i in range(len(g.super_sinks))
        if not dead[i]
    ]
    return float(min(vals)) if vals else math.inf


def modulus_union(
    grid: QuotientGrid,
    families: Sequence[CurveFamilySpec],
    config: Optional[SolverConfig] = None,
    graph: Optional[PathGraph] = None,
) -> ModulusResult:
    """Modulus of the union of the given connecting families: the
    returned density blocks every family at transboundary length one.

    The driver maintains a unit flow spread over connecting paths.  Its
    usage energy E certifies the modulus from below (modulus >= 1/E for
    every unit flow), while the induced density F / w, rescaled by its
    shortest transboundary length, certifies it from above.  Each round
    routes a batch of spread-out short paths and takes the exact line
    search step toward their mixture; small path sets are afterwards
    polished by the exact restricted program.
    """
    cfg = config or SolverConfig()
    g = graph if graph is not None else build_graph(grid, families, cfg.stencil)
    n = g.n_vars
    stash_cap = cfg.max_paths
    if stash_cap is None:
        stash_cap = 20 * (grid.nx + grid.ny)

    inv_w = 1.0 / g.mass_w
    seeds = [harmonic_seed(g, i) for i in range(len(families))]
    live = [s for s in seeds if s is not None]
    F = np.zeros(n)
    E = 0.0
    if live:
        # admissible-for-every-family candidate: root of summed squares
        rho = np.sqrt(np.sum([s.rho * s.rho for s in live], axis=0))
        U = np.stack([s.usage for s in live])
        if len(live) == 1:
            theta = np.ones(1)
        else:
            # best mixture of the per-family unit flows
            gram = (U * inv_w[None, :]) @ U.T
            q = _nnls_gram(gram, np.ones(len(live)))[0]
            theta = q / q.sum() if q.sum() > 0 else np.full(len(live), 1.0 / len(live))
        F = theta @ U
        E = float(np.dot(F * F, inv_w))
    else:
        rho = np.full(n, 1e-8)  # geometry-driven first trees

    rows: list[dict[int, float]] = []
    seen: set = set()
    lower = 1.0 / E if E > 0.0 else 0.0
    dead = [False] * len(families)
    status = "iteration_cap"
    best_rho, best_upper, best_lstar = rho, math.inf, math.inf
    rounds = 0
    stalls = 0
    cap = max(6, min(cfg.max_rounds, cfg.round_budget // max(n, 1)))

    for rounds in range(1, cap + 1):
        dist_f, pred_f, dist_r, pred_r = _shortest_all(g, rho, predecessors=True)
        fam_short = np.array(
            [dist_f[i, g.super_sinks[i]] for i in range(len(families))]
        )
        if rounds == 1:
            dead = [not math.isfinite(s) for s in fam_short]
            if all(dead):
                zero = DensityCertificate(
                    rho_cells=np.zeros((grid.ny, grid.nx)),
                    vertex_weights={k: 0.0 for k in g.vertex_ids},
                    h=grid.h,
                )
                return ModulusResult(
                    value=0.0, lower_bound=0.0, upper_bound=0.0, density=zero,
                    iterations=1, shortest_final=math.inf,
                    status="infeasible_family", n_constraints=0,
                )
        alive = [i for i in range(len(families)) if not dead[i]]
        lstar = float(min(fam_short[i] for i in alive))

        if lstar > 0.0:
            up_now = g.mass(rho) / (lstar * lstar)
            if up_now < best_upper:
                best_rho, best_upper, best_lstar = rho, up_now, lstar
        if E > 0.0:
            lower = max(lower, 1.0 / E)
        if lower > 0.0 and best_upper / lower - 1.0 <= cfg.gap_tol:
            status = "converged"
            break

        pairs: list[tuple[int, dict[int, float]]] = []
        for i in alive:
            pairs.extend(
                _extract_rows(
                    g, dist_f[i], pred_f[i], dist_r[i], pred_r[i],
                    cfg.batch, threshold=max(lstar, 1e-12) * 1.25,
                )
            )
        if len(rows) < stash_cap:
            for sig, r in pairs:
                if sig not in seen:
                    seen.add(sig)
                    rows.append(r)
                    if len(rows) >= stash_cap:
                        break

        # direction: route mass down each family's shortest-path tree to
        # every sink cell within the violation threshold, then take the
        # exact line search step from the current flow
        D = np.zeros(n)
        n_trees = 0
        for i in alive:
            cells = g.cell_var[g.sink_masks[i]]
            cells = cells[cells >= 0]
            dvals = dist_f[i][cells]
            pick = np.isfinite(dvals) & (dvals <= max(lstar, 1e-12) * 1.25)
            cells = cells[pick]
            if len(cells) == 0:
                continue
            mu = np.full(len(cells), 1.0 / len(cells))
            D += _tree_flow(g, dist_f[i], pred_f[i], cells, mu)
            n_trees += 1
        progress = False
        if n_trees:
            D /= n_trees
            if E == 0.0:
                F = D
                progress = True
            else:
                diff = F - D
                denom = float(np.dot(diff * diff, inv_w))
                if denom > 0.0:
                    t = float(np.dot(F * diff, inv_w)) / denom
                    t = min(1.0, max(0.0, t))
                    if t > 0.0:
                        F = F - t * diff
                        progress = True
            E = float(np.dot(F * F, inv_w))
            rho = F * inv_w
        if not progress:
            stalls += 1
            if stalls > 2:
                break
        else:
            stalls = 0

    # polish small path collections with the exact restricted program
    if status != "converged" and 0 < len(rows) <= 3500:
        A = _rows_to_csr(rows, n)
        sol = solve_restricted(A, g.mass_w)
        lower = max(lower, sol.dual_value)
        l_pol = _true_shortest(g, sol.x, dead)
        if math.isfinite(l_pol) and l_pol > 0.0:
            up_pol = g.mass(sol.x) / (l_pol * l_pol)
            if up_pol < best_upper:
                best_rho, best_upper, best_lstar = sol.x, up_pol, l_pol
        if lower > 0.0 and best_upper / lower - 1.0 <= cfg.gap_tol:
            status = "converged"

    if not math.isfinite(best_upper) or best_lstar <= 0.0:
        scale = 0.0
        upper = 0.0
    else:
        scale = 1.0 / best_lstar
        upper = best_upper
    rho_adm = best_rho * scale
    lower = min(lower, upper) if upper > 0.0 else lower
    cert = DensityCertificate(
        rho_cells=g.rho_grid(rho_adm),
        vertex_weights=g.vertex_weights(rho_adm),
        h=grid.h,
    )
    return ModulusResult(
        value=upper,
        lower_bound=lower,
        upper_bound=upper,
        density=cert,
        iterations=rounds,
        shortest_final=1.0 if scale > 0.0 else math.inf,
        status=status,
        n_constraints=len(rows),
    )


def modulus(
    grid: QuotientGrid,
    family: CurveFamilySpec,
    config: Optional[SolverConfig] = None,
) -> ModulusResult:
    return modulus_union(grid, [family], config)


def _rho_vector(graph: PathGraph, density: DensityCertificate) -> np.ndarray:
    rho = np.zeros(graph.n_vars)
    rho[: graph.n_cells] = density.rho_cells[graph.cell_iy, graph.cell_ix]
    for j, k in enumerate(graph.vertex_ids):
        rho[graph.n_cells + j] = density.vertex_weights.get(k, 0.0)
    return rho


def _node_steps(graph: PathGraph, nodes: Sequence[int]) -> list[PathStep]:
    steps: list[PathStep] = []
    C = graph.n_cells
    for u in nodes:
        if u < C:
            steps.append(("cell", int(graph.cell_ix[u]), int(graph.cell_iy[u])))
        elif u < C + 2 * graph.n_vertices:
            j, io = divmod(u - C, 2)
            if io == 0:
                steps.append(("vertex", int(graph.vertex_ids[j])))
        # super nodes are dropped
    return steps


def shortest_path(
    grid: QuotientGrid,
    density: DensityCertificate,
    family: CurveFamilySpec,
    stencil: int = 16,
) -> tuple[float, list[PathStep]]:
    """Density-shortest connecting path and its transboundary length."""
    g = build_graph(grid, [family], stencil)
    rho = _rho_vector(g, density)
    dist_f, pred_f, _, _ = _shortest_all(g, rho, predecessors=True)
    T = g.super_sinks[0]
    if not math.isfinite(dist_f[0, T]):
        return math.inf, []
    nodes = _walk_back(pred_f[0], T)
    return float(dist_f[0, T]), _node_steps(g, nodes)


@dataclass
class VerifyReport:
    ok: bool
    shortest_length: float
    min_sampled: float
    n_paths_checked: int


def verify_admissible(
    grid: QuotientGrid,
    density: DensityCertificate,
    family: CurveFamilySpec,
    n_random_paths: int = 200,
    tol: float = 1e-9,
    stencil: int = 16,
    seed: int = 0,
) -> VerifyReport:
    """Independent admissibility check of a density certificate.

    Confirms the density-shortest connecting path has length >= 1 - tol,
    then probes random connecting routes (shortest paths forced through
    random waypoints, and noisy greedy walks) and reports the minimum
    length seen over all of them.
    """
    g = build_graph(grid, [family], stencil)
    rho = _rho_vector(g, density)
    S, T = g.super_sources[0], g.super_sinks[0]
    Gf = g.csr(rho)
    dist_s = _dijkstra(Gf, directed=True, indices=S)
    Gr = g.csr_reverse(rho)
    dist_t = _dijkstra(Gr, directed=True, indices=T)
    shortest = float(dist_s[T])
    if not math.isfinite(shortest):
        return VerifyReport(ok=True, shortest_length=math.inf,
                            min_sampled=math.inf, n_paths_checked=0)

    rng = np.random.default_rng(seed)
    reachable = np.nonzero(
        np.isfinite(dist_s[: g.n_cells]) & np.isfinite(dist_t[: g.n_cells])
    )[0]
    n_way = min(n_random_paths // 2, len(reachable))
    checked = 0
    min_len = math.inf
    if n_way > 0:
        mids = rng.choice(reachable, size=n_way, replace=False)
        through = dist_s[mids] + dist_t[mids]
        min_len = float(through.min())
        checked += n_way

    # noisy greedy walks from random source cells
    src_cells = g.cell_var[g.source_masks[0]]
    n_walk = n_random_paths - checked
    indptr, indices = g.indptr, g.indices
    arc_cost = Gf.data
    h = grid.h
    for _ in range(n_walk):
        u = int(rng.choice(src_cells))
        total = (h / 2) * rho[u]
        steps = 0
        cap = 8 * (grid.nx + grid.ny)
        while steps < cap:
            lo, hi = indptr[u], indptr[u + 1]
            nbrs = indices[lo:hi]
            if len(nbrs) == 0:
                total = math.inf
                break
            if T in nbrs:
                k = int(np.searchsorted(nbrs, T))
                total += float(arc_cost[lo + k])
                break
            if rng.random() < 0.65:
                k = int(np.argmin(arc_cost[lo:hi] + dist_t[nbrs]))
            else:
                k = int(rng.integers(len(nbrs)))
                if not math.isfinite(dist_t[nbrs[k]]):
                    k = int(np.argmin(arc_cost[lo:hi] + dist_t[nbrs]))
            total += float(arc_cost[lo + k])
            u = int(nbrs[k])
            steps += 1
        else:
            total = math.inf
        if math.isfinite(total):
            min_len = min(min_len, total)
            checked += 1

    ok = shortest >= 1.0 - tol and (min_len >= shortest - 1e-12 or min_len >= 1.0 - tol)
    return VerifyReport(
        ok=bool(ok), shortest_length=shortest,
        min_sampled=float(min_len), n_paths_checked=checked,
    )


_AXIS = {(1, 0), (-1, 0), (0, 1), (0, -1)}
_DIAG = {(1, 1), (-1, -1), (1, -1), (-1, 1)}
_KNIGHT = {
    (2, 1): ((1, 0), (1, 1)), (1, 2): ((0, 1), (1, 1)),
    (2, -1): ((1, 0), (1, -1)), (1, -2): ((0, -1), (1, -1)),
    (-2, -1): ((-1, 0), (-1, -1)), (-1, -2): ((0, -1), (-1, -1)),
    (-2, 1): ((-1, 0), (-1, 1)), (-1, 2): ((0, 1), (-1, 1)),
}


def transboundary_length(
    grid: QuotientGrid,
    density: DensityCertificate,
    path: Sequence[PathStep],
) -> float:
    """Transboundary length of a polyline path given as cell and vertex
    steps.  Endpoint cells are charged a half cell at each end, interior
    moves charge every crossed cell by the segment length inside it, and
    each vertex step charges its weight once."""
    if len(path) < 1 or path[0][0] != "cell" or path[-1][0] != "cell":
        raise PreconditionViolated("path must start and end at cells")
    h = grid.h
    rc = density.rho_cells

    def rho_at(ix: int, iy: int) -> float:
        return float(rc[iy, ix])

    total = (h / 2) * rho_at(path[0][1], path[0][2])
    total += (h / 2) * rho_at(path[-1][1], path[-1][2])
    for prev, cur in zip(path[:-1], path[1:]):
        if cur[0] == "vertex":
            if prev[0] != "cell":
                raise PreconditionViolated("vertex steps must be between cells")
            total += (h / 2) * rho_at(prev[1], prev[2])
            total += density.vertex_weights.get(cur[1], 0.0)
        elif prev[0] == "vertex":
            total += (h / 2) * rho_at(cur[1], cur[2])
        else:
            dx, dy = cur[1] - prev[1], cur[2] - prev[2]
            ra, rb = rho_at(prev[1], prev[2]), rho_at(cur[1], cur[2])
            if (dx, dy) in _AXIS:
                total += (h / 2) * (ra + rb)
            elif (dx, dy) in _DIAG:
                total += (math.sqrt(2.0) * h / 2) * (ra + rb)
            elif (dx, dy) in _KNIGHT:
                (c1x, c1y), (c2x, c2y) = _KNIGHT[(dx, dy)]
                total += (math.sqrt(5.0) * h / 4) * (
                    ra + rb
                    + rho_at(prev[1] + c1x, prev[2] + c1y)
                    + rho_at(prev[1] + c2x, prev[2] + c2y)
                )
            else:
                raise PreconditionViolated(f"non-stencil move {(dx, dy)}")
    return total
