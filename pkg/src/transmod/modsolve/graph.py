"""Weighted path graph over a quotient grid.

Curves are modeled as polylines through cell centers.  A move between
centers charges every cell its density times the exact length of the
segment inside that cell; passing through a contracted vertex charges
that vertex weight exactly once.  Endpoint cells are entered through
half-cell stubs from a physical super source / super sink, so a straight
run across k collinear cells pays k*h, which keeps axis-aligned
rectangles exact at every spacing.

Moves come in three rings: axis steps (1,0), diagonal steps (1,1) that
need both side cells clear, and knight-like steps (2,1) whose segment
crosses two interior cells.  The 16-move stencil keeps the worst-case
length overrun over the Euclidean metric under 2.8 percent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix

from ..domain import FREE, CurveFamilySpec, QuotientGrid, family_endpoints
from ..errors import PreconditionViolated

SQRT2 = math.sqrt(2.0)
SQRT5 = math.sqrt(5.0)

# Tiny pad keeps zero-cost arcs strictly positive for the shortest-path
# backend without perturbing any reported value.
COST_PAD = 1e-30


@dataclass
class PathGraph:
    """Directed arc graph with linear-in-density arc costs.

    Variables: one density per traversable cell (weight h^2 in the mass)
    followed by one weight per usable contracted vertex (weight 1).
    edges_vars[e] lists the at most four variables charged by edge e,
    padded with -1; edge cost is edges_w[e] * sum(rho[listed vars]).
    """

    grid: QuotientGrid
    n_cells: int
    n_vertices: int
    cell_var: np.ndarray          # (ny, nx) int32, -1 where untraversable
    cell_ix: np.ndarray           # (n_cells,) int32
    cell_iy: np.ndarray
    vertex_ids: tuple[int, ...]   # continuum index per vertex var slot
    edges_vars: np.ndarray        # (E, 4) int32, -1 padded
    edges_w: np.ndarray           # (E,) float64 per-edge charge weight
    arc_edge: np.ndarray          # (n_arcs,) int32 arc -> edge
    indptr: np.ndarray
    indices: np.ndarray
    perm: np.ndarray              # CSR slot -> arc id
    indptr_T: np.ndarray
    indices_T: np.ndarray
    perm_T: np.ndarray
    n_nodes: int
    super_sources: tuple[int, ...]
    super_sinks: tuple[int, ...]
    source_masks: tuple[np.ndarray, ...]
    sink_masks: tuple[np.ndarray, ...]
    mass_w: np.ndarray = field(init=False)  # (n_vars,) quadratic weights

    def __post_init__(self) -> None:
        h = self.grid.h
        w = np.ones(self.n_vars)
        w[: self.n_cells] = h * h
        self.mass_w = w

    @property
    def n_vars(self) -> int:
        return self.n_cells + self.n_vertices

    def arc_costs(self, rho: np.ndarray) -> np.ndarray:
        s = np.zeros(len(self.edges_w))
        for col in range(4):
            v = self.edges_vars[:, col]
            ok = v >= 0
            s[ok] += rho[v[ok]]
        return self.arc_edge, self.edges_w * s

    def csr(self, rho: np.ndarray) -> csr_matrix:
        _, ecost = self.arc_costs(rho)
        data = ecost[self.arc_edge][self.perm] + COST_PAD
        return csr_matrix(
            (data, self.indices, self.indptr),
            shape=(self.n_nodes, self.n_nodes),
        )

    def csr_reverse(self, rho: np.ndarray) -> csr_matrix:
        _, ecost = self.arc_costs(rho)
        data = ecost[self.arc_edge][self.perm_T] + COST_PAD
        return csr_matrix(
            (data, self.indices_T, self.indptr_T),
            shape=(self.n_nodes, self.n_nodes),
        )

    def arc_at(self, u: int, v: int) -> int:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        k = int(np.searchsorted(self.indices[lo:hi], v))
        if k >= hi - lo or self.indices[lo + k] != v:
            raise KeyError(f"no arc {u}->{v}")
        return int(self.perm[lo + k])

    def arc_lookup(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        """Vectorized arc ids for many (u, v) pairs at once.

        Arcs are CSR-sorted by (from, to), so the flattened key array is
        strictly increasing and binary search resolves each pair."""
        keys = getattr(self, "_arc_keys", None)
        if keys is None:
            fr = np.repeat(
                np.arange(self.n_nodes, dtype=np.int64),
                np.diff(self.indptr),
            )
            keys = fr * self.n_nodes + self.indices
            self._arc_keys = keys
        pos = np.searchsorted(keys, us.astype(np.int64) * self.n_nodes + vs)
        return self.perm[pos]

    def row_of_node_path(self, nodes: Sequence[int]) -> dict[int, float]:
        """Constraint row: variable -> accumulated charge weight."""
        row: dict[int, float] = {}
        for u, v in zip(nodes[:-1], nodes[1:]):
            e = int(self.arc_edge[self.arc_at(u, v)])
            w = float(self.edges_w[e])
            for var in self.edges_vars[e]:
                if var >= 0:
                    row[int(var)] = row.get(int(var), 0.0) + w
        return row

    def mass(self, rho: np.ndarray) -> float:
        return float(np.dot(self.mass_w, rho * rho))

    def rho_grid(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros((self.grid.ny, self.grid.nx))
        out[self.cell_iy, self.cell_ix] = rho[: self.n_cells]
        return out

    def vertex_weights(self, rho: np.ndarray) -> dict[int, float]:
        return {
            k: float(rho[self.n_cells + j])
            for j, k in enumerate(self.vertex_ids)
        }


def _edge_block(
    vars_cols: list[np.ndarray], w: float
) -> tuple[np.ndarray, np.ndarray]:
    n = len(vars_cols[0])
    ev = np.full((n, 4), -1, dtype=np.int32)
    for c, col in enumerate(vars_cols):
        ev[:, c] = col
    return ev, np.full(n, w)


def build_graph(
    grid: QuotientGrid,
    families: Sequence[CurveFamilySpec],
    stencil: int = 16,
) -> PathGraph:
    if stencil not in (4, 8, 16):
        raise PreconditionViolated(f"stencil must be 4, 8 or 16, got {stencil}")
    if not families:
        raise PreconditionViolated("need at least one curve family")
    h = grid.h

    forb = frozenset().union(*(f.forbidden for f in families))
    trav = grid.status == FREE
    restr = [f.ambient_restriction for f in families]
    if any(r is not None for r in restr):
        X, Y = grid.centers()
        for r in restr:
            if r is not None:
                lo, hi = r
                trav &= (X >= lo.x) & (X <= hi.x) & (Y >= lo.y) & (Y <= hi.y)

    cell_var = np.full(grid.status.shape, -1, dtype=np.int32)
    iy, ix = np.nonzero(trav)
    n_cells = len(ix)
    cell_var[iy, ix] = np.arange(n_cells, dtype=np.int32)

    vertex_ids = tuple(k for k in grid.contracted if k not in forb)
    if grid.outer_vertex is not None and grid.outer_vertex not in forb:
        vertex_ids = vertex_ids + (grid.outer_vertex,)
    n_vert = len(vertex_ids)

    C = n_cells
    node_in = {k: C + 2 * j for j, k in enumerate(vertex_ids)}
    node_out = {k: C + 2 * j + 1 for j, k in enumerate(vertex_ids)}
    n_named = C + 2 * n_vert
    srcs = tuple(n_named + 2 * i for i in range(len(families)))
    snks = tuple(n_named + 2 * i + 1 for i in range(len(families)))
    n_nodes = n_named + 2 * len(families)

    ev_blocks: list[np.ndarray] = []
    ew_blocks: list[np.ndarray] = []
    arc_from: list[np.ndarray] = []
    arc_to: list[np.ndarray] = []
    arc_eid: list[np.ndarray] = []
    n_edges = 0

    def add_sym(pairs_a: np.ndarray, pairs_b: np.ndarray, extra: list[np.ndarray], w: float) -> None:
        nonlocal n_edges
        if len(pairs_a) == 0:
            return
        ev, ew = _edge_block([pairs_a, pairs_b] + extra, w)
        eids = np.arange(n_edges, n_edges + len(pairs_a), dtype=np.int32)
        n_edges += len(pairs_a)
        ev_blocks.append(ev)
        ew_blocks.append(ew)
        arc_from.extend([pairs_a, pairs_b])
        arc_to.extend([pairs_b, pairs_a])
        arc_eid.extend([eids, eids])

    def add_dir(fr: np.ndarray, to: np.ndarray, vars_cols: list[np.ndarray], w: float) -> None:
        nonlocal n_edges
        if len(fr) == 0:
            return
        ev, ew = _edge_block(vars_cols, w)
        eids = np.arange(n_edges, n_edges + len(fr), dtype=np.int32)
        n_edges += len(fr)
        ev_blocks.append(ev)
        ew_blocks.append(ew)
        arc_from.append(fr)
        arc_to.append(to)
        arc_eid.append(eids)

    def cells(mask: np.ndarray) -> np.ndarray:
        return cell_var[mask]

    # ring 1: axis moves
    m = trav[:, :-1] & trav[:, 1:]
    add_sym(cells(np.pad(m, ((0, 0), (0, 1)))), cells(np.pad(m, ((0, 0), (1, 0)))), [], h / 2)
    m = trav[:-1, :] & trav[1:, :]
    add_sym(cells(np.pad(m, ((0, 1), (0, 0)))), cells(np.pad(m, ((1, 0), (0, 0)))), [], h / 2)

    if stencil >= 8:
        # ring 2: diagonals, corner point must not pinch between blocked cells
        core = trav[:-1, :-1] & trav[1:, 1:] & trav[1:, :-1] & trav[:-1, 1:]
        a = cells(np.pad(core, ((0, 1), (0, 1))))
        b = cells(np.pad(core, ((1, 0), (1, 0))))
        add_sym(a, b, [], SQRT2 * h / 2)
        a = cells(np.pad(core, ((1, 0), (0, 1))))  # (ix,iy+1) -> (ix+1,iy)
        b = cells(np.pad(core, ((0, 1), (1, 0))))
        add_sym(a, b, [], SQRT2 * h / 2)

    if stencil >= 16:
        # ring 3: (2,1)-type moves crossing two interior cells
        for dx, dy, (c1x, c1y), (c2x, c2y) in (
            (2, 1, (1, 0), (1, 1)),
            (1, 2, (0, 1), (1, 1)),
            (2, -1, (1, 0), (1, -1)),
            (1, -2, (0, -1), (1, -1)),
        ):
            ny, nx = trav.shape
            x0a, x1a = max(0, -dx), nx - max(0, dx)
            y0a, y1a = max(0, -dy), ny - max(0, dy)
            ok = np.zeros_like(trav)
            sl_a = (slice(y0a, y1a), slice(x0a, x1a))
            ok[sl_a] = (
                trav[sl_a]
                & trav[y0a + dy : y1a + dy, x0a + dx : x1a + dx]
                & trav[y0a + c1y : y1a + c1y, x0a + c1x : x1a + c1x]
                & trav[y0a + c2y : y1a + c2y, x0a + c2x : x1a + c2x]
            )
            ya, xa = np.nonzero(ok)
            a = cell_var[ya, xa]
            b = cell_var[ya + dy, xa + dx]
            c1 = cell_var[ya + c1y, xa + c1x]
            c2 = cell_var[ya + c2y, xa + c2x]
            add_sym(a, b, [c1, c2], SQRT5 * h / 4)

    # contracted vertex attachments: free cells 4-adjacent to the body
    for k in vertex_ids:
        if k == grid.outer_vertex:
            border = np.zeros_like(trav)
            border[0, :] = border[-1, :] = True
            border[:, 0] = border[:, -1] = True
            body_adjacent = border & trav
            out_mask = grid.status == -2
            if out_mask.any():
                for sh in ((0, 1), (0, -1), (1, 0), (-1, 0)):
                    body_adjacent |= np.roll(out_mask, sh, axis=(0, 1)) & trav
        else:
            body = grid.status == k
            body_adjacent = np.zeros_like(trav)
            body_adjacent[1:, :] |= body[:-1, :]
            body_adjacent[:-1, :] |= body[1:, :]
            body_adjacent[:, 1:] |= body[:, :-1]
            body_adjacent[:, :-1] |= body[:, 1:]
            body_adjacent &= trav
        att = cells(body_adjacent)
        if len(att) == 0:
            continue
        nin = np.full(len(att), node_in[k], dtype=np.int32)
        nout = np.full(len(att), node_out[k], dtype=np.int32)
        add_dir(att, nin, [att], h / 2)
        add_dir(nout, att, [att], h / 2)
        vvar = np.array([C + vertex_ids.index(k)], dtype=np.int32)
        add_dir(
            np.array([node_in[k]], dtype=np.int32),
            np.array([node_out[k]], dtype=np.int32),
            [vvar],
            1.0,
        )

    source_masks = []
    sink_masks = []
    for i, fam in enumerate(families):
        src_mask, snk_mask = family_endpoints(grid, fam)
        src_mask &= trav
        snk_mask &= trav
        sc = cells(src_mask)
        tc = cells(snk_mask)
        add_dir(np.full(len(sc), srcs[i], dtype=np.int32), sc, [sc], h / 2)
        add_dir(tc, np.full(len(tc), snks[i], dtype=np.int32), [tc], h / 2)
        source_masks.append(src_mask)
        sink_masks.append(snk_mask)

    edges_vars = np.vstack(ev_blocks) if ev_blocks else np.zeros((0, 4), np.int32)
    edges_w = np.concatenate(ew_blocks) if ew_blocks else np.zeros(0)
    fr = np.concatenate(arc_from).astype(np.int64)
    to = np.concatenate(arc_to).astype(np.int64)
    eid = np.concatenate(arc_eid)
    n_arcs = len(fr)

    order = np.lexsort((to, fr))
    fr, to, eid = fr[order], to[order], eid[order]
    counts = np.bincount(fr, minlength=n_nodes)
    indptr = np.zeros(n_nodes + 1, dtype=np.int32)
    np.cumsum(counts, out=indptr[1:])
    indices = to.astype(np.int32)
    perm = np.arange(n_arcs, dtype=np.int64)
    arc_edge = eid.astype(np.int32)

    order_T = np.lexsort((fr, to))
    counts_T = np.bincount(to, minlength=n_nodes)
    indptr_T = np.zeros(n_nodes + 1, dtype=np.int32)
    np.cumsum(counts_T, out=indptr_T[1:])
    indices_T = fr[order_T].astype(np.int32)
    perm_T = order_T

    return PathGraph(
        grid=grid,
        n_cells=n_cells,
        n_vertices=n_vert,
        cell_var=cell_var,
        cell_ix=ix.astype(np.int32),
        cell_iy=iy.astype(np.int32),
        vertex_ids=vertex_ids,
        edges_vars=edges_vars,
        edges_w=edges_w,
        arc_edge=arc_edge,
        indptr=indptr,
        indices=indices,
        perm=perm,
        indptr_T=indptr_T,
        indices_T=indices_T,
        perm_T=perm_T,
        n_nodes=n_nodes,
        super_sources=srcs,
        super_sinks=snks,
        source_masks=tuple(source_masks),
        sink_masks=tuple(sink_masks),
    )
