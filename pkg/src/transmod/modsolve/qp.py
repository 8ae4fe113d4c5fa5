"""Restricted quadratic program behind the modulus solver.

Given path constraint rows A (nonnegative charge weights over density
variables) the restricted problem is

    minimize   sum_v w_v x_v^2
    subject to A x >= 1,  x >= 0.

Substituting u = W^(1/2) x turns it into a least distance problem
min |u| s.t. G u >= 1 with G = A W^(-1/2), which reduces to one
nonnegative least squares solve (Lawson-Hanson): with Q = G G' + 1 1'
and b = 1, solve min_q |E q - f|, q >= 0, whose optimum satisfies
lam = 2 q / (1 - sum q) and x = W^(-1) A' lam / 2.  Everything is
driven off the m x m Gram matrix, so the cost scales with the number of
path rows rather than with the grid.  The active-set iteration is
finite and lands on the exact optimum up to roundoff; the dual value
g(lam) = sum lam - (1/4) lam' A W^(-1) A' lam of the returned feasible
lam is a valid lower bound for the restricted problem regardless.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.sparse import csr_matrix


@dataclass
class QPSolution:
    x: np.ndarray            # primal point in full variable space
    lam: np.ndarray          # dual multipliers, one per row
    dual_value: float        # g(lam): lower bound for the restricted QP
    min_activity: float      # min over rows of (A x)
    iterations: int
    support: np.ndarray      # active multiplier mask, for warm starts


def _solve_spd(Q: np.ndarray, idx: np.ndarray, b: np.ndarray) -> np.ndarray:
    sub = Q[np.ix_(idx, idx)]
    n = len(idx)
    ridge = 1e-13 * (np.trace(sub) / max(n, 1) + 1.0)
    reg = sub + ridge * np.eye(n)
    try:
        return cho_solve(cho_factor(reg, lower=True), b[idx])
    except LinAlgError:
        sol, *_ = np.linalg.lstsq(sub, b[idx], rcond=None)
        return sol


def _nnls_gram(
    Q: np.ndarray,
    b: np.ndarray,
    warm: np.ndarray | None = None,
    tol: float = 1e-11,
    max_iter: int | None = None,
) -> tuple[np.ndarray, int]:
    """Lawson-Hanson NNLS driven by the Gram matrix Q = E'E, b = E'f."""
    m = len(b)
    if max_iter is None:
        max_iter = 3 * m + 120
    P = np.zeros(m, dtype=bool)
    q = np.zeros(m)

    def restore_feasible() -> None:
        # inner loop: pull the trial solution back onto q >= 0
        while True:
            idx = np.nonzero(P)[0]
            if len(idx) == 0:
                return
            s = _solve_spd(Q, idx, b)
            if s.min() > 0.0:
                q[:] = 0.0
                q[idx] = s
                return
            qi = q[idx]
            neg = s <= 0.0
            denom = qi[neg] - s[neg]
            safe = denom > 1e-300
            if not safe.any():
                P[idx[neg]] = False
                continue
            alpha = float(np.min(qi[neg][safe] / denom[safe]))
            q[idx] = qi + alpha * (s - qi)
            drop = idx[q[idx] <= tol * (1.0 + qi.max(initial=0.0))]
            q[drop] = 0.0
            P[drop] = False

    if warm is not None and warm.any():
        P[:] = warm
        restore_feasible()

    it = 0
    for it in range(1, max_iter + 1):
        w = b - Q @ q
        w[P] = -np.inf
        j = int(np.argmax(w))
        if w[j] <= tol:
            break
        P[j] = True
        restore_feasible()
    return q, it


def solve_restricted(
    A_full: csr_matrix,
    w: np.ndarray,
    warm_support: np.ndarray | None = None,
    gram: np.ndarray | None = None,
) -> QPSolution:
    """Solve the restricted QP exactly.

    gram, when given, must be the matrix A W^(-1) A' for the same rows;
    callers that grow the row set incrementally can maintain it cheaply
    and avoid the repeated sparse product.
    """
    m, n_full = A_full.shape
    if m == 0:
        return QPSolution(
            x=np.zeros(n_full), lam=np.zeros(0), dual_value=0.0,
            min_activity=np.inf, iterations=0, support=np.zeros(0, bool),
        )
    active = np.unique(A_full.indices)
    A = A_full[:, active].tocsr()
    inv_w = 1.0 / w[active]
    if gram is None:
        gram = (A.multiply(inv_w) @ A.T).toarray()
    Q = gram + 1.0
    b = np.ones(m)
    q, iters = _nnls_gram(Q, b, warm=warm_support)
    denom = 1.0 - float(q.sum())
    if denom <= 1e-300:
        # cannot happen for feasible least distance data; fail loudly
        raise FloatingPointError("degenerate least distance reduction")
    lam = (2.0 / denom) * q
    s = A.T @ lam
    xp = 0.5 * inv_w * s
    x_full = np.zeros(n_full)
    x_full[active] = xp
    act = A @ xp
    dual = float(lam.sum()) - 0.25 * float(np.dot(s * s, inv_w))
    return QPSolution(
        x=x_full,
        lam=lam,
        dual_value=dual,
        min_activity=float(act.min()),
        iterations=iters,
        support=q > 0.0,
    )
