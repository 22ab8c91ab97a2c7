"""Dense two-phase simplex for small linear programs.

    min c.x   s.t.   A_ub x <= b_ub,   A_eq x = b_eq,   x >= 0

Written for the solver-free feasibility checks in this package: the
instances are small and dense, and exact vertex answers matter more
than raw speed. Pivoting uses Dantzig's rule and falls back to Bland's
rule after a stretch of degenerate pivots so cycling cannot occur.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PIVOT_EPS = 1e-9
FEAS_TOL = 1e-7
_STALL_LIMIT = 60
_MAX_ITERS = 50_000


@dataclass
class LpResult:
    status: str  # optimal | infeasible | unbounded
    x: np.ndarray | None
    fun: float | None


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    basis[row] = col


def _ratio_row(T: np.ndarray, col: int, m: int) -> int | None:
    colvals = T[:m, col]
    mask = colvals > _PIVOT_EPS
    if not mask.any():
        return None
    ratios = np.full(m, np.inf)
    ratios[mask] = T[:m, -1][mask] / colvals[mask]
    best = ratios.min()
    # ties: smallest row index keeps the choice deterministic
    return int(np.nonzero(ratios <= best + 1e-15)[0][0])


def _run_simplex(T: np.ndarray, basis: np.ndarray, m: int, allowed: int) -> str:
    """Drive the objective row (last row) to optimality in place.

    ``allowed`` restricts entering columns to indices < allowed (used to
    keep artificial columns out during phase 2).
    """
    stall = 0
    bland = False
    prev_obj = T[-1, -1]
    for _ in range(_MAX_ITERS):
        red = T[-1, :allowed]
        if bland:
            neg = np.nonzero(red < -_PIVOT_EPS)[0]
            if neg.size == 0:
                return "optimal"
            col = int(neg[0])
        else:
            col = int(np.argmin(red))
            if red[col] >= -_PIVOT_EPS:
                return "optimal"
        row = _ratio_row(T, col, m)
        if row is None:
            return "unbounded"
        _pivot(T, basis, row, col)
        obj = T[-1, -1]
        if abs(obj - prev_obj) <= 1e-12:
            stall += 1
            if stall > _STALL_LIMIT:
                bland = True
        else:
            stall = 0
        prev_obj = obj
    raise RuntimeError("simplex iteration limit exceeded")


def solve(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None) -> LpResult:
    """Solve min c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0."""
    c = np.asarray(c, dtype=float)
    nvar = c.size

    rows = []
    rhs = []
    kinds = []  # "ub" or "eq"
    if A_ub is not None and len(A_ub) > 0:
        A_ub = np.asarray(A_ub, dtype=float)
        b_ub = np.asarray(b_ub, dtype=float)
        for i in range(A_ub.shape[0]):
            rows.append(A_ub[i])
            rhs.append(b_ub[i])
            kinds.append("ub")
    if A_eq is not None and len(A_eq) > 0:
        A_eq = np.asarray(A_eq, dtype=float)
        b_eq = np.asarray(b_eq, dtype=float)
        for i in range(A_eq.shape[0]):
            rows.append(A_eq[i])
            rhs.append(b_eq[i])
            kinds.append("eq")

    m = len(rows)
    if m == 0:
        x = np.zeros(nvar)
        if np.all(c >= -_PIVOT_EPS):
            return LpResult("optimal", x, 0.0)
        return LpResult("unbounded", None, None)

    # Count slacks (one per ub row) and artificials (eq rows, plus ub
    # rows whose rhs needed a sign flip).
    n_slack = sum(1 for k in kinds if k == "ub")
    need_art = []
    for i in range(m):
        if kinds[i] == "eq" or rhs[i] < 0.0:
            need_art.append(i)
    n_art = len(need_art)

    ncols = nvar + n_slack + n_art + 1
    T = np.zeros((m + 1, ncols))
    basis = np.full(m, -1, dtype=int)

    slack_at = nvar
    art_at = nvar + n_slack
    for i in range(m):
        a = np.asarray(rows[i], dtype=float)
        b = float(rhs[i])
        flip = b < 0.0
        if flip:
            a = -a
            b = -b
        T[i, :nvar] = a
        T[i, -1] = b
        if kinds[i] == "ub":
            T[i, slack_at] = -1.0 if flip else 1.0
            if not flip:
                basis[i] = slack_at
            slack_at += 1
        if basis[i] < 0:
            T[i, art_at] = 1.0
            basis[i] = art_at
            art_at += 1

    n_real = nvar + n_slack

    # Phase 1: minimise the artificial total.
    if n_art > 0:
        T[-1, n_real : n_real + n_art] = 1.0
        for i in range(m):
            if basis[i] >= n_real:
                T[-1] -= T[i]
        status = _run_simplex(T, basis, m, ncols - 1)
        # objective row rhs carries minus the artificial total
        if status != "optimal" or T[-1, -1] > FEAS_TOL:
            raise RuntimeError("phase 1 failed to terminate cleanly")
        if -T[-1, -1] > FEAS_TOL:
            return LpResult("infeasible", None, None)
        # pivot surviving artificials out of the basis, dropping
        # redundant rows
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= n_real:
                pivots = np.nonzero(np.abs(T[i, :n_real]) > _PIVOT_EPS)[0]
                if pivots.size:
                    _pivot(T, basis, i, int(pivots[0]))
                else:
                    keep[i] = False
        if not keep.all():
            T = np.vstack([T[:m][keep], T[-1:]])
            basis = basis[keep]
            m = int(keep.sum())
        T[:, n_real : n_real + n_art] = 0.0

    # Phase 2 with the real objective.
    T[-1, :] = 0.0
    T[-1, :nvar] = c
    for i in range(m):
        bi = basis[i]
        if T[-1, bi] != 0.0:
            T[-1] -= T[-1, bi] * T[i]
    status = _run_simplex(T, basis, m, n_real)
    if status == "unbounded":
        return LpResult("unbounded", None, None)

    x_full = np.zeros(ncols - 1)
    x_full[basis] = T[:m, -1]
    x = np.clip(x_full[:nvar], 0.0, None)
    return LpResult("optimal", x, float(c @ x))


def feasible_point(A_ub=None, b_ub=None, A_eq=None, b_eq=None) -> LpResult:
    """Find any feasible point of the system (phase 1 only)."""
    ncols = 0
    if A_ub is not None and len(A_ub) > 0:
        ncols = np.asarray(A_ub).shape[1]
    elif A_eq is not None and len(A_eq) > 0:
        ncols = np.asarray(A_eq).shape[1]
    return solve(np.zeros(ncols), A_ub, b_ub, A_eq, b_eq)
