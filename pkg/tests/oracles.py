"""Independent brute-force oracles used to freeze expected test values.

These deliberately avoid the library's own evaluation paths: quantiles
are scanned in exact rational arithmetic, expected shortfall comes from
the variational (shortfall-minimisation) formula, and set-valued
feasibility is decided by enumerating per-scenario frontier transfers on
a grid.
"""

from fractions import Fraction
from itertools import product

import numpy as np


def var_scan(values, probs, alpha):
    """Quantile risk by exact rational scan over the sorted support."""
    pairs = sorted(zip([float(v) for v in values], [Fraction(p).limit_denominator(10**12) for p in probs]))
    level = Fraction(alpha).limit_denominator(10**12)
    cum = Fraction(0)
    for v, p in pairs:
        cum += p
        if cum >= level:
            return -v
    return -pairs[-1][0]


def es_variational(values, probs, alpha):
    """Expected shortfall via min_t t + E[(-X - t)^+] / alpha.

    The minimum over t is attained at a loss support point, so scanning
    the support is exact.
    """
    v = np.asarray(values, dtype=float)
    p = np.asarray(probs, dtype=float)
    candidates = np.concatenate([-v, [0.0]])
    best = np.inf
    for t in candidates:
        val = t + float(p @ np.maximum(-v - t, 0.0)) / alpha
        best = min(best, val)
    return best


def ntb_feasible_grid(C, probs, alpha, step=0.01, bounds=None):
    """Brute-force two-agent NTB acceptability for identical ES components.

    Enumerates per-scenario transfers t with positions (C1 + t, C2 - t),
    t in [-max(C1,0), max(C2,0)] on a grid of the given step, and checks
    both tail averages directly.
    """
    C = np.asarray(C, dtype=float)
    p = np.asarray(probs, dtype=float)
    n = C.shape[0]
    grids = []
    for w in range(n):
        lo = -max(C[w, 0], 0.0) if bounds is None else bounds[w][0]
        hi = max(C[w, 1], 0.0) if bounds is None else bounds[w][1]
        k = max(int(np.ceil((hi - lo) / step)), 1)
        grids.append(np.unique(np.concatenate([np.linspace(lo, hi, k + 1), [0.0]])))
    for combo in product(*grids):
        t = np.asarray(combo)
        xi1 = C[:, 0] + t
        xi2 = C[:, 1] - t
        if es_variational(xi1, p, alpha) <= 1e-12 and es_variational(xi2, p, alpha) <= 1e-12:
            return True, t
    return False, None


def vertex_enumeration_lp(c, A_ub, b_ub):
    """min c.x s.t. A_ub x <= b_ub, x >= 0 by enumerating basic points.

    Only for tiny instances. Returns (status, value).
    """
    c = np.asarray(c, dtype=float)
    A = np.vstack([np.asarray(A_ub, dtype=float), -np.eye(c.size)])
    b = np.concatenate([np.asarray(b_ub, dtype=float), np.zeros(c.size)])
    m, nv = A.shape
    best = None
    from itertools import combinations

    for rows in combinations(range(m), nv):
        sub = A[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        x = np.linalg.solve(sub, b[list(rows)])
        if np.all(A @ x <= b + 1e-8):
            val = float(c @ x)
            if best is None or val < best:
                best = val
    if best is None:
        return "infeasible", None
    return "optimal", best
