"""Acceptable selections of attainable-position sets.

The central question "does some admissible transfer make every agent
acceptable" is answered on three routes:

* closed forms where a theorem gives them (no transfers; free transfers
  with identical coherent or convex components);
* an exact linear-programming feasibility solve for polyhedral families
  with expected-shortfall / negated-expectation components, using the
  shortfall reformulation ES(x) <= b  iff  exists t with
  t + E[(-x - t)^+] / alpha <= b;
* a candidate heuristic for everything else (quantile or entropic
  measures on constrained families, non-convex fee sets). A negative
  answer from the heuristic only means "no witness found" and is
  flagged as inconclusive.

Every returned witness is audited: per-scenario membership of the
implied transfer and componentwise risk bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lp
from .risk import ACCEPT_TOL, RiskMeasureSpec, VectorRiskSpec, evaluate_values
from .scenario import RandomVector
from .transfers import TransferFamily, contains, frontier

_LP_KINDS = ("es", "negexp")


@dataclass(frozen=True, eq=False)
class Selection:
    """A per-scenario attainable position with its membership audit."""

    values: np.ndarray
    certificate: np.ndarray  # per-scenario membership flags

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        c = np.array(self.certificate, dtype=bool, copy=True)
        c.setflags(write=False)
        object.__setattr__(self, "certificate", c)

    @property
    def certified(self) -> bool:
        return bool(self.certificate.all())


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    conclusive: bool
    witness: Selection | None
    method: str


def audit_flags(C: RandomVector, family: TransferFamily, values: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Per-scenario admissibility of the transfers implied by a selection."""
    return np.array(
        [contains(family, C.values[w], values[w] - C.values[w], tol) for w in range(C.n)]
    )


def make_selection(C: RandomVector, family: TransferFamily, values: np.ndarray, tol: float = 1e-7) -> Selection:
    return Selection(values, audit_flags(C, family, values, tol))


def selection_risks(spec: VectorRiskSpec, values: np.ndarray, probabilities: np.ndarray) -> np.ndarray:
    return np.array(
        [
            evaluate_values(spec.components[i], values[:, i], probabilities)
            for i in range(values.shape[1])
        ]
    )


# ---------------------------------------------------------------------------
# canonical selections
# ---------------------------------------------------------------------------


def proportional_selection(C: RandomVector, family: TransferFamily) -> Selection:
    """Equal split of the consolidated sum, admissible under free transfers."""
    if family.kind != "unconstrained":
        raise ValueError("the proportional selection needs the unconstrained family")
    D = C.values.sum(axis=1)
    values = np.tile((D / C.d)[:, None], (1, C.d))
    return make_selection(C, family, values)


def diagonal_selection_values(family: TransferFamily, C_values: np.ndarray, x=(0.0, 0.0)) -> np.ndarray:
    """Nearest-to-diagonal point of the Pareto frontier of X(C + x), per scenario.

    Vectorised for the floor-type families; fee and fungibility families
    walk their frontier polylines scenario by scenario.
    """
    C = np.asarray(C_values, dtype=float)
    if C.shape[1] != 2:
        raise ValueError("the diagonal selection is defined for two agents")
    x = np.asarray(x, dtype=float)
    c1 = C[:, 0] + x[0]
    c2 = C[:, 1] + x[1]
    kind = family.kind
    if kind == "granular":
        return np.column_stack([c1, c2])
    if kind == "unconstrained":
        mid = 0.5 * (c1 + c2)
        return np.column_stack([mid, mid])
    if kind == "ntb":
        flr = np.maximum(family.effective_capital(np.column_stack([c1, c2])), 0.0)
        t = np.clip(0.5 * (c2 - c1), -flr[:, 0], flr[:, 1])
        return np.column_stack([c1 + t, c2 - t])
    if kind == "ptc":
        pi = family.pi
        if pi == 0.0:
            return np.column_stack([c1, c2])
        eq_hi = (c1 + pi * c2) / (1.0 + pi)  # agent 2 donates
        eq_lo = (pi * c1 + c2) / (1.0 + pi)  # agent 1 donates
        xi1 = np.where(c2 >= c1, eq_hi, eq_lo)
        return np.column_stack([xi1, xi1])
    out = np.empty((C.shape[0], 2))
    for w in range(C.shape[0]):
        pts = frontier(family, (c1[w], c2[w]), resolution=512).points
        gap = pts[:, 0] - pts[:, 1]
        if gap[0] >= 0.0:
            out[w] = pts[0]
        elif gap[-1] <= 0.0:
            out[w] = pts[-1]
        else:
            out[w, 0] = np.interp(0.0, gap, pts[:, 0])
            out[w, 1] = np.interp(0.0, gap, pts[:, 1])
    return out


def nearest_diagonal_selection(C: RandomVector, family: TransferFamily, x=(0.0, 0.0)) -> Selection:
    if C.d != 2:
        raise ValueError("the diagonal selection is defined for two agents")
    shifted = RandomVector(C.space, C.values + np.asarray(x, dtype=float))
    values = diagonal_selection_values(family, C.values, x)
    return make_selection(shifted, family, values)


# ---------------------------------------------------------------------------
# feasibility
# ---------------------------------------------------------------------------


def _closed_form_unconstrained(C, spec, bounds):
    p = C.space.probabilities
    D = C.values.sum(axis=1)
    comp = spec.components[0]
    total_bound = float(np.sum(bounds))
    d = C.d

    def witness_proportional():
        xi = (D + total_bound)[:, None] / d - np.asarray(bounds)[None, :]
        fam = TransferFamily.unconstrained()
        return make_selection(C, fam, xi)

    if comp.is_coherent:
        ok = evaluate_values(comp, D, p) <= total_bound + ACCEPT_TOL
        return FeasibilityResult(ok, True, witness_proportional() if ok else None, "closed-form-coherent")
    if comp.kind == "entropic":
        ok = evaluate_values(comp, (D + total_bound) / d, p) <= ACCEPT_TOL
        return FeasibilityResult(ok, True, witness_proportional() if ok else None, "closed-form-convex")
    # quantile measure: sufficient one-sided check only
    if evaluate_values(comp, D, p) <= total_bound + ACCEPT_TOL:
        xi = np.tile(-np.asarray(bounds, dtype=float)[None, :], (C.n, 1))
        xi[:, 0] = D + np.sum(bounds[1:])
        fam = TransferFamily.unconstrained()
        return FeasibilityResult(True, True, make_selection(C, fam, xi), "corner-candidate")
    return FeasibilityResult(False, False, None, "heuristic-var")


def _lp_diag_builder(C, family, spec, bounds):
    """Feasibility LP on the d = 2 budget-line parametrisation."""
    n = C.n
    p = C.space.probabilities
    c1 = C.values[:, 0]
    c2 = C.values[:, 1]
    if family.kind == "ntb":
        flr = np.maximum(family.effective_capital(C.values), 0.0)
        lo = -flr[:, 0]
        rng = flr[:, 0] + flr[:, 1]
        nvar_t = n
    else:  # unconstrained: free transfer, split into two non-negative parts
        lo = np.zeros(n)
        rng = None
        nvar_t = 2 * n

    es_agents = [i for i in range(2) if spec.components[i].kind == "es"]
    cols = nvar_t + n * len(es_agents) + 2 * len(es_agents)
    s_at = {a: nvar_t + k * n for k, a in enumerate(es_agents)}
    t_at = {a: nvar_t + n * len(es_agents) + 2 * k for k, a in enumerate(es_agents)}

    rows = []
    rhs = []

    def t_coeff(w, sign):
        """Column/value pairs of the transfer t_w entering xi with the sign."""
        if family.kind == "ntb":
            return [(w, sign)]
        return [(w, sign), (n + w, -sign)]

    if rng is not None:
        for w in range(n):
            row = np.zeros(cols)
            row[w] = 1.0
            rows.append(row)
            rhs.append(rng[w])

    base1 = c1 + lo
    base2 = c2 - lo
    for a in es_agents:
        sign = 1.0 if a == 0 else -1.0
        base = base1 if a == 0 else base2
        for w in range(n):
            row = np.zeros(cols)
            for col, val in t_coeff(w, sign):
                row[col] = -val
            row[s_at[a] + w] = -1.0
            row[t_at[a]] = -1.0
            row[t_at[a] + 1] = 1.0
            rows.append(row)
            rhs.append(base[w])
        total = np.zeros(cols)
        total[s_at[a] : s_at[a] + n] = p / spec.components[a].alpha
        total[t_at[a]] = 1.0
        total[t_at[a] + 1] = -1.0
        rows.append(total)
        rhs.append(float(bounds[a]))
    for a in range(2):
        if spec.components[a].kind != "negexp":
            continue
        sign = 1.0 if a == 0 else -1.0
        base = base1 if a == 0 else base2
        row = np.zeros(cols)
        for w in range(n):
            for col, val in t_coeff(w, sign):
                row[col] = -val * p[w]
        rows.append(row)
        rhs.append(float(bounds[a] + p @ base))

    res = lp.solve(np.zeros(cols), A_ub=np.array(rows), b_ub=np.array(rhs))
    if res.status != "optimal":
        return None
    t = res.x[:n] if family.kind == "ntb" else res.x[:n] - res.x[n : 2 * n]
    xi = np.column_stack([base1 + t, base2 - t])
    return xi


def _lp_general_builder(C, family, spec, bounds):
    """Feasibility LP in raw per-scenario transfer variables, any d."""
    n, d = C.n, C.d
    p = C.space.probabilities
    es_agents = [i for i in range(d) if spec.components[i].kind == "es"]
    ny = 2 * n * d
    cols = ny + n * len(es_agents) + 2 * len(es_agents)
    s_at = {a: ny + k * n for k, a in enumerate(es_agents)}
    t_at = {a: ny + n * len(es_agents) + 2 * k for k, a in enumerate(es_agents)}

    def ycol(w, i):
        return w * d + i  # positive part; negative part offset by n*d

    rows = []
    rhs = []
    kind = family.kind
    if kind in ("unconstrained", "ntb"):
        for w in range(n):
            row = np.zeros(cols)
            for i in range(d):
                row[ycol(w, i)] = 1.0
                row[n * d + ycol(w, i)] = -1.0
            rows.append(row)
            rhs.append(0.0)
    if kind == "ntb":
        flr = np.maximum(family.effective_capital(C.values), 0.0)
        for w in range(n):
            for i in range(d):
                row = np.zeros(cols)
                row[ycol(w, i)] = -1.0
                row[n * d + ycol(w, i)] = 1.0
                rows.append(row)
                rhs.append(flr[w, i])
    if kind == "granular":
        for w in range(n):
            for i in range(d):
                row = np.zeros(cols)
                row[ycol(w, i)] = 1.0
                row[n * d + ycol(w, i)] = -1.0
                rows.append(row)
                rhs.append(0.0)
    if kind == "ptc":
        pi = family.pi
        for w in range(n):
            for coeffs in ((1.0, pi), (pi, 1.0)):
                row = np.zeros(cols)
                for i in range(2):
                    row[ycol(w, i)] = coeffs[i]
                    row[n * d + ycol(w, i)] = -coeffs[i]
                rows.append(row)
                rhs.append(0.0)

    for a in es_agents:
        for w in range(n):
            row = np.zeros(cols)
            row[ycol(w, a)] = -1.0
            row[n * d + ycol(w, a)] = 1.0
            row[s_at[a] + w] = -1.0
            row[t_at[a]] = -1.0
            row[t_at[a] + 1] = 1.0
            rows.append(row)
            rhs.append(float(C.values[w, a]))
        total = np.zeros(cols)
        total[s_at[a] : s_at[a] + n] = p / spec.components[a].alpha
        total[t_at[a]] = 1.0
        total[t_at[a] + 1] = -1.0
        rows.append(total)
        rhs.append(float(bounds[a]))
    for a in range(d):
        if spec.components[a].kind != "negexp":
            continue
        row = np.zeros(cols)
        for w in range(n):
            row[ycol(w, a)] = -p[w]
            row[n * d + ycol(w, a)] = p[w]
        rows.append(row)
        rhs.append(float(bounds[a] + p @ C.values[:, a]))

    res = lp.solve(np.zeros(cols), A_ub=np.array(rows), b_ub=np.array(rhs))
    if res.status != "optimal":
        return None
    y = (res.x[: n * d] - res.x[n * d : 2 * n * d]).reshape(n, d)
    return C.values + y


def _heuristic_candidates(C, family, spec, bounds):
    yield C.values, "nil-transfer"
    if C.d == 2:
        try:
            yield diagonal_selection_values(family, C.values), "nearest-diagonal"
        except ValueError:
            pass
        if C.n <= 512 and family.kind in ("ftc", "ode", "ptc"):
            for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
                pts = np.empty((C.n, 2))
                for w in range(C.n):
                    curve = frontier(family, C.values[w], resolution=128).points
                    idx = int(round(lam * (curve.shape[0] - 1)))
                    pts[w] = curve[idx]
                yield pts, f"frontier-mix-{lam}"
    if family.kind == "unconstrained":
        D = C.values.sum(axis=1)
        xi = np.tile((D / C.d)[:, None], (1, C.d))
        yield xi, "proportional"


def acceptable_exists(
    C: RandomVector,
    family: TransferFamily,
    spec: VectorRiskSpec,
    bounds=None,
) -> FeasibilityResult:
    """Does X(C) admit a selection with componentwise risks <= bounds?

    ``bounds`` defaults to zero (plain acceptability). Exact on the
    closed-form and linear-programming routes; the heuristic route is
    conclusive only when it finds a witness.
    """
    if spec.d != C.d:
        raise ValueError(f"{spec.d} measure components for {C.d} agents")
    family.check_dimension(C.d)
    bounds = np.zeros(C.d) if bounds is None else np.asarray(bounds, dtype=float)
    if bounds.shape != (C.d,):
        raise ValueError("risk bounds must have one entry per agent")
    p = C.space.probabilities

    if family.kind == "granular":
        risks = selection_risks(spec, C.values, p)
        ok = bool(np.all(risks <= bounds + ACCEPT_TOL))
        witness = make_selection(C, family, C.values) if ok else None
        return FeasibilityResult(ok, True, witness, "closed-form-granular")

    if family.kind == "unconstrained" and spec.is_identical:
        return _closed_form_unconstrained(C, spec, bounds)

    if family.is_polyhedral and all(c.kind in _LP_KINDS for c in spec.components):
        if C.d == 2 and family.kind in ("ntb", "unconstrained"):
            xi = _lp_diag_builder(C, family, spec, bounds)
        else:
            xi = _lp_general_builder(C, family, spec, bounds)
        if xi is None:
            return FeasibilityResult(False, True, None, "lp")
        return FeasibilityResult(True, True, make_selection(C, family, xi), "lp")

    for values, name in _heuristic_candidates(C, family, spec, bounds):
        risks = selection_risks(spec, values, p)
        if np.all(risks <= bounds + ACCEPT_TOL):
            sel = make_selection(C, family, values)
            if sel.certified:
                return FeasibilityResult(True, True, sel, f"heuristic:{name}")
    return FeasibilityResult(False, False, None, "heuristic-exhausted")


def selection_risk_membership(C: RandomVector, family: TransferFamily, spec: VectorRiskSpec, a) -> bool:
    """Is the deterministic vector a in the selection risk set of X(C)?

    Equivalently: does X(C) + a admit an acceptable selection; by cash
    invariance that relaxes every component bound by a.
    """
    return acceptable_exists(C, family, spec, bounds=np.asarray(a, dtype=float)).feasible


def absolute_acceptability(C: RandomVector, family: TransferFamily, spec: VectorRiskSpec) -> FeasibilityResult:
    """Acceptability without worsening any agent's stand-alone risk."""
    base = selection_risks(spec, C.values, C.space.probabilities)
    return acceptable_exists(C, family, spec, bounds=np.minimum(base, 0.0))


def prices_for_selection(C: RandomVector, spec: VectorRiskSpec, selection: Selection) -> np.ndarray:
    """Zero-sum time-zero payments making an optimal selection individually rational.

    Given a selection whose total risk attains the group optimum, pick a
    point of (r(C) + R_-^d) on the optimal-total plane and pay the
    difference: the shifted selection then has componentwise risk no
    worse than C and the payments net to zero exactly.
    """
    p = C.space.probabilities
    risks_xi = selection_risks(spec, selection.values, p)
    risks_c = selection_risks(spec, C.values, p)
    slack = max(float(risks_c.sum() - risks_xi.sum()), 0.0)
    anchor = risks_c - slack / C.d
    prices = risks_xi - anchor
    prices[-1] = -float(prices[:-1].sum())
    return prices
