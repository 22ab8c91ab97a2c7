"""Univariate monetary risk measures on discrete distributions.

Four kinds are supported, each evaluated exactly on a finite scenario
set:

* ``var``      -- quantile risk: minus the smallest support value whose
                  cumulative probability reaches the level (weak
                  inequality, resolved by a sort-scan, no interpolation);
* ``es``       -- expected shortfall: the tail average over the lowest
                  ``alpha`` probability mass, with the atom crossing the
                  level split exactly so the measure is coherent on
                  discrete spaces;
* ``entropic`` -- (1/theta) log E[exp(-theta X)];
* ``negexp``   -- minus the expectation.

All satisfy cash invariance and monotonicity by construction.  A vector
measure applies one univariate measure per agent column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .scenario import RandomVariable, RandomVector

KINDS = ("var", "es", "entropic", "negexp")

# Risk value below which a position counts as acceptable; feasibility
# solvers return approximate optima.
ACCEPT_TOL = 1e-9

# Slack when comparing cumulative weights with a level, so that exact
# rational levels (5 scenarios of weight 0.01 vs alpha = 0.05) are not
# flipped by binary rounding.
_CUM_EPS = 1e-12


@dataclass(frozen=True)
class RiskMeasureSpec:
    """Tagged choice of a univariate monetary risk measure."""

    kind: str
    alpha: float | None = None
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown risk measure kind {self.kind!r}")
        if self.kind in ("var", "es"):
            if self.alpha is None or not (0.0 < self.alpha < 1.0):
                raise ValueError(f"{self.kind} needs a level alpha in (0, 1)")
        if self.kind == "entropic":
            if self.theta is None or self.theta <= 0.0:
                raise ValueError("entropic needs a risk aversion theta > 0")

    @classmethod
    def var(cls, alpha: float) -> "RiskMeasureSpec":
        return cls("var", alpha=alpha)

    @classmethod
    def es(cls, alpha: float) -> "RiskMeasureSpec":
        return cls("es", alpha=alpha)

    @classmethod
    def entropic(cls, theta: float) -> "RiskMeasureSpec":
        return cls("entropic", theta=theta)

    @classmethod
    def negexp(cls) -> "RiskMeasureSpec":
        return cls("negexp")

    @property
    def is_coherent(self) -> bool:
        return self.kind in ("es", "negexp")

    @property
    def is_convex(self) -> bool:
        return self.kind in ("es", "negexp", "entropic")


@dataclass(frozen=True)
class VectorRiskSpec:
    """One univariate measure per agent."""

    components: tuple[RiskMeasureSpec, ...]

    def __post_init__(self):
        if len(self.components) < 1:
            raise ValueError("need at least one component measure")
        object.__setattr__(self, "components", tuple(self.components))

    @classmethod
    def identical(cls, spec: RiskMeasureSpec, d: int) -> "VectorRiskSpec":
        return cls((spec,) * d)

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def is_identical(self) -> bool:
        return all(c == self.components[0] for c in self.components)

    @property
    def is_coherent(self) -> bool:
        return all(c.is_coherent for c in self.components)

    @property
    def is_convex(self) -> bool:
        return all(c.is_convex for c in self.components)


def _sorted_tail(values: np.ndarray, probs: np.ndarray, alpha: float):
    order = np.argsort(values, kind="stable")
    vs = values[order]
    cum = np.cumsum(probs[order])
    k = int(np.searchsorted(cum, alpha - _CUM_EPS, side="left"))
    k = min(k, vs.size - 1)
    return vs, probs[order], cum, k


def evaluate_values(spec: RiskMeasureSpec, values, probabilities) -> float:
    """Evaluate a measure directly on value/weight arrays."""
    v = np.asarray(values, dtype=float)
    p = np.asarray(probabilities, dtype=float)
    if v.size == 0:
        raise ValueError("cannot evaluate a risk measure on an empty scenario set")
    if spec.kind == "negexp":
        return float(-(p @ v))
    if spec.kind == "entropic":
        theta = spec.theta
        return float(logsumexp(-theta * v, b=p) / theta)
    vs, ps, cum, k = _sorted_tail(v, p, spec.alpha)
    if spec.kind == "var":
        return float(-vs[k])
    # es: full atoms below the level plus the exactly split crossing atom
    w = ps[: k + 1].copy()
    w[-1] = spec.alpha - (cum[k] - ps[k])
    return float(-(w @ vs[: k + 1]) / spec.alpha)


def evaluate(spec: RiskMeasureSpec, eta: RandomVariable) -> float:
    """Risk of a random variable under the given measure."""
    return evaluate_values(spec, eta.values, eta.space.probabilities)


def evaluate_vector(spec: VectorRiskSpec, C: RandomVector) -> np.ndarray:
    """Componentwise risks of the d agent columns."""
    if spec.d != C.d:
        raise ValueError(f"{spec.d} measure components for {C.d} agents")
    p = C.space.probabilities
    return np.array(
        [evaluate_values(spec.components[i], C.values[:, i], p) for i in range(C.d)]
    )


def is_acceptable_vector(spec: VectorRiskSpec, C: RandomVector, tol: float = ACCEPT_TOL) -> bool:
    """True iff every agent's risk is at most ``tol``."""
    return bool(np.all(evaluate_vector(spec, C) <= tol))
