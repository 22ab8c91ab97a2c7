"""Finite scenario spaces and random capital vectors.

Everything downstream works per scenario on a finite probability space:
n scenarios with strictly positive weights. Capital positions are plain
numpy arrays wrapped together with their space so that dimension and
weight checks happen once, at construction. All objects are immutable
after construction and safe to share between workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# A weight total off by more than this is rejected instead of being
# silently renormalised; silent renormalisation hides data bugs.
WEIGHT_SUM_TOL = 1e-9


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScenarioSpace:
    """A finite probability space given by scenario weights."""

    probabilities: np.ndarray

    def __post_init__(self):
        p = _frozen_array(self.probabilities)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probabilities must form a non-empty 1-d array")
        if not np.all(np.isfinite(p)):
            raise ValueError("scenario weights must all be finite")
        if np.any(p <= 0.0):
            raise ValueError("every scenario weight must be strictly positive")
        total = float(p.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(
                f"scenario weights sum to {total!r}; deviation from 1 exceeds "
                f"{WEIGHT_SUM_TOL}"
            )
        object.__setattr__(self, "probabilities", p)

    @property
    def n(self) -> int:
        return int(self.probabilities.size)

    @classmethod
    def equiprobable(cls, n: int) -> "ScenarioSpace":
        if n < 1:
            raise ValueError("need at least one scenario")
        return cls(np.full(n, 1.0 / n))


@dataclass(frozen=True, eq=False)
class RandomVariable:
    """A scalar payoff per scenario (currency units)."""

    space: ScenarioSpace
    values: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.values)
        if v.ndim != 1:
            raise ValueError("values must be a 1-d array")
        if v.size != self.space.n:
            raise ValueError(
                f"got {v.size} values for a space of {self.space.n} scenarios"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("values must all be finite")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True, eq=False)
class RandomVector:
    """Per-scenario capital vector: n scenarios by d agents."""

    space: ScenarioSpace
    values: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.values)
        if v.ndim != 2:
            raise ValueError("values must be a 2-d (n x d) array")
        if v.shape[0] != self.space.n:
            raise ValueError(
                f"got {v.shape[0]} rows for a space of {self.space.n} scenarios"
            )
        if v.shape[1] < 1:
            raise ValueError("need at least one agent column")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must all be finite")
        object.__setattr__(self, "values", v)

    @property
    def d(self) -> int:
        return int(self.values.shape[1])

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def column(self, i: int) -> RandomVariable:
        return RandomVariable(self.space, self.values[:, i])


def aggregate(C: RandomVector) -> RandomVariable:
    """Per-scenario sum of all agents' capitals."""
    return RandomVariable(C.space, C.values.sum(axis=1))


def shift(C: RandomVector, x) -> RandomVector:
    """Add the deterministic vector x to C in every scenario."""
    x = np.asarray(x, dtype=float)
    if x.shape != (C.d,):
        raise ValueError(f"shift vector has shape {x.shape}, expected ({C.d},)")
    if not np.all(np.isfinite(x)):
        raise ValueError("shift vector must be finite")
    return RandomVector(C.space, C.values + x)
