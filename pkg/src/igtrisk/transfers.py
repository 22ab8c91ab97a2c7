"""Admissible intragroup-transfer families and attainable-position sets.

A family maps the per-scenario capital row ``c`` to a lower closed set
``I(c)`` of admissible transfers; the attainable positions are
``X(c) = c + I(c)``. Every family keeps the nil transfer admissible and
never lets the group finance a transfer from outside (free disposal in,
aggregate budget non-positive).

Families:

* ``granular``      -- no transfers: I = R_-^d;
* ``unconstrained`` -- only the aggregate budget binds: sum y_i <= 0;
* ``ntb``           -- no transfer may cause or worsen a bankruptcy:
                       aggregate budget plus per-agent floors at the
                       positive part of capital (taken as the lower
                       closure, so free disposal stays admissible);
* ``ptc``           -- proportional transaction costs, two agents:
                       the cone y1 + pi*y2 <= 0, pi*y1 + y2 <= 0;
* ``ftc``           -- fixed transaction cost, two agents, non-convex:
                       R_-^2 union {y1 + y2 <= -fee};
* ``ode``           -- fungibility-cost frontier, two agents: the Pareto
                       boundary through c integrates
                       dx_recipient/d(donor capital) = -(donor/thresh)^p
                       while the donor sits below its threshold and has
                       slope -1 above it; no transfer once the donor is
                       drained.

A safety margin wraps any family by applying it to ``c - a`` (fixed) or
``c - lambda * max(c, 0)`` (proportional); for capital-independent
families the wrapper is a mathematical no-op.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("granular", "unconstrained", "ntb", "ptc", "ftc", "ode")

#: families whose I(c) does not depend on c
CAPITAL_FREE = ("granular", "unconstrained", "ptc", "ftc")

#: families with an exact linear inequality description per scenario
POLYHEDRAL = ("granular", "unconstrained", "ntb", "ptc")

_DEFAULT_TOL = 1e-9
_ODE_RESOLUTION = 2048


@dataclass(frozen=True)
class MarginSpec:
    """Safety margin: fixed per-agent buffers or proportional haircuts."""

    mode: str  # "fixed" | "proportional"
    amounts: tuple[float, ...]

    def __post_init__(self):
        if self.mode not in ("fixed", "proportional"):
            raise ValueError(f"unknown margin mode {self.mode!r}")
        amounts = tuple(float(a) for a in self.amounts)
        if self.mode == "fixed" and any(a < 0 for a in amounts):
            raise ValueError("fixed margins must be non-negative")
        if self.mode == "proportional" and any(not 0 <= a <= 1 for a in amounts):
            raise ValueError("proportional margins must lie in [0, 1]")
        object.__setattr__(self, "amounts", amounts)

    @classmethod
    def fixed(cls, *amounts: float) -> "MarginSpec":
        return cls("fixed", tuple(amounts))

    @classmethod
    def proportional(cls, *amounts: float) -> "MarginSpec":
        return cls("proportional", tuple(amounts))

    def effective(self, c):
        """Capital used for admissibility checks in place of c."""
        c = np.asarray(c, dtype=float)
        a = np.asarray(self.amounts, dtype=float)
        if a.size != c.shape[-1]:
            raise ValueError(
                f"margin has {a.size} components for {c.shape[-1]} agents"
            )
        if self.mode == "fixed":
            return c - a
        return c - a * np.maximum(c, 0.0)


@dataclass(frozen=True)
class TransferFamily:
    """Tagged choice of admissible-transfer map with its parameters."""

    kind: str
    pi: float | None = None
    fee: float | None = None
    thresholds: tuple[float, float] | None = None
    power: float | None = None
    margin: MarginSpec | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown transfer family {self.kind!r}")
        if self.kind == "ptc":
            if self.pi is None or not 0.0 <= self.pi <= 1.0:
                raise ValueError("proportional transaction cost needs pi in [0, 1]")
        if self.kind == "ftc":
            if self.fee is None or self.fee < 0.0:
                raise ValueError("fixed transaction cost needs fee >= 0")
        if self.kind == "ode":
            if self.thresholds is None or any(t <= 0 for t in self.thresholds):
                raise ValueError("fungibility thresholds must be positive")
            if self.power is None or self.power < 1.0:
                raise ValueError("fungibility power must be >= 1")
            object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))

    @classmethod
    def granular(cls, margin: MarginSpec | None = None) -> "TransferFamily":
        return cls("granular", margin=margin)

    @classmethod
    def unconstrained(cls, margin: MarginSpec | None = None) -> "TransferFamily":
        return cls("unconstrained", margin=margin)

    @classmethod
    def ntb(cls, margin: MarginSpec | None = None) -> "TransferFamily":
        return cls("ntb", margin=margin)

    @classmethod
    def proportional_costs(cls, pi: float) -> "TransferFamily":
        return cls("ptc", pi=pi)

    @classmethod
    def fixed_costs(cls, fee: float) -> "TransferFamily":
        return cls("ftc", fee=fee)

    @classmethod
    def fungibility_ode(
        cls,
        thresholds: tuple[float, float] = (1.0, 1.0),
        power: float = 1.0,
        margin: MarginSpec | None = None,
    ) -> "TransferFamily":
        return cls("ode", thresholds=thresholds, power=power, margin=margin)

    @property
    def is_polyhedral(self) -> bool:
        return self.kind in POLYHEDRAL

    @property
    def is_convex(self) -> bool:
        return self.kind != "ftc"

    def requires_two_agents(self) -> bool:
        return self.kind in ("ptc", "ftc", "ode")

    def check_dimension(self, d: int) -> None:
        if self.requires_two_agents() and d != 2:
            raise ValueError(f"family {self.kind!r} supports exactly two agents, got {d}")

    def effective_capital(self, c_row):
        c = np.asarray(c_row, dtype=float)
        if self.margin is None:
            return c
        return self.margin.effective(c)

    def floors(self, c_row) -> np.ndarray:
        """Per-agent transferable capital for floor-type families."""
        return np.maximum(self.effective_capital(c_row), 0.0)


@dataclass(frozen=True, eq=False)
class FrontierCurve:
    """Polyline along the Pareto boundary of X(c) for one scenario (d = 2).

    Points are ordered by increasing first coordinate. For the fixed-cost
    family the curve is the attainability envelope: the two connector
    vertices around the capital point are boundary but not Pareto
    optimal.
    """

    points: np.ndarray
    kind: str

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def envelope(self, x1):
        """Largest attainable second coordinate at the given first one.

        Returns -inf beyond the right end of the curve; left of the
        curve the best point is its upper-left endpoint.
        """
        pts = self.points
        x1 = np.asarray(x1, dtype=float)
        if pts.shape[0] == 1:
            out = np.where(x1 <= pts[0, 0], pts[0, 1], -np.inf)
            return out if out.ndim else float(out)
        out = np.interp(x1, pts[:, 0], pts[:, 1], left=pts[0, 1], right=-np.inf)
        return out if out.ndim else float(out)


def contains(family: TransferFamily, c_row, y, tol: float = _DEFAULT_TOL) -> bool:
    """Is the transfer y admissible at capital row c?"""
    c = np.asarray(c_row, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.shape != c.shape:
        raise ValueError(f"transfer shape {y.shape} does not match capital {c.shape}")
    family.check_dimension(c.size)
    kind = family.kind
    if kind == "granular":
        return bool(np.all(y <= tol))
    if kind == "unconstrained":
        return bool(y.sum() <= tol)
    if kind == "ntb":
        # lower closure of {sum y <= 0, y_i >= -floor_i}: every
        # coordinate below its floor only counts as the floor
        flr = family.floors(c)
        return bool(np.maximum(y, -flr).sum() <= tol)
    if kind == "ptc":
        pi = family.pi
        return bool(y[0] + pi * y[1] <= tol and pi * y[0] + y[1] <= tol)
    if kind == "ftc":
        return bool(np.all(y <= tol) or y.sum() <= -family.fee + tol)
    # ode: dominated by the frontier through c
    curve = frontier(family, c, resolution=_ODE_RESOLUTION)
    target = c + y
    if target[0] > curve.points[-1, 0] + tol:
        return False
    return bool(target[1] <= curve.envelope(min(target[0], curve.points[-1, 0])) + tol)


def support_function(family: TransferFamily, c_row, u) -> float:
    """sup of <u, x> over the attainable set X(c), for u >= 0.

    Returns +inf when the set is unbounded in direction u.
    """
    c = np.asarray(c_row, dtype=float)
    u = np.asarray(u, dtype=float)
    if u.shape != c.shape:
        raise ValueError(f"direction shape {u.shape} does not match capital {c.shape}")
    if np.any(u < 0.0):
        raise ValueError("support directions must be componentwise non-negative")
    family.check_dimension(c.size)
    kind = family.kind
    base = float(u @ c)
    if kind == "granular":
        return base
    scale = float(np.max(u)) if np.max(u) > 0 else 1.0
    if kind == "unconstrained":
        if np.max(u) - np.min(u) <= 1e-12 * scale:
            return base
        return np.inf
    if kind == "ntb":
        flr = family.floors(c)
        return base + float(flr @ (np.max(u) - u))
    if kind == "ptc":
        pi = family.pi
        if pi * u[0] <= u[1] + 1e-12 * scale and pi * u[1] <= u[0] + 1e-12 * scale:
            return base
        return np.inf
    if kind == "ftc":
        if np.max(u) - np.min(u) <= 1e-12 * scale:
            return base
        return np.inf
    curve = frontier(family, c, resolution=_ODE_RESOLUTION)
    return float(np.max(curve.points @ u))


def support_values(family: TransferFamily, C_values: np.ndarray, u) -> np.ndarray:
    """Per-scenario support function over an n x d capital matrix.

    Vectorised for the polyhedral families; the ode family falls back to
    a scenario loop.
    """
    C = np.asarray(C_values, dtype=float)
    u = np.asarray(u, dtype=float)
    family.check_dimension(C.shape[1])
    kind = family.kind
    base = C @ u
    if kind == "granular":
        return base
    scale = float(np.max(u)) if np.max(u) > 0 else 1.0
    if kind in ("unconstrained", "ftc"):
        if np.max(u) - np.min(u) <= 1e-12 * scale:
            return base
        return np.full(C.shape[0], np.inf)
    if kind == "ntb":
        eff = family.effective_capital(C)
        flr = np.maximum(eff, 0.0)
        return base + flr @ (np.max(u) - u)
    if kind == "ptc":
        pi = family.pi
        if pi * u[0] <= u[1] + 1e-12 * scale and pi * u[1] <= u[0] + 1e-12 * scale:
            return base
        return np.full(C.shape[0], np.inf)
    return np.array([support_function(family, C[i], u) for i in range(C.shape[0])])


def _rk4_donor_path(start: float, threshold: float, power: float, steps: int):
    """Integrate the recipient gain while donor capital falls to zero.

    The frontier slope in donor terms is d(gain)/d(w) = -(w/thresh)^p,
    which is smooth on [0, start]; parametrising by the donor capital w
    removes the blow-up the same equation has in the recipient variable.
    With a slope free of the dependent variable the classical RK4 stage
    combination collapses to Simpson increments, so the steps vectorise.
    """
    ws = np.linspace(start, 0.0, steps + 1)
    h = ws[1] - ws[0]
    inv = 1.0 / threshold
    k1 = -((ws[:-1] * inv) ** power)
    k2 = -(((ws[:-1] + 0.5 * h) * inv) ** power)
    k4 = -((ws[1:] * inv) ** power)
    increments = h * (k1 + 4.0 * k2 + k4) / 6.0
    gain = np.concatenate(([0.0], np.cumsum(increments)))
    return ws, gain


def _ode_frontier_points(family: TransferFamily, c_row: np.ndarray, resolution: int) -> np.ndarray:
    eff = family.effective_capital(c_row)
    offset = np.asarray(c_row, dtype=float) - eff
    t1, t2 = family.thresholds
    p = family.power
    e1, e2 = float(eff[0]), float(eff[1])

    pieces = [np.array([[e1, e2]])]

    # right branch: agent 2 donates while it has positive capital
    if e2 > 0.0:
        right = [np.array([[e1, e2]])]
        x1 = e1
        w0 = e2
        if e2 > t2:
            # costless regime above the threshold: slope -1
            x1 = e1 + (e2 - t2)
            right.append(np.array([[x1, t2]]))
            w0 = t2
        ws, gain = _rk4_donor_path(w0, t2, p, resolution)
        right.append(np.column_stack([x1 + gain[1:], ws[1:]]))
        pieces.append(np.vstack(right))

    # left branch: agent 1 donates
    if e1 > 0.0:
        left = [np.array([[e1, e2]])]
        x2 = e2
        w0 = e1
        if e1 > t1:
            x2 = e2 + (e1 - t1)
            left.append(np.array([[t1, x2]]))
            w0 = t1
        ws, gain = _rk4_donor_path(w0, t1, p, resolution)
        left.append(np.column_stack([ws[1:], x2 + gain[1:]]))
        pieces.append(np.vstack(left))

    pts = np.vstack(pieces)
    order = np.argsort(pts[:, 0], kind="stable")
    pts = pts[order]
    # drop duplicated joins
    keep = np.ones(pts.shape[0], dtype=bool)
    keep[1:] = np.abs(np.diff(pts[:, 0])) + np.abs(np.diff(pts[:, 1])) > 1e-14
    return pts[keep] + offset


def frontier(
    family: TransferFamily,
    c_row,
    resolution: int = 129,
    span: float | None = None,
) -> FrontierCurve:
    """Pareto boundary of X(c) as a polyline (two agents only).

    ``resolution`` controls sampling density (ode: steps per branch).
    ``span`` clips the unbounded families (unconstrained, ptc, ftc) to a
    finite window around the capital point; bounded families ignore it.
    """
    c = np.asarray(c_row, dtype=float)
    if c.size != 2:
        raise ValueError("frontier curves are only defined for two agents")
    if resolution < 1:
        raise ValueError("resolution must be positive")
    family.check_dimension(2)
    kind = family.kind
    if span is None:
        span = 2.0 * (1.0 + np.abs(c).sum() + (family.fee or 0.0))

    if kind == "granular":
        return FrontierCurve(np.array([[c[0], c[1]]]), kind)
    if kind == "ntb":
        flr = family.floors(c)
        ts = np.unique(np.concatenate([np.linspace(-flr[0], flr[1], max(resolution, 2)), [0.0]]))
        pts = np.column_stack([c[0] + ts, c[1] - ts])
        return FrontierCurve(pts, kind)
    if kind == "unconstrained":
        ts = np.unique(np.concatenate([np.linspace(-span, span, max(resolution, 2)), [0.0]]))
        return FrontierCurve(np.column_stack([c[0] + ts, c[1] - ts]), kind)
    if kind == "ptc":
        pi = family.pi
        if pi == 0.0:
            return FrontierCurve(np.array([[c[0], c[1]]]), kind)
        ss = np.linspace(0.0, span, max(resolution, 2))
        left = np.column_stack([c[0] - ss, c[1] + pi * ss])[::-1]
        right = np.column_stack([c[0] + pi * ss, c[1] - ss])
        return FrontierCurve(np.vstack([left[:-1], right]), kind)
    if kind == "ftc":
        fee = family.fee
        if fee == 0.0:
            ts = np.linspace(-span, span, max(resolution, 2))
            return FrontierCurve(np.column_stack([c[0] + ts, c[1] - ts]), kind)
        ts = np.linspace(0.0, span, max(resolution, 2))[1:]
        left = np.column_stack([c[0] - fee - ts, c[1] + ts])[::-1]
        mid = np.array([[c[0] - fee, c[1]], [c[0], c[1]], [c[0], c[1] - fee]])
        right = np.column_stack([c[0] + ts, c[1] - fee - ts])
        return FrontierCurve(np.vstack([left, mid, right]), kind)
    return FrontierCurve(_ode_frontier_points(family, c, resolution), kind)


def iteration_check(family: TransferFamily, c_row, y, z, tol: float = _DEFAULT_TOL) -> bool:
    """Does z in I(c + y) imply z + y in I(c)?

    The hypothesis y in I(c) is the caller's responsibility; the check
    is used by the property suite, not by the solvers.
    """
    c = np.asarray(c_row, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if not contains(family, c + y, z, tol):
        return True
    return contains(family, c, y + z, tol)
