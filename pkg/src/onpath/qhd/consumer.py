"""Three-period quasi-hyperbolic consumer: agent 2's response and the
backward-induction equilibrium.

Agent 2 picks (x2, x3) on the remaining budget line to maximize
u(x2) + beta*delta*u(x3). Agent 1 picks x1 anticipating that response.
Along interior responses x3 = g(x2) and x1 = f(x2), which gives the reduced
objective F(x2) = u(f(x2)) + beta*delta*u(x2) + beta*delta^2*u(g(x2)).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, golden

from onpath.qhd.utility import CubicOnUnit, Utility

GRID_STEP = 1e-4
REFINE_TOL = 1e-8
TIE_TOL = 1e-12


class QhdDomainError(ValueError):
    pass


@dataclass(frozen=True)
class QhdInstance:
    utility: Utility
    beta: float
    delta: float
    p: tuple[float, float, float]
    m: float

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        if len(p) != 3 or min(p) <= 0:
            raise ValueError(f"prices must be three positive numbers, got {self.p}")
        m = float(self.m)
        if p[2] != 1.0:
            warnings.warn(f"rescaling prices and income so that p3 = 1 (was {p[2]})", stacklevel=3)
            m = m / p[2]
            p = (p[0] / p[2], p[1] / p[2], 1.0)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "m", m)
        if not 0 < self.beta <= 1:
            raise ValueError(f"beta={self.beta} outside (0, 1]")
        if not 0 < self.delta <= 1:
            raise ValueError(f"delta={self.delta} outside (0, 1]")
        if m <= 0:
            raise ValueError("income must be positive")

    @property
    def A(self) -> float:
        return 1.0 / (self.beta * self.delta * self.p[1])

    def value(self, x) -> float:
        """Agent 1's payoff u(x1) + beta*delta*u(x2) + beta*delta^2*u(x3)."""
        u, b, d = self.utility.u, self.beta, self.delta
        return u(x[0]) + b * d * u(x[1]) + b * d * d * u(x[2])

    def cost(self, x) -> float:
        return self.p[0] * x[0] + self.p[1] * x[1] + self.p[2] * x[2]

    def to_json(self) -> dict:
        return {"utility": self.utility.to_json(), "beta": self.beta, "delta": self.delta,
                "p": list(self.p), "m": self.m}


@dataclass(frozen=True)
class ResponseMap:
    """g, f and their derivatives along agent 2's interior responses."""

    inst: QhdInstance

    @property
    def A(self) -> float:
        return self.inst.A

    @property
    def analytic(self) -> bool:
        return isinstance(self.inst.utility, CubicOnUnit)

    def g(self, x2: float) -> float:
        if self.analytic:
            return math.sqrt(max(0.0, 1 - self.A * (1 - x2 * x2)))  # rounding at the lower edge
        return self.inst.utility.inv_du(self.A * self.inst.utility.du(x2))

    def dg(self, x2: float) -> float:
        if self.analytic:
            if self.A == 1.0:
                return 1.0  # g is the identity
            return self.A * x2 / self.g(x2)
        u = self.inst.utility
        return self.A * u.d2u(x2) / u.d2u(self.g(x2))

    def d2g(self, x2: float) -> float:
        A = self.A
        if self.analytic:
            if A == 1.0:
                return 0.0
            return A * (1 - A) / self.g(x2) ** 3
        u = self.inst.utility
        x3 = self.g(x2)
        return A * (u.d3u(x2) * u.d2u(x3) - u.d2u(x2) * u.d3u(x3) * self.dg(x2)) / u.d2u(x3) ** 2

    def f(self, x2: float) -> float:
        p1, p2, _ = self.inst.p
        return (self.inst.m - p2 * x2 - self.g(x2)) / p1

    def df(self, x2: float) -> float:
        p1, p2, _ = self.inst.p
        return -(p2 + self.dg(x2)) / p1

    def d2f(self, x2: float) -> float:
        return -self.d2g(x2) / self.inst.p[0]

    def ds2(self, x2: float) -> float:
        """Slope of agent 2's x2-response in x1, the reciprocal of f'."""
        return 1.0 / self.df(x2)

    def x2_domain(self) -> tuple[float, float]:
        """Interval of x2 where g is defined and f, g are nonnegative."""
        A = self.A
        u = self.inst.utility
        lo = 0.0
        if self.analytic and A > 1:
            lo = math.sqrt(1 - 1 / A)
        hi_budget = self.inst.m / self.inst.p[1]

        def slack(x2):
            return self.inst.m - self.inst.p[1] * x2 - self.g(x2)

        if slack(lo) <= 0:
            raise QhdDomainError("no interior response leaves positive first-period consumption")
        hi = hi_budget
        if slack(hi) < 0:
            hi = brentq(slack, lo, hi, xtol=1e-15)
        return lo, hi

    def objective(self, x2: float) -> float:
        return self.inst.value((self.f(x2), x2, self.g(x2)))

    def dobjective(self, x2: float) -> float:
        """F'(x2), the left-hand side of agent 1's first-order condition."""
        u, b, d = self.inst.utility, self.inst.beta, self.inst.delta
        x1, x3 = self.f(x2), self.g(x2)
        return u.du(x1) * self.df(x2) + b * d * u.du(x2) + b * d * d * u.du(x3) * self.dg(x2)

    def d2objective(self, x2: float) -> float:
        u, b, d = self.inst.utility, self.inst.beta, self.inst.delta
        x1, x3 = self.f(x2), self.g(x2)
        return (
            u.d2u(x1) * self.df(x2) ** 2 + u.du(x1) * self.d2f(x2)
            + b * d * u.d2u(x2)
            + b * d * d * (u.d2u(x3) * self.dg(x2) ** 2 + u.du(x3) * self.d2g(x2))
        )

    def soc_terms(self, x2: float) -> tuple[float, float]:
        """(negative part, positive part) of agent 1's second-order expression.

        At a stationary point their sum equals F''(x2).
        """
        u, b, d = self.inst.utility, self.inst.beta, self.inst.delta
        x1, x3 = self.f(x2), self.g(x2)
        p2 = self.inst.p[1]
        neg = u.d2u(x1) * self.df(x2) ** 2 + b * d * u.d2u(x2) + b * d * d * u.d2u(x3) * self.dg(x2) ** 2
        pos = self.d2g(x2) * u.du(x2) * d * (1 - b) / (self.dg(x2) + p2)
        return neg, pos


@dataclass(frozen=True)
class Agent2Response:
    x2: float
    x3: float
    boundary: str | None = None


def agent2_response(inst: QhdInstance, x1: float) -> Agent2Response:
    p1, p2, p3 = inst.p
    R = inst.m - p1 * x1
    if -1e-12 * inst.m <= R < 0:
        R = 0.0  # rounding at x1 = m/p1
    if R < 0:
        raise QhdDomainError(f"x1={x1} leaves negative income {R}")
    if R == 0:
        return Agent2Response(0.0, 0.0, "empty")
    u, bd = inst.utility, inst.beta * inst.delta

    def resid(x2):
        return u.du(x2) - p2 * bd * u.du(R - p2 * x2)

    def end_resid(x2, inada):
        try:
            return resid(x2)
        except ZeroDivisionError:
            return inada  # u'(0) is infinite

    top = R / p2
    if end_resid(0.0, math.inf) <= 0:
        return Agent2Response(0.0, R, "x2=0")
    if end_resid(top, -math.inf) >= 0:
        return Agent2Response(top, 0.0, "x3=0")
    x2 = None
    if isinstance(u, CubicOnUnit):
        # (R - p2 x2)^2 = 1 - A (1 - x2^2) as a quadratic in x2
        A = inst.A
        a, b, c = p2 * p2 - A, -2 * R * p2, R * R - 1 + A
        roots = np.roots([a, b, c]) if a != 0 else np.array([-c / b])
        for r in sorted(float(z.real) for z in np.atleast_1d(roots) if abs(z.imag) < 1e-14):
            if 0 < r < top and abs(resid(r)) < 1e-12:
                x2 = r
                break
    if x2 is None:
        x2 = brentq(lambda z: end_resid(z, 1e300 if z < top / 2 else -1e300), 0.0, top, xtol=1e-15, rtol=1e-15)
    return Agent2Response(x2, R - p2 * x2)


@dataclass(frozen=True)
class StationaryPoint:
    x: tuple[float, float, float]
    value: float
    second_order: float
    soc_negative: float
    soc_positive: float

    @property
    def kind(self) -> str:
        if self.second_order < 0:
            return "local max"
        if self.second_order > 0:
            return "local min"
        return "degenerate"

    def to_json(self) -> dict:
        return {"x": list(self.x), "value": self.value, "second_order": self.second_order,
                "soc_negative": self.soc_negative, "soc_positive": self.soc_positive, "kind": self.kind}


@dataclass(frozen=True)
class Equilibrium:
    x: tuple[float, float, float]
    value: float
    boundary: str | None
    candidates: tuple = field(default=())
    stationary: tuple[StationaryPoint, ...] = field(default=())

    def nearest_stationary(self, x2: float) -> StationaryPoint | None:
        if not self.stationary:
            return None
        return min(self.stationary, key=lambda s: abs(s.x[1] - x2))

    def to_json(self) -> dict:
        return {
            "x": list(self.x),
            "value": self.value,
            "boundary": self.boundary,
            "candidates": [{"x": list(c[0]), "value": c[1]} for c in self.candidates],
            "stationary": [s.to_json() for s in self.stationary],
        }


def _path(inst: QhdInstance, x1: float) -> tuple[tuple[float, float, float], str | None]:
    r = agent2_response(inst, x1)
    return (x1, r.x2, r.x3), r.boundary


def stationary_points(inst: QhdInstance, step: float = GRID_STEP) -> list[StationaryPoint]:
    """Roots of F' along interior responses: grid sign changes, then brentq."""
    rm = ResponseMap(inst)
    try:
        lo, hi = rm.x2_domain()
    except QhdDomainError:
        return []
    n = max(2, int(math.ceil((hi - lo) / step)) + 1)
    grid = np.linspace(lo, hi, n)
    vals = []
    for x2 in map(float, grid):
        try:
            vals.append(rm.dobjective(x2))
        except (ValueError, ZeroDivisionError):
            vals.append(float("nan"))
    out = []
    for i in range(n - 1):
        a, b = vals[i], vals[i + 1]
        if not (math.isfinite(a) and math.isfinite(b)):
            continue
        if a == 0:
            root = grid[i]
        elif a * b < 0:
            root = brentq(rm.dobjective, grid[i], grid[i + 1], xtol=1e-15)
        else:
            continue
        neg, pos = rm.soc_terms(root)
        x = (rm.f(root), root, rm.g(root))
        out.append(StationaryPoint(x, inst.value(x), rm.d2objective(root), neg, pos))
    return out


def equilibrium(inst: QhdInstance, step: float = GRID_STEP, diagnostics: bool = True) -> Equilibrium:
    """Global maximizer of agent 1's payoff over x1 in [0, m/p1].

    Scans x1 on a grid, refines each grid-local maximum by golden-section
    search, and always includes both endpoints. Ties (within 1e-12) go to the
    least x2.
    """
    hi = inst.m / inst.p[0]
    n = max(2, int(math.ceil(hi / step)) + 1)
    grid = np.linspace(0.0, hi, n)
    vals = np.array([inst.value(_path(inst, x1)[0]) for x1 in grid])

    def neg(x1):
        return -inst.value(_path(inst, min(max(x1, 0.0), hi))[0])

    cands = [0.0, hi]
    for i in range(1, n - 1):
        if vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1]:
            if vals[i] > vals[i - 1] and vals[i] > vals[i + 1]:
                cands.append(float(golden(neg, brack=(grid[i - 1], grid[i], grid[i + 1]), tol=REFINE_TOL)))
            else:
                cands.append(float(grid[i]))
    scored = []
    for x1 in cands:
        x, bnd = _path(inst, x1)
        scored.append((x, inst.value(x), bnd))
    best_val = max(s[1] for s in scored)
    tied = [s for s in scored if s[1] >= best_val - TIE_TOL]
    x, val, bnd = min(tied, key=lambda s: s[0][1])
    stat = tuple(stationary_points(inst, step)) if diagnostics else ()
    return Equilibrium(x, val, bnd, tuple((s[0], s[1]) for s in scored), stat)


@dataclass(frozen=True)
class FocResiduals:
    foc2: float
    foc1: float
    foc2_ratio: float
    foc2_target: float
    foc1_ratio: float
    foc1_target: float
    boundary: bool

    @property
    def foc2_relative(self) -> float:
        return abs(self.foc2_ratio / self.foc2_target - 1)

    @property
    def foc1_relative(self) -> float:
        return abs(self.foc1_ratio / self.foc1_target - 1)

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in (
            "foc2", "foc1", "foc2_ratio", "foc2_target", "foc1_ratio", "foc1_target", "boundary")}


def foc_residuals(x, inst: QhdInstance) -> FocResiduals:
    """Residuals of agent 2's and agent 1's first-order conditions at x.

    ``foc1`` uses the response map (x1 = f(x2), x3 = g(x2)); the ratio forms
    use the observed bundle directly.
    """
    x1, x2, x3 = (float(v) for v in x)
    u, b, d = inst.utility, inst.beta, inst.delta
    p1, p2, _ = inst.p
    rm = ResponseMap(inst)
    boundary = min(x1, x2, x3) <= 0
    foc2 = u.du(x2) - p2 * b * d * u.du(x3)
    foc1 = rm.dobjective(x2)
    gp = rm.dg(x2)
    return FocResiduals(
        foc2=foc2,
        foc1=foc1,
        foc2_ratio=u.du(x2) / u.du(x3),
        foc2_target=b * d * p2,
        foc1_ratio=u.du(x1) / u.du(x2),
        foc1_target=d * p1 / p2 * (gp + b * p2) / (gp + p2),
        boundary=boundary,
    )
