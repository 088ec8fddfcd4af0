"""Instantaneous utility families with derivatives and inverse marginal utility."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Sequence


class UtilityDomainError(ValueError):
    pass


class Utility:
    """Interface: u, du, d2u, d3u and inv_du (the inverse of du on its range)."""

    name = "utility"
    strictly_concave = True

    def u(self, x: float) -> float:
        raise NotImplementedError

    def du(self, x: float) -> float:
        raise NotImplementedError

    def d2u(self, x: float) -> float:
        raise NotImplementedError

    def d3u(self, x: float) -> float:
        raise NotImplementedError

    def inv_du(self, y: float) -> float:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"family": self.name}


@dataclass(frozen=True)
class CubicOnUnit(Utility):
    """u(x) = x - x^3/3, increasing and strictly concave on (0, 1)."""

    name = "cubic"

    def u(self, x):
        return x - x ** 3 / 3

    def du(self, x):
        return 1 - x * x

    def d2u(self, x):
        return -2 * x

    def d3u(self, x):
        return -2.0

    def inv_du(self, y):
        if not 0 <= y <= 1:
            raise UtilityDomainError(f"marginal utility {y} outside the cubic's range [0, 1]")
        return math.sqrt(1 - y)


@dataclass(frozen=True)
class CRRA(Utility):
    """Constant relative risk aversion, u'(x) = x^(-gamma)."""

    gamma: float = 2.0
    name = "crra"

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    def u(self, x):
        if self.gamma == 1:
            return math.log(x)
        return x ** (1 - self.gamma) / (1 - self.gamma)

    def du(self, x):
        return x ** -self.gamma

    def d2u(self, x):
        return -self.gamma * x ** (-self.gamma - 1)

    def d3u(self, x):
        return self.gamma * (self.gamma + 1) * x ** (-self.gamma - 2)

    def inv_du(self, y):
        if y <= 0:
            raise UtilityDomainError("CRRA marginal utility must be positive")
        return y ** (-1 / self.gamma)

    def to_json(self):
        return {"family": self.name, "gamma": self.gamma}


@dataclass(frozen=True)
class PiecewiseLinearMarginal(Utility):
    """u' is the piecewise-linear function through ``(xs[i], hs[i])``.

    Beyond the outer vertices u' continues with the slope of the outer
    segments. ``u`` is the integral of u' anchored at ``(anchor_x, anchor_u)``.
    The result is C^1 with a kink in u' at every vertex.
    """

    xs: tuple[float, ...]
    hs: tuple[float, ...]
    anchor_x: float = 0.0
    anchor_u: float = 0.0
    _cum: tuple[float, ...] = field(default=(), repr=False, compare=False)
    name = "piecewise-linear-marginal"

    def __post_init__(self):
        if len(self.xs) != len(self.hs) or len(self.xs) < 2:
            raise ValueError("need at least two vertices with matching values")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise ValueError("vertices must be strictly increasing")
        cum = [0.0]
        for i in range(len(self.xs) - 1):
            w = self.xs[i + 1] - self.xs[i]
            cum.append(cum[-1] + 0.5 * (self.hs[i] + self.hs[i + 1]) * w)
        object.__setattr__(self, "_cum", tuple(cum))

    def _seg(self, x: float) -> int:
        i = bisect.bisect_right(self.xs, x) - 1
        return min(max(i, 0), len(self.xs) - 2)

    def _slope(self, i: int) -> float:
        return (self.hs[i + 1] - self.hs[i]) / (self.xs[i + 1] - self.xs[i])

    def du(self, x):
        i = self._seg(x)
        return self.hs[i] + self._slope(i) * (x - self.xs[i])

    def d2u(self, x):
        return self._slope(self._seg(x))

    def d3u(self, x):
        return 0.0

    def _integral_from_x0(self, x: float) -> float:
        i = self._seg(x)
        dx = x - self.xs[i]
        return self._cum[i] + self.hs[i] * dx + 0.5 * self._slope(i) * dx * dx

    def u(self, x):
        return self.anchor_u + self._integral_from_x0(x) - self._integral_from_x0(self.anchor_x)

    def inv_du(self, y):
        # u' is strictly decreasing, so walk the segments
        for i in range(len(self.xs) - 1):
            lo, hi = self.hs[i + 1], self.hs[i]
            first, last = i == 0, i == len(self.xs) - 2
            if (lo <= y <= hi) or (first and y > hi) or (last and y < lo):
                return self.xs[i] + (y - self.hs[i]) / self._slope(i)
        raise UtilityDomainError(f"no point with marginal utility {y}")

    def to_json(self):
        return {"family": self.name, "xs": list(self.xs), "hs": list(self.hs),
                "anchor": [self.anchor_x, self.anchor_u]}


class InterpolationError(ValueError):
    pass


def build_marginal_interpolation(
    knots: Sequence[tuple[float, float, float]],
    anchor: tuple[float, float] = (0.0, 0.0),
) -> PiecewiseLinearMarginal:
    """u with u'(x_t) = a_t and u''(x_t) = b_t at each knot (x_t, a_t, b_t).

    Around each knot u' equals the line a_t + b_t (x - x_t) on a neighborhood
    of half-width w, and is linearly interpolated between neighborhoods. w
    starts at a quarter of the smallest knot gap (at half the gap the
    neighborhoods would touch and u' would jump) and is shrunk until the pieces stay
    ordered (strictly decreasing u') and u' stays positive on the knot hull.
    """
    ks = sorted((float(x), float(a), float(b)) for x, a, b in knots)
    if not ks:
        raise InterpolationError("no knots")
    for x, a, b in ks:
        if a <= 0:
            raise InterpolationError(f"knot at x={x}: marginal utility {a} must be positive")
        if b >= 0:
            raise InterpolationError(f"knot at x={x}: slope {b} must be negative")
    for (x0, a0, b0), (x1, a1, b1) in zip(ks, ks[1:]):
        if x1 == x0:
            raise InterpolationError(f"duplicate knot abscissa {x0}")
        if not a0 > a1:
            raise InterpolationError(
                f"knots x={x0} (a={a0}) and x={x1} (a={a1}) admit no decreasing marginal utility"
            )
    if len(ks) == 1:
        x, a, b = ks[0]
        return PiecewiseLinearMarginal((x - 1.0, x + 1.0), (a - b, a + b), *anchor)
    w = min(x1 - x0 for (x0, _, _), (x1, _, _) in zip(ks, ks[1:])) / 4
    for (x0, a0, b0), (x1, a1, b1) in zip(ks, ks[1:]):
        gap = (a0 - a1) / (abs(b0) + abs(b1))
        w = min(w, 0.5 * gap)
    x_last, a_last, b_last = ks[-1]
    w = min(w, 0.5 * a_last / abs(b_last))
    xs, hs = [], []
    for x, a, b in ks:
        xs += [x - w, x + w]
        hs += [a - b * w, a + b * w]
    for i in range(len(xs) - 1):
        if not xs[i + 1] > xs[i]:
            k = i // 2
            raise InterpolationError(f"knots x={ks[k][0]} and x={ks[k + 1][0]} are too close to separate")
    # the knot itself sits mid-segment, so u'(x_t) = a_t and u''(x_t) = b_t exactly
    return PiecewiseLinearMarginal(tuple(xs), tuple(hs), *anchor)


FAMILIES = {"cubic": CubicOnUnit, "crra": CRRA}


def utility_from_name(name: str, **params) -> Utility:
    try:
        return FAMILIES[name](**params)
    except KeyError:
        raise ValueError(f"unknown utility family {name!r}") from None
