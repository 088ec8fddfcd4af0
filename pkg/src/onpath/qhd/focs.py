"""FOCs and strong-FOCs certificates, and the exponential-discounting check.

A FOCs certificate is (lambda, beta, delta, mu) together with marginal-utility
targets m_t = lambda * p_t / delta^t * prod_{i<=t} 1/(1 - (1-beta) mu_i) that a
strictly concave, increasing u can match at the observed quantities.

Only ratios matter. With theta = 1 - (1-beta) mu_2 the certificate needs

    m1/m2 = delta * (p1/p2) * theta,   m2/m3 = beta * delta * p2,

with beta < theta < 1, and mu_1 drops out of every ratio. So the achievable
pairs (r12, r23) = (m1/m2, m2/m3) fill the region 0 < r23 < p2,
r23 * p1 / p2^2 < r12 < p1 / p2, and delta = 1 always reaches it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from onpath.qhd.utility import PiecewiseLinearMarginal, Utility, build_marginal_interpolation

R23_GRID = 2000
MAX_POWER = 60


class SingularityError(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class FocsCertificate:
    lam: float
    beta: float
    delta: float
    mu: tuple[float, float, float]
    targets: tuple[float, float, float]
    p: tuple[float, float, float]
    x: tuple[float, float, float]
    strong: bool = False
    method: str = ""
    mu1_convention: str = "mu1 in (0,1]"

    def rhs(self, t: int) -> float:
        """lambda p_t / delta^t prod_{i<=t} 1/(1-(1-beta) mu_i), t = 1..3."""
        prod = 1.0
        for i in range(t):
            prod /= 1 - (1 - self.beta) * self.mu[i]
        return self.lam * self.p[t - 1] / self.delta ** t * prod

    def residuals(self) -> list[float]:
        return [abs(self.targets[t - 1] / self.rhs(t) - 1) for t in (1, 2, 3)]

    def check(self, tol: float = 1e-9) -> bool:
        ok_params = (self.lam > 0 and 0 < self.beta < 1 and 0 < self.delta <= 1
                     and 0 < self.mu[1] < 1 and self.mu[2] == 1 and 0 < self.mu[0] <= 1)
        return ok_params and all(r <= tol for r in self.residuals())

    def to_json(self) -> dict:
        return {
            "lambda": self.lam, "beta": self.beta, "delta": self.delta, "mu": list(self.mu),
            "targets": list(self.targets), "strong": self.strong, "method": self.method,
            "mu1_convention": self.mu1_convention,
        }


@dataclass(frozen=True)
class _Interval:
    lo: float
    hi: float
    lo_open: bool = True
    hi_open: bool = True

    def meet(self, other: "_Interval") -> "_Interval":
        if other.lo > self.lo or (other.lo == self.lo and other.lo_open):
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open
        if other.hi < self.hi or (other.hi == self.hi and other.hi_open):
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open
        return _Interval(lo, hi, lo_open, hi_open)

    @property
    def empty(self) -> bool:
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and not self.lo_open and not self.hi_open)

    def pick(self) -> float:
        if self.lo == self.hi:
            return self.lo
        if math.isinf(self.hi):
            return self.lo * 2 if self.lo > 0 else 1.0
        # geometric midpoint keeps ratios well-scaled
        return math.sqrt(self.lo * self.hi) if self.lo > 0 else self.hi / 2

    def points(self, n: int) -> list[float]:
        if self.lo == self.hi:
            return [self.lo]
        lo = self.lo if self.lo > 0 else self.hi * 1e-9
        hi = self.hi if math.isfinite(self.hi) else lo * 1e9
        return [lo * (hi / lo) ** ((i + 0.5) / n) for i in range(n)]


def _order_interval(a: float, b: float) -> _Interval:
    """Allowed values of u'(a)/u'(b) for strictly concave increasing u."""
    if a < b:
        return _Interval(1.0, math.inf)
    if a > b:
        return _Interval(0.0, 1.0)
    return _Interval(1.0, 1.0, False, False)


def _certificate(x, p, r12: float, r23: float, method: str) -> FocsCertificate | None:
    p1, p2, p3 = p
    delta = 1.0
    beta = r23 / (delta * p2)
    theta = r12 * p2 / (delta * p1)
    if not (0 < beta < 1 and beta < theta < 1):
        return None
    mu = (1.0, (1 - theta) / (1 - beta), 1.0)
    lam = 1.0
    prod, targets = 1.0, []
    for t in range(3):
        prod /= 1 - (1 - beta) * mu[t]
        targets.append(lam * p[t] / delta ** (t + 1) * prod)
    return FocsCertificate(lam, beta, delta, mu, tuple(targets), tuple(p), tuple(x), False, method)


def _consistent(x, targets) -> bool:
    for s in range(3):
        for t in range(3):
            iv = _order_interval(x[s], x[t])
            r = targets[s] / targets[t]
            if x[s] == x[t]:
                if abs(r - 1) > 1e-12:
                    return False
            elif not iv.lo < r < iv.hi:
                return False
    return True


def shifted_marginal_recipe(x, p) -> FocsCertificate | None:
    """u' = n - x with n the smallest power of two that works, and delta = 1.

    Applies when p1 > p2 > p3 and p1/p2 < p2/p3; then for large n
    theta_1 ~ p2/p1 exceeds theta_2 ~ p3/p2, beta = theta_2 and mu_2 is read
    off theta_1 = 1 - (1-beta) mu_2.
    """
    p1, p2, p3 = p
    if not (p1 > p2 > p3 and p1 / p2 < p2 / p3):
        return None
    for j in range(MAX_POWER + 1):
        n = 2.0 ** j
        h = [n - v for v in x]
        if min(h) <= 0:
            continue
        th1 = h[0] / h[1] * p2 / p1
        th2 = h[1] / h[2] * p3 / p2
        if 0 < th2 < th1 < 1:
            cert = _certificate(x, p, h[0] / h[1], h[1] / h[2], f"shifted-marginal recipe, n=2^{j}")
            if cert is not None and _consistent(x, cert.targets):
                return cert
    return None


@dataclass(frozen=True)
class FocsSearch:
    certificate: FocsCertificate | None
    transcript: tuple[str, ...] = field(default=())


def focs_search(x: Sequence[float], p: Sequence[float]) -> FocsSearch:
    x = tuple(float(v) for v in x)
    p = tuple(float(v) for v in p)
    if p[2] != 1.0:
        raise ValueError("prices must be normalized so that p3 = 1")
    if min(x) < 0:
        raise ValueError("quantities must be nonnegative")
    log = []
    cert = shifted_marginal_recipe(x, p)
    if cert is not None:
        log.append(cert.method)
        return FocsSearch(cert, tuple(log))
    log.append("shifted-marginal recipe not applicable")
    p1, p2, _ = p
    i12, i23, i13 = _order_interval(x[0], x[1]), _order_interval(x[1], x[2]), _order_interval(x[0], x[2])
    r23_range = _Interval(0.0, p2).meet(i23)
    if r23_range.empty:
        log.append("no admissible m2/m3")
        return FocsSearch(None, tuple(log))
    for r23 in r23_range.points(R23_GRID):
        r12_range = _Interval(r23 * p1 / p2 ** 2, p1 / p2).meet(i12)
        lo13 = _Interval(i13.lo / r23, i13.hi / r23, i13.lo_open, i13.hi_open)
        r12_range = r12_range.meet(lo13)
        if r12_range.empty:
            continue
        cert = _certificate(x, p, r12_range.pick(), r23, f"ratio region, m2/m3={r23:.12g}")
        if cert is not None and _consistent(x, cert.targets):
            log.append(cert.method)
            return FocsSearch(cert, tuple(log))
    log.append(f"ratio region empty on a {len(r23_range.points(R23_GRID))}-point m2/m3 grid")
    return FocsSearch(None, tuple(log))


def focs_rationalize(x: Sequence[float], p: Sequence[float]) -> FocsCertificate | None:
    return focs_search(x, p).certificate


def strong_focs_mu2(utility: Utility, beta: float, delta: float, p2: float, x: Sequence[float]) -> float:
    k = beta * delta * p2 ** 2
    num = k * utility.d2u(x[2])
    den = utility.d2u(x[1]) + num
    if den == 0:
        raise SingularityError("u''(x2) + beta*delta*p2^2*u''(x3) vanishes")
    return num / den


def strong_certificate(
    cert: FocsCertificate, b3: float = -1.0, b1: float = -1.0
) -> tuple[FocsCertificate, PiecewiseLinearMarginal]:
    """Upgrade a certificate with distinct quantities to a strong one.

    Keeps the marginal targets and picks u''(x2) so that the implicit-function
    value of mu_2 matches the certificate.
    """
    x = cert.x
    if len(set(x)) != 3:
        raise ValueError("strong upgrade needs pairwise distinct quantities")
    k = cert.beta * cert.delta * cert.p[1] ** 2
    mu2 = cert.mu[1]
    b2 = k * b3 * (1 - mu2) / mu2
    u = build_marginal_interpolation([(x[0], cert.targets[0], b1), (x[1], cert.targets[1], b2),
                                      (x[2], cert.targets[2], b3)])
    upgraded = FocsCertificate(cert.lam, cert.beta, cert.delta, cert.mu, cert.targets, cert.p, x,
                               True, cert.method + "; strong via marginal interpolation",
                               cert.mu1_convention)
    return upgraded, u


@dataclass(frozen=True)
class ExpFocs:
    delta: float
    targets: tuple[float, float, float]

    def to_json(self) -> dict:
        return {"delta": self.delta, "targets": list(self.targets)}


def exp_focs_check(x: Sequence[float], p: Sequence[float]) -> ExpFocs | None:
    """Exponential-discounting FOCs: m3 = 1, m2 = p2 delta, m1 = p1 delta^2.

    Weak concavity needs m_s >= m_t when x_s < x_t and equality on ties. Each
    pairwise requirement bounds delta from one side, so the feasible set is an
    interval; the largest feasible delta in (0, 1] is returned.
    """
    x = tuple(float(v) for v in x)
    p1, p2, p3 = (float(v) for v in p)
    if p3 != 1.0:
        raise ValueError("prices must be normalized so that p3 = 1")
    lo, hi = 0.0, 1.0
    lo_open = True
    # (s, t, threshold c): m_s / m_t compares delta with c
    pairs = [(0, 1, p2 / p1), (1, 2, 1 / p2), (0, 2, 1 / math.sqrt(p1))]
    for s, t, c in pairs:
        # m_s/m_t is increasing in delta and equals 1 at delta = c
        if x[s] < x[t]:
            if c > lo or (c == lo and lo_open):
                lo, lo_open = c, False
        elif x[s] > x[t]:
            hi = min(hi, c)
        else:
            if c > lo or (c == lo and lo_open):
                lo, lo_open = c, False
            hi = min(hi, c)
    if lo > hi or (lo == hi and lo_open):
        return None
    d = hi
    return ExpFocs(d, (p1 * d * d, p2 * d, 1.0))
