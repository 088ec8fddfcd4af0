"""Reproductions of the three-period counterexamples as JSON-ready reports.

Each report carries its numbers as labeled fields and a ``checks`` list of
``{"name", "expected", "got", "tol", "pass"}`` entries, so callers can fail on
any tolerance breach without re-deriving anything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from onpath.qhd.consumer import QhdInstance, ResponseMap, equilibrium, foc_residuals
from onpath.qhd.focs import focs_rationalize, strong_focs_mu2
from onpath.qhd.utility import CubicOnUnit

THETA_HI = 0.9
THETA_LO = 0.01
APPENDIX_P2 = 1 / 0.64
APPENDIX_PK1 = 5125 / 2304
APPENDIX_LAST = ((0.05, 0.05, 0.47), (3.1, 2.0, 1.0))
APPENDIX_STATED_OPTIMUM = (0.33, 0.75, 0.472)
THM2_X = (0.04, 0.05, 0.47)
THM2_P = (3.1, 2.0, 1.0)


@dataclass
class Report:
    name: str
    fields: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def check(self, name: str, expected, got, tol: float | None = None, ok: bool | None = None) -> bool:
        if ok is None:
            if tol is None:
                ok = expected == got
            else:
                ok = abs(got - expected) <= tol
        self.checks.append({"name": name, "expected": expected, "got": got, "tol": tol, "pass": bool(ok)})
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def failed(self) -> list[str]:
        return [c["name"] for c in self.checks if not c["pass"]]

    def to_json(self) -> dict:
        return {"report": self.name, **self.fields, "checks": self.checks, "flags": self.flags,
                "passed": self.passed}


def theorem1_algebra(p) -> dict:
    """Equal-consumption algebra: foc2 pins beta*delta = 1/p2, so A = 1 and g' = 1,
    and foc1 then reads (1 + p2)/p1 = beta*delta*(1 + delta)."""
    p1, p2, _ = p
    bd = 1 / p2
    delta = (1 + p2) / (p1 * bd) - 1
    beta = bd / delta if delta > 0 else math.inf
    if delta > 1 or delta <= 0:
        verdict, reason = False, f"delta = {delta:.12g} outside (0, 1]"
    elif beta >= 1 - 1e-12:
        verdict, reason = False, f"beta = {beta:.12g} is not below 1"
    else:
        verdict, reason = None, "algebraic screen passes; needs an equilibrium search"
    return {"beta_delta": bd, "delta_required": delta, "beta_implied": beta,
            "rationalizable": verdict, "reason": reason}


def repro_theorem1(c: float = 0.1, p=(4.0, 3.0, 1.0)) -> Report:
    rep = Report("thm1")
    x = (c, c, c)
    cert = focs_rationalize(x, p)
    rep.fields["x"] = list(x)
    rep.fields["p"] = list(p)
    rep.fields["certificate"] = cert.to_json() if cert else None
    rep.fields["focs_value"] = cert.targets[0] if cert else None
    alg = theorem1_algebra(p)
    rep.fields.update(alg)
    if tuple(p) == (4.0, 3.0, 1.0):
        if cert is None:
            rep.check("focs certificate exists", True, False)
        else:
            rep.check("focs common value", 12.0, cert.targets[0], 1e-9)
            rep.check("certificate re-verifies", True, cert.check())
        rep.check("beta_delta", 1 / 3, alg["beta_delta"], 1e-12)
        rep.check("delta_required", 2.0, alg["delta_required"], 1e-12)
        rep.check("not rationalizable", False, alg["rationalizable"])
    return rep


def theorem2_instance(m: float | None = None) -> QhdInstance:
    if m is None:
        m = sum(a * b for a, b in zip(THM2_X, THM2_P))
    return QhdInstance(CubicOnUnit(), 0.8, 0.8, THM2_P, m)


def repro_theorem2() -> Report:
    rep = Report("thm2")
    inst = theorem2_instance()
    rm = ResponseMap(inst)
    x = THM2_X
    x2 = x[1]
    neg, pos = rm.soc_terms(x2)
    res = foc_residuals(x, inst)
    eq = equilibrium(inst)
    near = eq.nearest_stationary(x2)
    mu2 = strong_focs_mu2(inst.utility, inst.beta, inst.delta, inst.p[1], x)
    theta = 1 - (1 - inst.beta) * mu2
    u = inst.utility
    strong_r12 = u.du(x[0]) / u.du(x[1])
    rep.fields.update({
        "instance": inst.to_json(),
        "observed": list(x),
        "A": rm.A,
        "g": rm.g(x2), "g_prime": rm.dg(x2), "g_second": rm.d2g(x2), "f": rm.f(x2),
        "soc_positive": pos, "soc_negative": neg, "second_order": rm.d2objective(x2),
        "foc_residuals": res.to_json(),
        "strong_mu2": mu2,
        "strong_ratio_12": strong_r12,
        "strong_ratio_12_target": inst.delta * inst.p[0] / inst.p[1] * theta,
        "observed_value": inst.value(x),
        "equilibrium": eq.to_json(),
        "nearest_stationary": near.to_json() if near else None,
    })
    # 1/(0.8*0.8*2) is exact in rationals; allow one ulp of float rounding
    rep.check("A", 0.78125, rm.A, 2e-16)
    rep.check("g_prime", 0.08315, rm.dg(x2), 5e-5)
    rep.check("g_second", 1.65, rm.d2g(x2), 5e-3)
    rep.check("soc_positive", 0.126, pos, 1e-3)
    rep.check("soc_negative_magnitude", 0.103, abs(neg), 1e-3)
    rep.check("soc_positive_dominates", True, pos > abs(neg))
    for i, target in enumerate((0.0106, 0.093, 0.475)):
        rep.check(f"equilibrium_x{i + 1}", target, eq.x[i], 1e-3)
    stationary_obs = res.foc2_relative < 2e-3 and res.foc1_relative < 2e-3
    rep.check("observed_is_stationary_to_stated_precision", True, stationary_obs)
    rep.check("observed_is_local_minimizer", "local min",
              "local min" if rm.d2objective(x2) > 0 else "not a local min")
    rep.check("observed_not_equilibrium", True, eq.value > inst.value(x) + 1e-9)
    if near is not None and abs(near.x[1] - x2) > 1e-3:
        rep.flags.append(
            f"exact stationary point of the reduced objective nearest x2={x2} sits at "
            f"x2={near.x[1]:.6f} ({near.kind}); the observed bundle is stationary only to "
            f"about 1e-3 relative"
        )
    if abs(eq.x[1] - 0.093) > 1e-3:
        rep.flags.append(
            f"global equilibrium is {[round(v, 6) for v in eq.x]} (boundary: {eq.boundary}), "
            f"not (0.0106, 0.093, 0.475); F'(0.093) = {rm.dobjective(0.093):.3e} > 0"
        )
    return rep


def appendix_p1(x1: float, beta: float = 0.8, delta: float = 0.8, x2: float = 0.1) -> float:
    """Agent-1 price that makes (x1, x2, x2) satisfy the cubic's FOC when A = 1 (g' = 1)."""
    u = CubicOnUnit()
    p2 = 1 / (beta * delta)
    return u.du(x1) / (delta * u.du(x2)) * p2 * (1 + p2) / (1 + beta * p2)


def appendix_printed_p1(x1: float) -> float:
    return (1 + 0.8 ** 2) / (0.99 * 1.8) * (1 - x1 ** 2)


def gen_appendixA(K: int = 50) -> tuple[dict, Report]:
    if K < 2:
        raise ValueError("K must be at least 2")
    obs = []
    for k in range(1, K + 1):
        x1 = THETA_HI * k / K
        obs.append({"x": [x1, 0.1, 0.1], "p": [appendix_p1(x1), APPENDIX_P2, 1.0]})
    obs.append({"x": [0.2, 0.2, 0.2], "p": [APPENDIX_PK1, APPENDIX_P2, 1.0]})
    obs.append({"x": list(APPENDIX_LAST[0]), "p": list(APPENDIX_LAST[1])})
    data = {"observations": obs}

    rep = Report("appendixA")
    rep.fields["K"] = K
    rep.fields["theta_bounds"] = [THETA_LO, THETA_HI]
    # beta*delta from agent 2's FOC with x2 = x3
    bds = [1 / o["p"][1] for o in obs[:K]]
    bd = bds[0]
    rep.fields["beta_delta"] = bd
    rep.check("beta_delta pinned by 1..K", 0.64, bd, 1e-12,
              ok=all(abs(b - 0.64) <= 1e-12 for b in bds))
    pK1 = obs[K]["p"][0]
    rep.fields["p_K1_1"] = pK1
    rep.check("p^{K+1}_1 = 5125/2304", 5125 / 2304, pK1, 1e-15)
    ratio = (1 + APPENDIX_P2) / pK1
    delta = ratio / bd - 1
    rep.fields["ratio_K1"] = ratio
    rep.fields["delta"] = delta
    rep.fields["beta"] = bd / delta
    rep.check("delta recovered", 0.8, delta, 1e-9)
    # implied marginal u'(x1^k) relative to u'(0.1) = 0.99
    u = CubicOnUnit()
    errs = []
    for o in obs[:K]:
        p1 = o["p"][0]
        implied = delta * u.du(0.1) * p1 / APPENDIX_P2 * (1 + bd / delta * APPENDIX_P2) / (1 + APPENDIX_P2)
        errs.append(abs(implied - u.du(o["x"][0])))
    rep.fields["marginal_grid_max_error"] = max(errs)
    rep.check("pinned marginals equal 1 - x^2", 0.0, max(errs), 1e-9)

    x_last, p_last = APPENDIX_LAST
    m_last = sum(a * b for a, b in zip(x_last, p_last))
    inst = QhdInstance(CubicOnUnit(), 0.8, 0.8, p_last, m_last)
    rm = ResponseMap(inst)
    neg, pos = rm.soc_terms(x_last[1])
    eq = equilibrium(inst, diagnostics=False)
    rep.fields["last"] = {"x": list(x_last), "p": list(p_last), "m": m_last,
                          "soc_positive": pos, "soc_negative": neg,
                          "optimum": list(eq.x), "optimum_value": eq.value,
                          "observed_value": inst.value(x_last)}
    rep.check("observation K+2 violates the SOC", True, pos > abs(neg))

    stated_cost = sum(a * b for a, b in zip(APPENDIX_STATED_OPTIMUM, p_last))
    rep.fields["stated_optimum"] = {"x": list(APPENDIX_STATED_OPTIMUM), "cost": stated_cost}
    printed = [appendix_printed_p1(o["x"][0]) for o in obs[:K]]
    derived = [o["p"][0] for o in obs[:K]]
    gap = max(abs(a - b) for a, b in zip(printed, derived))
    rep.fields["printed_p1_max_gap"] = gap
    flags = 0
    if gap > 1e-9:
        rep.flags.append(
            f"printed p^k_1 formula differs from the FOC-derived prices by up to {gap:.6f}; "
            "derived prices are used"
        )
        flags += 1
    if stated_cost > m_last + 1e-9:
        rep.flags.append(
            f"stated optimum {list(APPENDIX_STATED_OPTIMUM)} costs {stated_cost:.4f} > income "
            f"{m_last:.4f}; numerical optimum {[round(v, 6) for v in eq.x]} reported instead"
        )
        flags += 1
    rep.check("documented inconsistencies flagged", 2, flags)
    return data, rep
