"""Seeded experiment harnesses shared by the test suite and scripts/.

Each harness draws small datasets, compares an axiom-based characterization
with the exact oracle (or with a construction, or with a second mode) and
returns a tally of agreements with the disagreeing instances kept for
inspection.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from onpath.axioms import (
    check_condition1,
    check_condition2,
    check_condition3,
    check_condition4,
    check_condition5,
    check_nnsarp,
    check_nsarp,
    check_tsarp,
)
from onpath.core import Dataset
from onpath.oracle import OrderClass, solve
from onpath.rationalize import ModelKind, RationalizationError, construct, verify
from onpath.simgen import GenConfig, GenerationError, random_dataset, random_profile, simulate

Characterization = Callable[[Dataset], bool]


def _all_tsarp(ds: Dataset) -> bool:
    return all(check_tsarp(ds, t).holds for t in range(1, ds.T + 1))


CHARACTERIZATIONS: dict[str, dict[str, Characterization]] = {
    "two-period-distinct": {
        "naive": lambda d: check_condition1(d).holds,
        "sophisticated": lambda d: check_condition2(d).holds,
        "strict-nash": lambda d: check_nnsarp(d).holds,
    },
    "two-period": {
        "naive": lambda d: check_nsarp(d).holds and check_condition1(d).holds,
        "nash": lambda d: check_nsarp(d).holds,
        "strict-nash": lambda d: check_nsarp(d).holds and check_nnsarp(d).holds,
    },
    "multi-period-distinct": {
        "sophisticated": lambda d: check_condition2(d).holds,
        "naive": lambda d: check_condition5(d).holds,
        "strict-nash": lambda d: check_tsarp(d, 1).holds,
    },
    "multi-period": {
        "naive": lambda d: check_tsarp(d, d.T).holds and check_condition5(d).holds,
        "nash": lambda d: check_tsarp(d, d.T).holds,
        "strict-nash": _all_tsarp,
    },
}


@dataclass(frozen=True)
class SamplerConfig:
    """Ranges for random small datasets; sizes and K are drawn per instance."""

    periods: int = 2
    max_size: int = 3
    max_K: int = 3
    distinct_x1: bool = False
    min_density: float = 0.3
    simulate_share: float = 0.5


def sample_dataset(cfg: SamplerConfig, seed: int, index: int) -> Dataset:
    """Half uniform choices, half choices simulated from a random profile."""
    rng = random.Random(f"harness:{seed}:{index}")
    K = rng.randint(1, cfg.max_K)
    lo0 = K if cfg.distinct_x1 else 1
    sizes = [rng.randint(lo0, max(lo0, cfg.max_size))] + [
        rng.randint(1, cfg.max_size) for _ in range(cfg.periods - 1)
    ]
    if cfg.periods >= 2 and max(sizes[1:]) == 1:
        sizes[-1] = min(2, cfg.max_size)
    density = rng.uniform(cfg.min_density, 1.0)
    gen_seed = rng.getrandbits(32)
    simulated = rng.random() < cfg.simulate_share
    model = rng.choice(list(ModelKind))
    gc = GenConfig(seed=gen_seed, sizes=tuple(sizes), K=K, density=density,
                   distinct_x1=cfg.distinct_x1, model=model,
                   order_class="weak" if model is ModelKind.NAIVE_NASH else "linear")
    if simulated:
        try:
            return simulate(gc, random_profile(gc)).dataset
        except GenerationError:
            pass
    return random_dataset(gc)


@dataclass
class Tally:
    name: str
    total: int = 0
    agree: int = 0
    positives: int = 0
    skipped: int = 0
    disagreements: list = field(default_factory=list)

    def add(self, predicted: bool, truth: bool, key) -> None:
        self.total += 1
        self.positives += bool(truth)
        if predicted == truth:
            self.agree += 1
        else:
            self.disagreements.append({"instance": key, "axioms": predicted, "oracle": truth})

    @property
    def rate(self) -> float:
        return self.agree / self.total if self.total else 1.0

    def to_json(self) -> dict:
        return {"name": self.name, "total": self.total, "agree": self.agree,
                "positives": self.positives, "rate": self.rate,
                "disagreements": self.disagreements[:20]}


def equivalence_run(
    family: str,
    sampler: SamplerConfig,
    n: int,
    seed: int = 0,
    order_class: OrderClass | str = OrderClass.WEAK,
    models: list[str] | None = None,
) -> dict[str, Tally]:
    chars = CHARACTERIZATIONS[family]
    models = models or list(chars)
    tallies = {m: Tally(f"{family}/{m}") for m in models}
    for i in range(n):
        ds = sample_dataset(sampler, seed, i)
        for m in models:
            truth = solve(ds, m, order_class).rationalizable
            tallies[m].add(bool(chars[m](ds)), truth, i)
    return tallies


def linear_nash_divergence(sampler: SamplerConfig, n: int, seed: int = 0) -> list[int]:
    """Instances where N-SARP holds yet no profile of linear orders is naive-Nash."""
    hits = []
    for i in range(n):
        ds = sample_dataset(sampler, seed, i)
        if check_nsarp(ds).holds and not solve(ds, "nash", OrderClass.LINEAR).rationalizable:
            hits.append(i)
    return hits


PASSING: dict[str, Characterization] = {
    "naive": lambda d: check_tsarp(d, d.T).holds and (
        check_condition1(d).holds if d.T == 2 else check_condition5(d).holds),
    "sophisticated": lambda d: d.distinct_first_choices() and check_condition2(d).holds,
    "strict-nash": _all_tsarp,
}


def roundtrip_run(model: str, sampler: SamplerConfig, n: int, seed: int = 0, budget: int = 50) -> Tally:
    """Construct and verify on the first ``n`` samples passing the model's axioms.

    At most ``budget * n`` samples are drawn.
    """
    tally = Tally(f"roundtrip/{model}")
    for i in range(budget * n):
        if tally.total >= n:
            break
        ds = sample_dataset(sampler, seed, i)
        if not PASSING[model](ds):
            continue
        try:
            ok = verify(ds, construct(ds, model), model).ok
        except RationalizationError:
            ok = False
        tally.add(ok, True, i)
    return tally


def greedy_exhaustive_run(sampler: SamplerConfig, n: int, seed: int = 0) -> Tally:
    tally = Tally("condition1/greedy-vs-exhaustive")
    for i in range(n):
        ds = sample_dataset(sampler, seed, i)
        g = check_condition1(ds, "greedy").holds
        e = check_condition1(ds, "exhaustive").holds
        tally.add(g, e, i)
    return tally


NECESSARY: dict[str, list[tuple[str, Callable]]] = {
    "naive": [("nsarp", check_nsarp), ("cond1", check_condition1)],
    "nash": [("nsarp", check_nsarp)],
    "strict-nash": [("nsarp", check_nsarp), ("nnsarp", check_nnsarp)],
    "sophisticated": [("nsarp", check_nsarp), ("cond3", check_condition3), ("cond4", check_condition4)],
    "sophisticated-distinct": [("cond2", check_condition2)],
}


def necessity_run(model: str, n: int, seed: int = 0, sizes=(2, 3), max_K: int = 3) -> Tally:
    """Simulated two-period datasets must satisfy every necessary axiom.

    A verdict of None (inconclusive) counts as a failure.
    """
    distinct = model == "sophisticated-distinct"
    base = "sophisticated" if distinct else model
    tally = Tally(f"necessity/{model}")
    rng = random.Random(f"necessity:{seed}:{model}")
    skipped = 0
    while tally.total < n:
        K = rng.randint(1, min(max_K, sizes[0]) if distinct else max_K)
        gc = GenConfig(seed=rng.getrandbits(32), sizes=sizes, K=K, density=rng.uniform(0.3, 1.0),
                       distinct_x1=distinct, model=base,
                       order_class="weak" if base == "nash" else "linear")
        try:
            ds = simulate(gc, random_profile(gc)).dataset
        except GenerationError:
            # the drawn profile admits no usable budget; draw another profile
            skipped += 1
            continue
        bad = [name for name, fn in NECESSARY[model] if fn(ds).holds is not True]
        tally.add(not bad, True, {"index": tally.total, "failed": bad})
    tally.skipped = skipped
    return tally
