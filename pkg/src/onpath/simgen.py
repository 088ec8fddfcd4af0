"""Seeded generation of budgets, preference profiles and simulated datasets.

Every random draw comes from a ``random.Random`` seeded by a string derived
from the config seed and a purpose tag (``"{seed}:budget:{k}:{attempt}"`` and
so on). String seeds are hashed deterministically, so each observation has
its own substream and serial and parallel generation agree.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass

from onpath.core import ChoiceSpace, Dataset, Observation, Preference
from onpath.oracle import OrderClass
from onpath.rationalize import ModelKind, PreferenceProfile, predict

RESAMPLE_CAP = 100


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    sizes: tuple[int, ...] = (2, 3)
    K: int = 2
    density: float = 0.7
    distinct_x1: bool = False
    model: ModelKind = ModelKind.SOPHISTICATED
    order_class: OrderClass = OrderClass.LINEAR

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "model", ModelKind.parse(self.model))
        object.__setattr__(self, "order_class", OrderClass(self.order_class))

    @property
    def space(self) -> ChoiceSpace:
        return ChoiceSpace.from_sizes(self.sizes)

    def problems(self) -> list[str]:
        out = []
        if len(self.sizes) < 2 or min(self.sizes) < 1:
            out.append(f"sizes {list(self.sizes)} must give at least 2 nonempty periods")
        if self.K < 1:
            out.append("K must be positive")
        if not 0 < self.density <= 1:
            out.append(f"density {self.density} outside (0, 1]")
        if self.distinct_x1 and self.sizes and self.K > self.sizes[0]:
            out.append(f"K={self.K} distinct first-period choices need |X1| >= K, got {self.sizes[0]}")
        return out

    def to_json(self) -> dict:
        d = asdict(self)
        d["sizes"] = list(self.sizes)
        d["model"] = self.model.value
        d["order_class"] = self.order_class.value
        return d

    @classmethod
    def from_json(cls, obj: dict) -> "GenConfig":
        return cls(**obj)


def _rng(cfg: GenConfig, *tags) -> random.Random:
    return random.Random(":".join([str(cfg.seed), *map(str, tags)]))


def _validated(cfg: GenConfig) -> None:
    bad = cfg.problems()
    if bad:
        raise GenerationError("; ".join(bad))


def _first_slots(cfg: GenConfig) -> list[int] | None:
    """Distinct designated first-period alternatives, one per observation."""
    if not cfg.distinct_x1:
        return None
    return _rng(cfg, "slots").sample(range(cfg.sizes[0]), cfg.K)


def _budget(cfg: GenConfig, k: int, attempt: int, slot: int | None) -> frozenset:
    rng = _rng(cfg, "budget", k, attempt)
    X = cfg.space.outcomes
    if cfg.density >= 1:
        return frozenset(X)
    for _ in range(RESAMPLE_CAP):
        B = frozenset(x for x in X if rng.random() < cfg.density)
        if B and (slot is None or any(x[0] == slot for x in B)):
            return B
    raise GenerationError(f"could not draw a nonempty budget for observation {k}")


def random_instance(cfg: GenConfig) -> list[frozenset]:
    """Budgets only. With ``distinct_x1`` each budget touches its own first-period slot."""
    _validated(cfg)
    slots = _first_slots(cfg)
    return [_budget(cfg, k, 0, slots[k] if slots else None) for k in range(cfg.K)]


def random_dataset(cfg: GenConfig) -> Dataset:
    """Budgets with uniformly drawn choices (not rationalizable in general)."""
    slots = _first_slots(cfg)
    obs = []
    for k, B in enumerate(random_instance(cfg)):
        pool = sorted(x for x in B if slots is None or x[0] == slots[k])
        obs.append(Observation(B, _rng(cfg, "choice", k).choice(pool)))
    return Dataset(cfg.space, tuple(obs))


def random_preference(space: ChoiceSpace, cls: OrderClass | str, rng: random.Random) -> Preference:
    """A shuffled order; for the weak class, cut into blocks by random bars."""
    xs = list(space.outcomes)
    rng.shuffle(xs)
    if OrderClass(cls) is OrderClass.LINEAR:
        return Preference.linear(xs)
    blocks, cur = [], [xs[0]]
    for x in xs[1:]:
        if rng.random() < 0.5:
            blocks.append(cur)
            cur = []
        cur.append(x)
    blocks.append(cur)
    return Preference.from_blocks(blocks)


def random_profile(cfg: GenConfig) -> PreferenceProfile:
    space = cfg.space
    return PreferenceProfile(tuple(
        random_preference(space, cfg.order_class, _rng(cfg, "profile", t))
        for t in range(1, len(cfg.sizes) + 1)
    ))


@dataclass(frozen=True)
class Simulation:
    dataset: Dataset
    profile: PreferenceProfile
    resamples: int


def simulate(
    cfg: GenConfig,
    profile: PreferenceProfile,
    model: ModelKind | str | None = None,
) -> Simulation:
    """Choices predicted by ``profile`` under ``model`` on seeded budgets.

    A budget whose prediction is empty (or not unique where the model needs
    uniqueness, or whose first-period choice repeats under ``distinct_x1``)
    is redrawn from the next substream, at most ``RESAMPLE_CAP`` times.
    """
    _validated(cfg)
    model = ModelKind.parse(model or cfg.model)
    if model is not ModelKind.NAIVE_NASH and any(p.kind != "linear" for p in profile.prefs):
        raise GenerationError("simulation needs a linear profile unless the model is naive-Nash")
    slots = _first_slots(cfg)
    used: set = set()
    obs, resamples = [], 0
    for k in range(cfg.K):
        for attempt in range(RESAMPLE_CAP + 1):
            B = _budget(cfg, k, attempt, slots[k] if slots else None)
            pred = predict(B, profile, model)
            if not pred.outcomes:
                continue
            if model is not ModelKind.NAIVE_NASH and not pred.unique:
                continue
            x = min(pred.outcomes)
            if cfg.distinct_x1 and x[0] in used:
                continue
            break
        else:
            raise GenerationError(f"observation {k}: no usable budget after {RESAMPLE_CAP} resamples")
        resamples += attempt
        used.add(x[0])
        obs.append(Observation(B, x))
    return Simulation(Dataset(cfg.space, tuple(obs)), profile, resamples)


def generate(cfg: GenConfig) -> Simulation:
    return simulate(cfg, random_profile(cfg), cfg.model)
