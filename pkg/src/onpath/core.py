"""Finite choice spaces, budgets, observations, datasets and preferences.

Outcomes are tuples of 0-based indices, one per period. Periods are
referred to 1-based (``t = 1..T``) in every public function, so that a
prefix of length ``t`` fixes periods ``1..t``.

All containers are immutable; sets of outcomes are ``frozenset`` and every
emitted sequence is sorted lexicographically.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Sequence

Outcome = tuple[int, ...]
OutcomeSet = frozenset  # frozenset[Outcome]; a budget is a nonempty OutcomeSet


class DatasetError(ValueError):
    """Raised when a dataset fails validation or cannot be parsed."""

    def __init__(self, message: str, violations: Sequence["Violation"] = ()):
        super().__init__(message)
        self.violations = list(violations)


@dataclass(frozen=True)
class Violation:
    observation: int | None
    reason: str

    def to_json(self) -> dict:
        return {"observation": self.observation, "reason": self.reason}


@dataclass(frozen=True)
class ChoiceSpace:
    periods: int
    alternatives: tuple[tuple[str, ...], ...]

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "ChoiceSpace":
        alts = tuple(tuple(f"x{t + 1}_{i}" for i in range(n)) for t, n in enumerate(sizes))
        return cls(len(sizes), alts)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.alternatives)

    @cached_property
    def outcomes(self) -> tuple[Outcome, ...]:
        """Every outcome of X in lexicographic order."""
        return tuple(itertools.product(*(range(n) for n in self.sizes)))

    @cached_property
    def index(self) -> dict[Outcome, int]:
        return {x: i for i, x in enumerate(self.outcomes)}

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.periods and all(
            isinstance(c, int) and 0 <= c < n for c, n in zip(x, self.sizes)
        )

    def label(self, x: Outcome) -> tuple[str, ...]:
        return tuple(self.alternatives[t][c] for t, c in enumerate(x))

    def problems(self) -> list[str]:
        out = []
        if self.periods < 2:
            out.append(f"need at least 2 periods, got {self.periods}")
        if len(self.alternatives) != self.periods:
            out.append(
                f"{len(self.alternatives)} alternative lists for {self.periods} periods"
            )
        for t, alts in enumerate(self.alternatives):
            if not alts:
                out.append(f"period {t + 1} has no alternatives")
            if len(set(alts)) != len(alts):
                out.append(f"duplicate labels in period {t + 1}")
        return out


@dataclass(frozen=True)
class Observation:
    budget: frozenset
    choice: Outcome


@dataclass(frozen=True)
class Dataset:
    space: ChoiceSpace
    observations: tuple[Observation, ...]

    @classmethod
    def build(
        cls,
        space: ChoiceSpace,
        rows: Iterable[tuple[Iterable[Sequence[int]], Sequence[int]]],
    ) -> "Dataset":
        """Convenience constructor from ``(budget members, choice)`` pairs."""
        obs = tuple(
            Observation(frozenset(tuple(m) for m in budget), tuple(choice))
            for budget, choice in rows
        )
        return cls(space, obs)

    def __len__(self) -> int:
        return len(self.observations)

    @property
    def T(self) -> int:
        return self.space.periods

    @property
    def budgets(self) -> list[frozenset]:
        return [o.budget for o in self.observations]

    @property
    def choices(self) -> list[Outcome]:
        return [o.choice for o in self.observations]

    def distinct_first_choices(self) -> bool:
        firsts = [x[0] for x in self.choices]
        return len(set(firsts)) == len(firsts)

    def permuted(self, order: Sequence[int]) -> "Dataset":
        return Dataset(self.space, tuple(self.observations[i] for i in order))


@dataclass(frozen=True)
class Preference:
    """A weak order over X stored as an ordered partition (best block first)."""

    blocks: tuple[frozenset, ...]
    kind: str = "weak"

    def __post_init__(self):
        if self.kind not in ("weak", "linear"):
            raise ValueError(f"unknown preference kind {self.kind!r}")
        if self.kind == "linear" and any(len(b) != 1 for b in self.blocks):
            raise ValueError("linear preference with a non-singleton block")

    @classmethod
    def linear(cls, order: Iterable[Outcome]) -> "Preference":
        return cls(tuple(frozenset([x]) for x in order), "linear")

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[Outcome]]) -> "Preference":
        bl = tuple(frozenset(b) for b in blocks)
        kind = "linear" if all(len(b) == 1 for b in bl) else "weak"
        return cls(bl, kind)

    @classmethod
    def indifferent(cls, outcomes: Iterable[Outcome]) -> "Preference":
        return cls((frozenset(outcomes),), "weak")

    @cached_property
    def rank(self) -> dict[Outcome, int]:
        return {x: i for i, b in enumerate(self.blocks) for x in b}

    def prefers(self, x: Outcome, y: Outcome) -> bool:
        """Strict preference x > y."""
        return self.rank[x] < self.rank[y]

    def problems(self, space: ChoiceSpace) -> list[str]:
        seen: set = set()
        out = []
        for b in self.blocks:
            if not b:
                out.append("empty block")
            if seen & b:
                out.append("outcome listed in two blocks")
            seen |= b
        if seen != set(space.outcomes):
            out.append("blocks do not partition X")
        return out

    def to_json(self) -> dict:
        return {"blocks": [[list(x) for x in sorted(b)] for b in self.blocks]}

    @classmethod
    def from_json(cls, obj: dict) -> "Preference":
        return cls.from_blocks([[tuple(x) for x in b] for b in obj["blocks"]])


def validate(dataset: Dataset) -> list[Violation]:
    """Every invariant violation of ``dataset``; empty means valid."""
    space = dataset.space
    report = [Violation(None, p) for p in space.problems()]
    if not dataset.observations:
        report.append(Violation(None, "dataset has no observations"))
    for k, obs in enumerate(dataset.observations):
        if not obs.budget:
            report.append(Violation(k, "empty budget"))
        for x in sorted(obs.budget, key=repr):
            if len(x) != space.periods:
                report.append(
                    Violation(k, f"budget outcome {list(x)} has arity {len(x)}, expected {space.periods}")
                )
            elif not space.contains(x):
                report.append(Violation(k, f"budget outcome {list(x)} has an unknown alternative index"))
        x = obs.choice
        if len(x) != space.periods:
            report.append(Violation(k, f"choice {list(x)} has arity {len(x)}, expected {space.periods}"))
        elif not space.contains(x):
            report.append(Violation(k, f"choice {list(x)} has an unknown alternative index"))
        elif x not in obs.budget:
            report.append(Violation(k, f"choice {list(x)} is not in the budget"))
    return report


def section(budget: Iterable[Outcome], prefix: Sequence[int]) -> frozenset:
    """B(x_t): members of ``budget`` agreeing with ``prefix`` on periods 1..len(prefix)."""
    prefix = tuple(prefix)
    n = len(prefix)
    return frozenset(x for x in budget if x[:n] == prefix)


def section_fixing_others(budget: Iterable[Outcome], fixed: Sequence, t: int) -> frozenset:
    """B(x_{-t}): members agreeing with ``fixed`` on every period except ``t``.

    ``fixed`` is a full-length outcome; its period-``t`` entry is ignored and may
    be ``None``.
    """
    i = t - 1
    fixed = tuple(fixed)
    return frozenset(
        x for x in budget if x[:i] == fixed[:i] and x[i + 1:] == fixed[i + 1:]
    )


def projection(budget: Iterable[Outcome], prefix: Sequence[int]) -> list[int]:
    """B_{t}(x_{t-1}): available next-period indices after ``prefix``, sorted."""
    prefix = tuple(prefix)
    n = len(prefix)
    return sorted({x[n] for x in budget if x[:n] == prefix})


def max_set(candidates: Iterable[Outcome], pref: Preference) -> frozenset:
    cands = list(candidates)
    if not cands:
        raise ValueError("empty choice set")
    rank = pref.rank
    best = min(rank[x] for x in cands)
    return frozenset(x for x in cands if rank[x] == best)


def canonical(xs: Iterable[Outcome]) -> list[list[int]]:
    return [list(x) for x in sorted(xs)]


# -- JSON -------------------------------------------------------------------

def dataset_to_json(dataset: Dataset) -> dict:
    return {
        "periods": dataset.space.periods,
        "alternatives": [list(a) for a in dataset.space.alternatives],
        "observations": [
            {"budget": canonical(o.budget), "choice": list(o.choice)}
            for o in dataset.observations
        ],
    }


def dumps_dataset(dataset: Dataset) -> str:
    return json.dumps(dataset_to_json(dataset), separators=(",", ":"))


def dataset_from_json(obj: Any, check: bool = True) -> Dataset:
    try:
        periods = obj["periods"]
        alts = tuple(tuple(str(a) for a in lst) for lst in obj["alternatives"])
        rows = []
        for i, o in enumerate(obj["observations"]):
            budget = frozenset(tuple(int(c) for c in m) for m in o["budget"])
            rows.append(Observation(budget, tuple(int(c) for c in o["choice"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetError(f"malformed dataset: {exc!r}") from exc
    if not isinstance(periods, int):
        raise DatasetError("malformed dataset: 'periods' must be an integer")
    ds = Dataset(ChoiceSpace(periods, alts), tuple(rows))
    if check:
        report = validate(ds)
        if report:
            lines = "; ".join(
                f"observation {v.observation}: {v.reason}" if v.observation is not None else v.reason
                for v in report
            )
            raise DatasetError(f"invalid dataset: {lines}", report)
    return ds


def loads_dataset(text: str, check: bool = True) -> Dataset:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"JSON parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return dataset_from_json(obj, check=check)


def load_dataset(path) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return loads_dataset(fh.read())
