"""Behavioral semantics (what a profile predicts on a budget) and the
constructive rationalization procedures.

Every "max(...) = x" clause is read as "the max-set is exactly {x}", and every
"x in max(...)" clause as membership.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from onpath.axioms import (
    AxiomVerdict,
    RelationKind,
    build_relation,
    check_condition1,
    check_condition2,
    check_condition5,
    check_tsarp,
    elimination_chain,
)
from onpath.core import (
    ChoiceSpace,
    Dataset,
    Outcome,
    Preference,
    max_set,
    projection,
    section,
    section_fixing_others,
)


class ModelKind(str, Enum):
    NAIVE = "naive"
    NAIVE_NASH = "nash"
    STRICT_NAIVE_NASH = "strict-nash"
    SOPHISTICATED = "sophisticated"

    @classmethod
    def parse(cls, name: "str | ModelKind") -> "ModelKind":
        if isinstance(name, ModelKind):
            return name
        key = name.strip().lower().replace("_", "-")
        aliases = {"naive-nash": "nash", "naivenash": "nash", "strictnaivenash": "strict-nash",
                   "strict-naive-nash": "strict-nash", "soph": "sophisticated"}
        return cls(aliases.get(key, key))


class RationalizationError(ValueError):
    """A construction's precondition failed; ``verdict`` carries the witness."""

    def __init__(self, message: str, verdict: AxiomVerdict | None = None):
        super().__init__(message)
        self.verdict = verdict


class UnsupportedCase(RationalizationError):
    pass


@dataclass(frozen=True)
class PreferenceProfile:
    prefs: tuple[Preference, ...]

    def __len__(self) -> int:
        return len(self.prefs)

    def __getitem__(self, t: int) -> Preference:
        """1-based period access: ``profile[1]`` is the first-period preference."""
        return self.prefs[t - 1]

    def problems(self, space: ChoiceSpace) -> list[str]:
        out = []
        if len(self.prefs) != space.periods:
            out.append(f"{len(self.prefs)} preferences for {space.periods} periods")
        for t, p in enumerate(self.prefs, 1):
            out.extend(f"period {t}: {msg}" for msg in p.problems(space))
        return out

    def to_json(self) -> dict:
        return {"prefs": [p.to_json() for p in self.prefs]}

    @classmethod
    def from_json(cls, obj: dict) -> "PreferenceProfile":
        return cls(tuple(Preference.from_json(p) for p in obj["prefs"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


@dataclass(frozen=True)
class BackwardInductionSets:
    """M_t(prefix) for every reachable prefix; key length is t-1."""

    sets: dict = field(hash=False)

    def M(self, prefix: Sequence[int]) -> frozenset:
        return self.sets[tuple(prefix)]


@dataclass(frozen=True)
class Prediction:
    outcomes: frozenset
    unique: bool
    detail: dict = field(default_factory=dict, hash=False, compare=False)


# -- semantics ---------------------------------------------------------------

def backward_induction(budget: frozenset, profile: PreferenceProfile) -> BackwardInductionSets:
    T = len(profile)
    sets: dict = {}

    def M(prefix: tuple) -> frozenset:
        t = len(prefix) + 1
        if t == T:
            out = section(budget, prefix)
        else:
            out = frozenset().union(*(
                max_set(M(prefix + (a,)), profile[t + 1])
                for a in projection(budget, prefix)
            ))
        sets[prefix] = out
        return out

    M(())
    return BackwardInductionSets(sets)


def _naive_path(budget: frozenset, profile: PreferenceProfile) -> frozenset:
    T = len(profile)
    prefix: tuple = ()
    for t in range(1, T):
        top = max_set(section(budget, prefix), profile[t])
        if len(top) != 1:
            return frozenset()
        (plan,) = top
        prefix = plan[:t]
    top = max_set(section(budget, prefix), profile[T])
    return top if len(top) == 1 else frozenset()


def satisfies(budget: frozenset, x: Outcome, profile: PreferenceProfile, model: ModelKind) -> bool:
    """Whether choice x from budget meets the model's defining equations."""
    model = ModelKind.parse(model)
    T = len(profile)
    if x not in budget:
        return False
    if model is ModelKind.SOPHISTICATED:
        m1 = backward_induction(budget, profile).M(())
        return max_set(m1, profile[1]) == {x}
    if model is ModelKind.NAIVE:
        for t in range(1, T):
            top = max_set(section(budget, x[:t - 1]), profile[t])
            if len(top) != 1 or not next(iter(top))[:t] == x[:t]:
                return False
        return max_set(section(budget, x[:T - 1]), profile[T]) == {x}
    final = max_set(section(budget, x[:T - 1]), profile[T]) == {x}
    if not final:
        return False
    for t in range(1, T):
        top = max_set(section_fixing_others(budget, x, t), profile[t])
        if model is ModelKind.NAIVE_NASH and x not in top:
            return False
        if model is ModelKind.STRICT_NAIVE_NASH and top != {x}:
            return False
    return True


def predict(budget: frozenset, profile: PreferenceProfile, model: ModelKind | str) -> Prediction:
    model = ModelKind.parse(model)
    if model is ModelKind.SOPHISTICATED:
        bi = backward_induction(budget, profile)
        top = max_set(bi.M(()), profile[1])
        return Prediction(top, len(top) == 1, {"M1": sorted(bi.M(()))})
    if model is ModelKind.NAIVE:
        out = _naive_path(budget, profile)
        return Prediction(out, len(out) == 1)
    out = frozenset(x for x in budget if satisfies(budget, x, profile, model))
    return Prediction(out, len(out) == 1)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    failures: tuple[int, ...]

    def __bool__(self) -> bool:
        return self.ok


def verify(dataset: Dataset, profile: PreferenceProfile, model: ModelKind | str) -> VerifyResult:
    model = ModelKind.parse(model)
    bad = tuple(
        k for k, o in enumerate(dataset.observations)
        if not satisfies(o.budget, o.choice, profile, model)
    )
    return VerifyResult(not bad, bad)


# -- constructions -----------------------------------------------------------

def _topological_order(dataset: Dataset, edges: Iterable[tuple[int, int]], space: ChoiceSpace) -> list[Outcome]:
    """Observed choices ordered to extend the edges, then every other outcome.

    Ties are broken by lexicographic outcome order (Kahn's algorithm with a
    sorted frontier).
    """
    X = dataset.choices
    observed = sorted(set(X))
    succ = {x: set() for x in observed}
    indeg = {x: 0 for x in observed}
    for k, s in edges:
        a, b = X[k], X[s]
        if b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    frontier = sorted(x for x in observed if indeg[x] == 0)
    order = []
    while frontier:
        x = frontier.pop(0)
        order.append(x)
        for y in sorted(succ[x]):
            indeg[y] -= 1
            if indeg[y] == 0:
                frontier.append(y)
        frontier.sort()
    if len(order) != len(observed):
        raise RationalizationError("revealed relation has a cycle")
    seen = set(order)
    return order + [x for x in space.outcomes if x not in seen]


def _chain_order(head: Iterable[Outcome], space: ChoiceSpace) -> list[Outcome]:
    out, seen = [], set()
    for y in head:
        if y not in seen:
            out.append(y)
            seen.add(y)
    return out + [x for x in space.outcomes if x not in seen]


def construct_naive(dataset: Dataset) -> PreferenceProfile:
    T, space = dataset.T, dataset.space
    final = check_tsarp(dataset, T)
    if not final.holds:
        raise RationalizationError(f"{T}-SARP fails", final)
    cond = check_condition1(dataset) if T == 2 else check_condition5(dataset)
    if not cond.holds:
        raise RationalizationError("elimination condition fails", cond)
    prefs = []
    for t in range(1, T):
        order, ys = elimination_chain(dataset, t)
        prefs.append(Preference.linear(_chain_order(ys, space)))
    prefs.append(Preference.linear(_topological_order(dataset, build_relation(dataset, RelationKind.RT).edges, space)))
    return PreferenceProfile(tuple(prefs))


def construct_sophisticated(dataset: Dataset) -> PreferenceProfile:
    if not dataset.distinct_first_choices():
        raise UnsupportedCase("construction requires pairwise-distinct first-period choices")
    v = check_condition2(dataset)
    if not v.holds:
        raise RationalizationError("Condition 2 fails", v)
    space = dataset.space
    first = Preference.linear(
        _topological_order(dataset, build_relation(dataset, RelationKind.R1).edges, space)
    )
    by_first = {o.choice[0]: o for o in dataset.observations}
    second: list[Outcome] = []
    for a in range(space.sizes[0]):
        slice_ = [x for x in space.outcomes if x[0] == a]
        if a not in by_first:
            second.extend(slice_)
            continue
        obs = by_first[a]
        own = section(obs.budget, (a,))
        second.extend(x for x in slice_ if x not in own)
        second.append(obs.choice)
        second.extend(x for x in slice_ if x in own and x != obs.choice)
    later = Preference.linear(second)
    return PreferenceProfile((first,) + (later,) * (dataset.T - 1))


def construct_strict_nash(dataset: Dataset) -> PreferenceProfile:
    space = dataset.space
    prefs = []
    for t in range(1, dataset.T + 1):
        v = check_tsarp(dataset, t)
        if not v.holds:
            raise RationalizationError(f"{t}-SARP fails", v)
        rel = build_relation(dataset, RelationKind.TLEVEL, t)
        prefs.append(Preference.linear(_topological_order(dataset, rel.edges, space)))
    return PreferenceProfile(tuple(prefs))


def construct_naive_nash(dataset: Dataset) -> PreferenceProfile:
    """Total indifference before the last period, an R_T extension at the last."""
    T, space = dataset.T, dataset.space
    v = check_tsarp(dataset, T)
    if not v.holds:
        raise RationalizationError(f"{T}-SARP fails", v)
    flat = Preference.indifferent(space.outcomes)
    last = Preference.linear(_topological_order(dataset, build_relation(dataset, RelationKind.RT).edges, space))
    return PreferenceProfile((flat,) * (T - 1) + (last,))


CONSTRUCTORS = {
    ModelKind.NAIVE: construct_naive,
    ModelKind.NAIVE_NASH: construct_naive_nash,
    ModelKind.STRICT_NAIVE_NASH: construct_strict_nash,
    ModelKind.SOPHISTICATED: construct_sophisticated,
}


def construct(dataset: Dataset, model: ModelKind | str) -> PreferenceProfile:
    return CONSTRUCTORS[ModelKind.parse(model)](dataset)
