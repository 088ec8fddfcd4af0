"""Ground-truth rationalizability by search over preference profiles.

Two decision procedures are provided.

``method="enumerate"`` walks the literal product of all weak (or linear)
orders, one per period, and calls :func:`onpath.rationalize.verify` on each
profile. It is only feasible on tiny spaces and is kept as the reference.

``method="search"`` (the default) decides the same question exactly on
desk-sized spaces. It builds each preference top-down one indifference block
at a time. The only thing a weak order contributes to a max-set is the first
block that meets the set, so once a constraint set has been met its max-set is
fixed, and outcomes that lie in no still-open set can be pushed to the bottom
without changing anything. Searching blocks over the union of open sets, with
memoization on the open-set family, therefore covers every weak order up to
irrelevant moves. The sophisticated model is handled by recursing over
prefixes, since the period-t preference only acts inside subtrees fixed by a
(t-1)-prefix and those subtrees are independent of each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

from onpath.core import ChoiceSpace, Dataset, Preference, projection, section, section_fixing_others
from onpath.rationalize import ModelKind, PreferenceProfile, verify


class SizeGuardError(ValueError):
    """Raised when an instance exceeds an enumeration guard."""


class OrderClass(str, Enum):
    LINEAR = "linear"
    WEAK = "weak"

    @property
    def guard(self) -> int:
        """Largest |X| accepted by literal enumeration."""
        return 6 if self is OrderClass.LINEAR else 5


SEARCH_GUARD = 12


def _check_guard(n: int, cls: OrderClass) -> None:
    if n > cls.guard:
        raise SizeGuardError(f"|X|={n} exceeds the {cls.value} enumeration guard {cls.guard}")


def enumerate_preferences(space: ChoiceSpace | Sequence, cls: OrderClass | str) -> Iterator[Preference]:
    """Every linear or weak order over the outcomes, in a fixed order.

    Weak orders are listed by number of blocks, then by the lexicographic
    order of the block-label vector (block label of each outcome in outcome
    order). Linear orders are permutations in lexicographic order.
    """
    cls = OrderClass(cls)
    outcomes = list(space.outcomes) if isinstance(space, ChoiceSpace) else list(space)
    n = len(outcomes)
    _check_guard(n, cls)
    if cls is OrderClass.LINEAR:
        for perm in itertools.permutations(outcomes):
            yield Preference.linear(perm)
        return
    for m in range(1, n + 1):
        for labels in itertools.product(range(m), repeat=n):
            if len(set(labels)) != m:
                continue
            blocks = [[] for _ in range(m)]
            for x, b in zip(outcomes, labels):
                blocks[b].append(x)
            yield Preference(tuple(frozenset(b) for b in blocks), "weak")


def count_preferences(n: int, cls: OrderClass | str) -> int:
    return sum(1 for _ in enumerate_preferences(tuple((i,) for i in range(n)), cls))


# -- single-preference constraint search ----------------------------------

UNIQUE, MEMBER = 0, 1


def _submasks(r: int, linear: bool) -> Iterator[int]:
    if linear:
        while r:
            low = r & -r
            yield low
            r ^= low
        return
    # increasing order of the submask value
    subs = []
    s = r
    while s:
        subs.append(s)
        s = (s - 1) & r
    yield from reversed(subs)


class _Solver:
    """Weak-order feasibility for constraints (kind, C, target) on bitmasks.

    UNIQUE: max(C) is a single outcome lying in ``target``.
    MEMBER: the outcome ``target`` (one bit) belongs to max(C).
    """

    def __init__(self, constraints: Sequence[tuple[int, int, int]], linear: bool):
        self.cons = list(constraints)
        self.linear = linear
        self.memo: dict[int, list[int] | None] = {}

    def solve(self) -> list[int] | None:
        return self._rec((1 << len(self.cons)) - 1)

    def _rec(self, open_: int) -> list[int] | None:
        if open_ == 0:
            return []
        if open_ in self.memo:
            return self.memo[open_]
        self.memo[open_] = None
        members = [i for i in range(len(self.cons)) if open_ >> i & 1]
        reach = 0
        for i in members:
            reach |= self.cons[i][1]
        result = None
        for block in _submasks(reach, self.linear):
            nxt = open_
            ok = True
            for i in members:
                kind, c, target = self.cons[i]
                hit = c & block
                if not hit:
                    continue
                if kind == UNIQUE:
                    if hit & (hit - 1) or not hit & target:
                        ok = False
                        break
                elif not hit & target:
                    ok = False
                    break
                nxt &= ~(1 << i)
            if not ok:
                continue
            rest = self._rec(nxt)
            if rest is not None:
                result = [block] + rest
                break
        self.memo[open_] = result
        return result


class _MaxTuples:
    """All achievable max-set tuples of a set family under one weak order.

    ``required[i]`` is a bitmask that must meet max(sets[i]) (0 for none).
    """

    def __init__(self, sets: Sequence[int], required: Sequence[int], linear: bool):
        self.sets = list(sets)
        self.req = list(required)
        self.linear = linear
        self.memo: dict[int, dict] = {}

    def all(self) -> dict[tuple, list[int]]:
        full = (1 << len(self.sets)) - 1
        out = {}
        for assign, blocks in self._rec(full).items():
            got = dict(assign)
            out[tuple(got[i] for i in range(len(self.sets)))] = blocks
        return out

    def _rec(self, open_: int) -> dict:
        if open_ == 0:
            return {(): []}
        if open_ in self.memo:
            return self.memo[open_]
        members = [i for i in range(len(self.sets)) if open_ >> i & 1]
        reach = 0
        for i in members:
            reach |= self.sets[i]
        found: dict = {}
        for block in _submasks(reach, self.linear):
            nxt, here, ok = open_, [], True
            for i in members:
                hit = self.sets[i] & block
                if not hit:
                    continue
                if self.req[i] and not hit & self.req[i]:
                    ok = False
                    break
                here.append((i, hit))
                nxt &= ~(1 << i)
            if not ok:
                continue
            for assign, blocks in self._rec(nxt).items():
                key = tuple(sorted(tuple(here) + assign))
                if key not in found:
                    found[key] = [block] + blocks
        self.memo[open_] = found
        return found


# -- profile assembly --------------------------------------------------------

class _Encoder:
    def __init__(self, space: ChoiceSpace):
        self.space = space
        self.index = space.index
        self.outcomes = space.outcomes

    def mask(self, xs) -> int:
        m = 0
        for x in xs:
            m |= 1 << self.index[x]
        return m

    def bit(self, x) -> int:
        return 1 << self.index[x]

    def members(self, m: int) -> list:
        out = []
        while m:
            low = m & -m
            out.append(self.outcomes[low.bit_length() - 1])
            m ^= low
        return out

    def preference(self, blocks: Sequence[int], linear: bool) -> Preference:
        used = 0
        parts = []
        for b in blocks:
            parts.append(frozenset(self.members(b)))
            used |= b
        rest = self.members(((1 << len(self.outcomes)) - 1) & ~used)
        if linear:
            parts.extend(frozenset([x]) for x in rest)
            return Preference(tuple(parts), "linear")
        if rest:
            parts.append(frozenset(rest))
        return Preference(tuple(parts), "weak")


def _period_constraints(dataset: Dataset, model: ModelKind, t: int, enc: _Encoder) -> list:
    T = dataset.T
    cons = []
    for o in dataset.observations:
        B, x = o.budget, o.choice
        if t == T:
            cons.append((UNIQUE, enc.mask(section(B, x[:T - 1])), enc.bit(x)))
        elif model is ModelKind.NAIVE:
            cons.append((UNIQUE, enc.mask(section(B, x[:t - 1])), enc.mask(section(B, x[:t]))))
        elif model is ModelKind.NAIVE_NASH:
            cons.append((MEMBER, enc.mask(section_fixing_others(B, x, t)), enc.bit(x)))
        else:
            cons.append((UNIQUE, enc.mask(section_fixing_others(B, x, t)), enc.bit(x)))
    return cons


def _search_separable(dataset: Dataset, model: ModelKind, linear: bool) -> PreferenceProfile | None:
    enc = _Encoder(dataset.space)
    prefs = []
    for t in range(1, dataset.T + 1):
        blocks = _Solver(_period_constraints(dataset, model, t, enc), linear).solve()
        if blocks is None:
            return None
        prefs.append(enc.preference(blocks, linear))
    return PreferenceProfile(tuple(prefs))


class _Sophisticated:
    """Prefix recursion enumerating achievable backward-induction sets."""

    def __init__(self, dataset: Dataset, linear: bool):
        self.ds = dataset
        self.T = dataset.T
        self.linear = linear
        self.enc = _Encoder(dataset.space)
        self.memo: dict[tuple, dict] = {}

    def relevant(self, prefix: tuple) -> list[int]:
        n = len(prefix)
        return [k for k, o in enumerate(self.ds.observations) if any(y[:n] == prefix for y in o.budget)]

    def options(self, prefix: tuple) -> dict:
        """Map from tuples of M^k_{l+1}(prefix) masks (over relevant k) to recipes.

        Only tuples with x^k in M^k at every prefix of x^k are kept.
        """
        if prefix in self.memo:
            return self.memo[prefix]
        n = len(prefix)
        ks = self.relevant(prefix)
        obs = self.ds.observations
        if n == self.T - 1:
            key = tuple(self.enc.mask(section(obs[k].budget, prefix)) for k in ks)
            ok = all(
                key[i] & self.enc.bit(obs[k].choice)
                for i, k in enumerate(ks) if obs[k].choice[:n] == prefix
            )
            out = {key: None} if ok else {}
            self.memo[prefix] = out
            return out
        children = sorted({a for k in ks for a in projection(obs[k].budget, prefix)})
        per_child = []
        for a in children:
            cp = prefix + (a,)
            cks = self.relevant(cp)
            contrib: dict = {}
            for okey, _ in self.options(cp).items():
                req = [
                    self.enc.bit(obs[k].choice) if obs[k].choice[:n + 1] == cp else 0
                    for k in cks
                ]
                for ckey, blocks in _MaxTuples(okey, req, self.linear).all().items():
                    if ckey not in contrib:
                        contrib[ckey] = (okey, blocks)
            if not contrib:
                self.memo[prefix] = {}
                return {}
            per_child.append((cp, cks, contrib))
        out: dict = {}
        for combo in itertools.product(*(list(c[2].items()) for c in per_child)):
            acc = {k: 0 for k in ks}
            for (cp, cks, _), (ckey, _) in zip(per_child, combo):
                for k, m in zip(cks, ckey):
                    acc[k] |= m
            key = tuple(acc[k] for k in ks)
            if key not in out:
                recipe = [
                    (cp, okey, blocks)
                    for (cp, _, _), (_, (okey, blocks)) in zip(per_child, combo)
                ]
                out[key] = recipe
        self.memo[prefix] = out
        return out

    def solve(self) -> PreferenceProfile | None:
        obs = self.ds.observations
        tried: set = set()
        for key, recipe in self.options(()).items():
            if key in tried:
                continue
            tried.add(key)
            cons = [(UNIQUE, m, self.enc.bit(obs[k].choice)) for k, m in zip(self.relevant(()), key)]
            first = _Solver(cons, self.linear).solve()
            if first is not None:
                return self._assemble(first, recipe)
        return None

    def _assemble(self, first: list[int], recipe) -> PreferenceProfile:
        per_period: dict[int, list[int]] = {t: [] for t in range(1, self.T + 1)}
        per_period[1] = list(first)
        stack = [recipe]
        while stack:
            rec = stack.pop()
            if rec is None:
                continue
            for cp, okey, blocks in rec:
                per_period[len(cp) + 1].extend(blocks)
                stack.append(self.options(cp)[okey])
        prefs = tuple(self.enc.preference(per_period[t], self.linear) for t in range(1, self.T + 1))
        return PreferenceProfile(prefs)


@dataclass(frozen=True)
class OracleResult:
    witness: PreferenceProfile | None
    method: str
    profiles_checked: int | None = None
    exhausted: bool = True

    @property
    def rationalizable(self) -> bool:
        return self.witness is not None


def _enumerate(dataset: Dataset, model: ModelKind, cls: OrderClass, max_profiles: int | None) -> OracleResult:
    prefs = list(enumerate_preferences(dataset.space, cls))
    checked = 0
    for combo in itertools.product(prefs, repeat=dataset.T):
        if max_profiles is not None and checked >= max_profiles:
            return OracleResult(None, "enumerate", checked, False)
        checked += 1
        profile = PreferenceProfile(combo)
        if verify(dataset, profile, model):
            return OracleResult(profile, "enumerate", checked)
    return OracleResult(None, "enumerate", checked)


def rationalizable_bruteforce(
    dataset: Dataset,
    model: ModelKind | str,
    cls: OrderClass | str = OrderClass.WEAK,
    method: str = "search",
    max_profiles: int | None = None,
) -> PreferenceProfile | None:
    """A rationalizing profile, or None if none exists in the class."""
    return solve(dataset, model, cls, method, max_profiles).witness


def solve(
    dataset: Dataset,
    model: ModelKind | str,
    cls: OrderClass | str = OrderClass.WEAK,
    method: str = "search",
    max_profiles: int | None = None,
) -> OracleResult:
    model = ModelKind.parse(model)
    cls = OrderClass(cls)
    n = len(dataset.space.outcomes)
    if method == "enumerate":
        _check_guard(n, cls)
        return _enumerate(dataset, model, cls, max_profiles)
    if method != "search":
        raise ValueError(f"unknown method {method!r}")
    if n > SEARCH_GUARD:
        raise SizeGuardError(f"|X|={n} exceeds the search guard {SEARCH_GUARD}")
    linear = cls is OrderClass.LINEAR
    if model is ModelKind.SOPHISTICATED:
        witness = _Sophisticated(dataset, linear).solve()
    else:
        witness = _search_separable(dataset, model, linear)
    return OracleResult(witness, "search")
