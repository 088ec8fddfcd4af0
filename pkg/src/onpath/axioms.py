"""Revealed-preference relations and the acyclicity / non-containment axioms.

An edge ``(k, s)`` of a :class:`RevealedRelation` always reads "the choice in
observation ``k`` is revealed preferred to the choice in observation ``s``".
Acyclicity axioms hold iff the edge graph has no directed cycle; failure
witnesses are shortest cycles listed along the edges (the last element points
back to the first).

Observation indices are 0-based throughout.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from onpath.core import (
    Dataset,
    Outcome,
    canonical,
    section,
    section_fixing_others,
)

EXHAUSTIVE_LIMIT = 20
DEFAULT_COND4_CAP = 12


class RelationKind(str, Enum):
    R1 = "R1"                # nested first-period sections (sophisticated)
    R2 = "R2"                # first-period section membership (naive)
    RT = "R_T"               # final-period section membership
    TLEVEL = "tLevel"        # membership in B(x_{-t})
    R1GENERAL = "R1General"  # nested sections against a union of chosen sections


class AxiomSizeError(ValueError):
    """Raised when an exhaustive scan would exceed its hard size limit."""


@dataclass(frozen=True)
class RevealedRelation:
    kind: RelationKind
    edges: frozenset
    witnesses: dict = field(compare=False, hash=False, default_factory=dict)
    t: int | None = None
    size: int = 0

    def successors(self, k: int) -> list[int]:
        return sorted(s for (a, s) in self.edges if a == k)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "t": self.t,
            "edges": [list(e) for e in sorted(self.edges)],
        }


@dataclass(frozen=True)
class AxiomVerdict:
    axiom: str
    holds: bool | None
    witness: dict = field(default_factory=dict)
    mode: str = "definition"
    exhaustive: bool = True
    metadata: dict = field(default_factory=dict)

    @property
    def inconclusive(self) -> bool:
        return self.holds is None

    def to_json(self) -> dict:
        out = {
            "axiom": self.axiom,
            "holds": self.holds,
            "witness": self.witness,
            "mode": self.mode,
            "exhaustive": self.exhaustive,
        }
        if self.metadata:
            out["metadata"] = self.metadata
        return out


# -- relation construction --------------------------------------------------

def _first(x: Outcome) -> tuple:
    return x[:1]


def _chosen_union(dataset: Dataset, s: int) -> frozenset:
    """Union of B^t(x^t_1) over observations t whose choice lies in B^s(x^s_1)."""
    B, X = dataset.budgets, dataset.choices
    inner = section(B[s], _first(X[s]))
    out: set = set()
    for t in range(len(dataset)):
        if X[t] in inner:
            out |= section(B[t], _first(X[t]))
    return frozenset(out)


def build_relation(dataset: Dataset, kind: RelationKind | str, t: int | None = None) -> RevealedRelation:
    kind = RelationKind(kind)
    T = dataset.T
    if kind is RelationKind.TLEVEL:
        if t is None or not 1 <= t <= T:
            raise ValueError(f"period t={t} out of range 1..{T}")
    elif kind is RelationKind.RT:
        t = T
    else:
        t = None
    B, X = dataset.budgets, dataset.choices
    n = len(dataset)
    unions = [_chosen_union(dataset, s) for s in range(n)] if kind is RelationKind.R1GENERAL else None
    edges, wit = set(), {}
    for k in range(n):
        for s in range(n):
            if k == s or X[k] == X[s]:
                continue
            if kind is RelationKind.R2:
                sec = section(B[k], _first(X[k]))
                if X[s] in sec:
                    edges.add((k, s))
                    wit[(k, s)] = {"member": list(X[s]), "section": canonical(sec)}
            elif kind in (RelationKind.RT, RelationKind.TLEVEL):
                sec = section_fixing_others(B[k], X[k], t)
                if X[s] in sec:
                    edges.add((k, s))
                    wit[(k, s)] = {"member": list(X[s]), "section": canonical(sec)}
            elif kind is RelationKind.R1:
                inner = section(B[k], _first(X[s]))
                outer = section(B[s], _first(X[s]))
                if X[s] in inner and inner <= outer:
                    edges.add((k, s))
                    wit[(k, s)] = {"member": list(X[s]), "inner": canonical(inner), "outer": canonical(outer)}
            else:
                inner = section(B[k], _first(X[s]))
                if X[s] in inner and inner <= unions[s]:
                    edges.add((k, s))
                    wit[(k, s)] = {"member": list(X[s]), "inner": canonical(inner), "outer": canonical(unions[s])}
    return RevealedRelation(kind, frozenset(edges), wit, t, n)


def verify_edge(dataset: Dataset, kind: RelationKind | str, k: int, s: int, t: int | None = None) -> bool:
    """Re-check one edge against the raw definition by literal membership scans."""
    kind = RelationKind(kind)
    B, X = dataset.budgets, dataset.choices
    if k == s or X[k] == X[s]:
        return False
    xs = X[s]
    if kind is RelationKind.R2:
        return any(y == xs for y in B[k] if y[0] == X[k][0])
    if kind in (RelationKind.RT, RelationKind.TLEVEL):
        t = dataset.T if kind is RelationKind.RT else t
        i = t - 1
        return any(
            y == xs for y in B[k] if all(y[j] == X[k][j] for j in range(dataset.T) if j != i)
        )
    inner = [y for y in B[k] if y[0] == xs[0]]
    if xs not in inner:
        return False
    if kind is RelationKind.R1:
        return all(y in B[s] for y in inner)
    chosen = [
        q for q in range(len(dataset))
        if X[q][0] == xs[0] and X[q] in B[s]
    ]
    return all(any(y in B[q] and y[0] == X[q][0] for q in chosen) for y in inner)


def shortest_cycle(nodes: int, edges: Iterable[tuple[int, int]]) -> list[int] | None:
    """Shortest directed cycle by BFS from every node; None if acyclic.

    Ties go to the lowest start node, and the cycle is rotated so its smallest
    node comes first.
    """
    adj: dict[int, list[int]] = {v: [] for v in range(nodes)}
    for a, b in edges:
        adj[a].append(b)
    for v in adj:
        adj[v].sort()
    best = None
    for start in range(nodes):
        parent = {start: None}
        queue = deque([start])
        found = None
        while queue and found is None:
            v = queue.popleft()
            for w in adj[v]:
                if w == start:
                    found = v
                    break
                if w not in parent:
                    parent[w] = v
                    queue.append(w)
        if found is None:
            continue
        path = [found]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        cyc = path[::-1]
        if best is None or len(cyc) < len(best):
            best = cyc
    if best is None:
        return None
    i = best.index(min(best))
    return best[i:] + best[:i]


def has_cycle(rel: RevealedRelation, axiom: str | None = None) -> AxiomVerdict:
    """Acyclicity verdict: ``holds`` is True iff the relation has no cycle."""
    nodes = max([rel.size] + [max(e) + 1 for e in rel.edges])
    cyc = shortest_cycle(nodes, rel.edges)
    name = axiom or f"acyclic:{rel.kind.value}"
    if cyc is None:
        return AxiomVerdict(name, True, {})
    return AxiomVerdict(name, False, {"cycle": cyc})


def cycle_is_valid(rel: RevealedRelation, cycle: Sequence[int]) -> bool:
    n = len(cycle)
    return n >= 2 and all((cycle[i], cycle[(i + 1) % n]) in rel.edges for i in range(n))


def check_nsarp(dataset: Dataset) -> AxiomVerdict:
    return has_cycle(build_relation(dataset, RelationKind.R2), "nsarp")


def check_nnsarp(dataset: Dataset) -> AxiomVerdict:
    """Acyclicity of membership in B(., x_2); defined for T=2 data."""
    if dataset.T != 2:
        raise ValueError("NN-SARP is stated for two periods; use check_tsarp(dataset, 1)")
    return has_cycle(build_relation(dataset, RelationKind.TLEVEL, 1), "nnsarp")


def check_tsarp(dataset: Dataset, t: int) -> AxiomVerdict:
    return has_cycle(build_relation(dataset, RelationKind.TLEVEL, t), f"tsarp:{t}")


def check_condition2(dataset: Dataset) -> AxiomVerdict:
    return has_cycle(build_relation(dataset, RelationKind.R1), "condition2")


def check_condition3(dataset: Dataset) -> AxiomVerdict:
    return has_cycle(build_relation(dataset, RelationKind.R1GENERAL), "condition3")


# -- Condition 1 / Condition 5 ----------------------------------------------

class _Masks:
    """Bitmask encoding of outcome sets for one dataset."""

    def __init__(self, dataset: Dataset):
        self.index = dataset.space.index
        self.outcomes = dataset.space.outcomes

    def mask(self, xs: Iterable[Outcome]) -> int:
        m = 0
        for x in xs:
            m |= 1 << self.index[x]
        return m

    def lowest(self, m: int) -> Outcome:
        # outcomes are indexed lexicographically, so the lowest bit is the lex-min
        return self.outcomes[(m & -m).bit_length() - 1]


def _level_sets(dataset: Dataset, t: int, enc: _Masks) -> tuple[list[int], list[int]]:
    """A_k = B^k(x^k_t), C_k = B^k(x^k_{t-1}) minus A_k, as bitmasks."""
    A, C = [], []
    for obs in dataset.observations:
        a = section(obs.budget, obs.choice[:t])
        c = section(obs.budget, obs.choice[:t - 1]) - a
        A.append(enc.mask(a))
        C.append(enc.mask(c))
    return A, C


def _greedy(A: list[int], C: list[int], enc: _Masks) -> tuple[bool, list[int], list[Outcome], list[int]]:
    # Greedy elimination is complete: the witness property "some s in S has
    # A_s not covered by the union of C_k over S" is monotone in S (shrinking
    # S only shrinks the union), so elimination in any order succeeds iff every
    # nonempty subset has a witness, which is the non-containment condition.
    remaining = list(range(len(A)))
    order, ys = [], []
    while remaining:
        cover = 0
        for k in remaining:
            cover |= C[k]
        for s in remaining:
            free = A[s] & ~cover
            if free:
                order.append(s)
                ys.append(enc.lowest(free))
                remaining.remove(s)
                break
        else:
            return False, order, ys, remaining
    return True, order, ys, []


def _exhaustive(A: list[int], C: list[int]) -> list[int] | None:
    n = len(A)
    if n > EXHAUSTIVE_LIMIT:
        raise AxiomSizeError(f"exhaustive subset scan refuses |K|={n} > {EXHAUSTIVE_LIMIT}")
    for size in range(1, n + 1):
        for S in itertools.combinations(range(n), size):
            ua = uc = 0
            for k in S:
                ua |= A[k]
                uc |= C[k]
            if ua & ~uc == 0:
                return list(S)
    return None


def _level_verdict(dataset: Dataset, t: int, mode: str, name: str) -> AxiomVerdict:
    enc = _Masks(dataset)
    A, C = _level_sets(dataset, t, enc)
    if mode == "greedy":
        ok, order, ys, stuck = _greedy(A, C, enc)
        if ok:
            return AxiomVerdict(name, True, {"order": order, "y": [list(y) for y in ys]}, "greedy")
        return AxiomVerdict(name, False, {"subset": stuck}, "greedy")
    if mode == "exhaustive":
        S = _exhaustive(A, C)
        if S is None:
            return AxiomVerdict(name, True, {}, "exhaustive")
        return AxiomVerdict(name, False, {"subset": S}, "exhaustive")
    raise ValueError(f"unknown mode {mode!r}")


def check_condition1(dataset: Dataset, mode: str = "greedy") -> AxiomVerdict:
    return _level_verdict(dataset, 1, mode, "condition1")


def check_condition5(dataset: Dataset, mode: str = "greedy") -> AxiomVerdict:
    per_t = {}
    holds = True
    for t in range(1, dataset.T + 1):
        v = _level_verdict(dataset, t, mode, f"condition5:{t}")
        per_t[str(t)] = v.witness | {"holds": v.holds}
        holds = holds and v.holds
    return AxiomVerdict("condition5", holds, {"levels": per_t}, mode)


def elimination_chain(dataset: Dataset, t: int) -> tuple[list[int], list[Outcome]] | None:
    """Elimination order and witnesses y^s at level t, or None on failure."""
    enc = _Masks(dataset)
    A, C = _level_sets(dataset, t, enc)
    ok, order, ys, _ = _greedy(A, C, enc)
    return (order, ys) if ok else None


def subset_violates(dataset: Dataset, S: Sequence[int], t: int = 1) -> bool:
    """Literal containment test for one subset at level t."""
    B, X = dataset.budgets, dataset.choices
    lhs = set().union(*(section(B[k], X[k][:t]) for k in S))
    rhs = set().union(*(section(B[k], X[k][:t - 1]) - section(B[k], X[k][:t]) for k in S))
    return lhs <= rhs


# -- Condition 4 ------------------------------------------------------------

def _transitive_outcomes(dataset: Dataset, rel: RevealedRelation) -> set:
    """Pairs (a, b) of outcomes with a tran(rel) b, closing over outcome identity."""
    X = dataset.choices
    succ: dict = {}
    for k, s in rel.edges:
        succ.setdefault(X[k], set()).add(X[s])
    closure = set()
    for a in succ:
        stack, seen = list(succ[a]), set()
        while stack:
            b = stack.pop()
            if b in seen:
                continue
            seen.add(b)
            stack.extend(succ.get(b, ()))
        closure |= {(a, b) for b in seen}
    return closure


def check_condition4(
    dataset: Dataset,
    cap: int = DEFAULT_COND4_CAP,
    s_scope: str = "all",
) -> AxiomVerdict:
    """Bounded search for a Condition-4 violating sequence.

    A sequence of pairs only matters as a set ``Q`` of pairs ``(k_l, s_l)``.
    For fixed ``Q`` the best admissible ``S`` is the largest one allowed by the
    membership clause, so it suffices to scan subsets ``Q`` up to size ``cap``.
    ``s_scope`` is ``"all"`` (S ranges over K) or ``"sequence"`` (S restricted
    to indices appearing in the pairs).
    """
    if s_scope not in ("all", "sequence"):
        raise ValueError(f"unknown s_scope {s_scope!r}")
    B, X = dataset.budgets, dataset.choices
    n = len(dataset)
    enc = _Masks(dataset)
    tran = _transitive_outcomes(dataset, build_relation(dataset, RelationKind.R1GENERAL))
    r2 = build_relation(dataset, RelationKind.R2).edges
    unions = [enc.mask(_chosen_union(dataset, s)) for s in range(n)]
    own = [enc.mask(section(B[s], _first(X[s]))) for s in range(n)]

    pairs, dmask = [], []
    for k in range(n):
        for s in range(n):
            if (X[s], X[k]) not in tran or X[s][0] == X[k][0]:
                continue
            inner = section(B[k], _first(X[s]))
            if X[s] not in inner:
                continue
            pairs.append((k, s))
            dmask.append(enc.mask(inner) & ~unions[s])
    allowed = []
    for k, s in pairs:
        allowed.append({q for q in range(n) if (s, q) in r2 or X[s] == X[q]})

    meta = {"s_scope": s_scope, "cap": cap, "pairs": len(pairs)}
    limit = min(cap, len(pairs))
    for size in range(1, limit + 1):
        for Q in itertools.combinations(range(len(pairs)), size):
            S = set().union(*(allowed[i] for i in Q))
            if s_scope == "sequence":
                S &= {j for i in Q for j in pairs[i]}
            lhs = 0
            for i in Q:
                lhs |= dmask[i]
            rhs = 0
            for q in S:
                rhs |= own[q]
            if lhs & ~rhs == 0:
                witness = {
                    "pairs": [list(pairs[i]) for i in Q],
                    "subset": sorted(S),
                }
                return AxiomVerdict("condition4", False, witness, "bounded", True, meta)
    exhaustive = cap >= len(pairs)
    if exhaustive:
        return AxiomVerdict("condition4", True, {}, "bounded", True, meta)
    return AxiomVerdict(
        "condition4", None, {}, "bounded", False, meta | {"status": "inconclusive within caps"}
    )


# -- dispatch ---------------------------------------------------------------

AXIOM_IDS = ("nsarp", "nnsarp", "tsarp", "cond1", "cond2", "cond3", "cond4", "cond5")
_ALIASES = {
    "condition1": "cond1", "condition2": "cond2", "condition3": "cond3",
    "condition4": "cond4", "condition5": "cond5",
}


def normalize_axiom(name: str) -> str:
    name = name.strip().lower().replace("-", "")
    name = _ALIASES.get(name, name)
    if name not in AXIOM_IDS:
        raise ValueError(f"unknown axiom {name!r}")
    return name


def check(dataset: Dataset, axiom: str, mode: str = "greedy", t: int | None = None) -> list[AxiomVerdict]:
    """Run one axiom by id; ``tsarp`` without ``t`` runs every period."""
    a = normalize_axiom(axiom)
    if a == "nsarp":
        return [check_nsarp(dataset)]
    if a == "nnsarp":
        return [check_tsarp(dataset, 1) if dataset.T != 2 else check_nnsarp(dataset)]
    if a == "tsarp":
        ts = [t] if t is not None else range(1, dataset.T + 1)
        return [check_tsarp(dataset, q) for q in ts]
    if a == "cond1":
        return [check_condition1(dataset, mode)]
    if a == "cond2":
        return [check_condition2(dataset)]
    if a == "cond3":
        return [check_condition3(dataset)]
    if a == "cond4":
        return [check_condition4(dataset)]
    return [check_condition5(dataset, mode)]
