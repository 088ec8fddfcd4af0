"""Hypothesis strategies for small choice spaces, datasets and profiles."""

from hypothesis import strategies as st

from onpath.core import ChoiceSpace, Dataset, Observation, Preference
from onpath.rationalize import PreferenceProfile


@st.composite
def spaces(draw, periods=st.just(2), max_size=3):
    T = draw(periods)
    sizes = draw(st.lists(st.integers(1, max_size), min_size=T, max_size=T))
    return ChoiceSpace.from_sizes(sizes)


@st.composite
def datasets(draw, periods=st.just(2), max_size=3, max_K=3, distinct_x1=False):
    space = draw(spaces(periods, max_size))
    X = list(space.outcomes)
    K = draw(st.integers(1, min(max_K, space.sizes[0]) if distinct_x1 else max_K))
    firsts = draw(st.permutations(range(space.sizes[0])))[:K] if distinct_x1 else [None] * K
    obs = []
    for k in range(K):
        budget = draw(st.sets(st.sampled_from(X), min_size=1))
        pool = sorted(x for x in budget if firsts[k] is None or x[0] == firsts[k])
        if not pool:
            pool = [draw(st.sampled_from([x for x in X if x[0] == firsts[k]]))]
            budget = budget | {pool[0]}
        obs.append(Observation(frozenset(budget), draw(st.sampled_from(pool))))
    return Dataset(space, tuple(obs))


@st.composite
def preferences(draw, space: ChoiceSpace, linear=False):
    xs = draw(st.permutations(list(space.outcomes)))
    if linear:
        return Preference.linear(xs)
    cuts = draw(st.lists(st.booleans(), min_size=len(xs) - 1, max_size=len(xs) - 1))
    blocks, cur = [], [xs[0]]
    for x, cut in zip(xs[1:], cuts):
        if cut:
            blocks.append(cur)
            cur = []
        cur.append(x)
    blocks.append(cur)
    return Preference.from_blocks(blocks)


@st.composite
def profiles(draw, space: ChoiceSpace, linear=False):
    return PreferenceProfile(tuple(draw(preferences(space, linear)) for _ in range(space.periods)))
