import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onpath.axioms import check_nsarp
from onpath.core import ChoiceSpace, Dataset
from onpath.figures import figure
from onpath.harness import SamplerConfig, linear_nash_divergence, sample_dataset
from onpath.oracle import (
    SEARCH_GUARD,
    SizeGuardError,
    count_preferences,
    enumerate_preferences,
    rationalizable_bruteforce,
    solve,
)
from onpath.rationalize import ModelKind, verify
from strategies import datasets

MODELS = list(ModelKind)
# frozen from the search oracle over weak orders
FIGURE_VERDICTS = {
    1: set(),
    2: {"nash", "sophisticated"},
    3: {"naive", "nash", "strict-nash"},
    4: {"naive", "nash"},
}


def tiny(periods=st.just(2)):
    return datasets(periods=periods, max_size=2, max_K=2).filter(lambda d: len(d.space.outcomes) <= 4)


class TestEnumeration:
    @pytest.mark.parametrize("n,fubini", [(1, 1), (2, 3), (3, 13), (4, 75), (5, 541)])
    def test_weak_order_counts(self, n, fubini):
        assert count_preferences(n, "weak") == fubini

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_linear_order_counts(self, n):
        assert count_preferences(n, "linear") == math.factorial(n)

    def test_enumeration_is_deterministic_and_complete(self):
        space = ChoiceSpace.from_sizes([1, 3])
        first = [p.rank for p in enumerate_preferences(space, "weak")]
        assert first == [p.rank for p in enumerate_preferences(space, "weak")]
        assert len(set(tuple(sorted(r.items())) for r in first)) == 13

    @pytest.mark.parametrize("cls,n", [("linear", 7), ("weak", 6)])
    def test_guards(self, cls, n):
        with pytest.raises(SizeGuardError):
            list(enumerate_preferences(tuple((i,) for i in range(n)), cls))

    def test_search_guard(self):
        space = ChoiceSpace.from_sizes([SEARCH_GUARD + 1, 1])
        ds = Dataset.build(space, [([(0, 0)], (0, 0))])
        with pytest.raises(SizeGuardError):
            solve(ds, "naive")

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            solve(figure(1), "naive", method="sample")


class TestFigures:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_oracle_verdicts(self, n):
        got = {m.value for m in MODELS if solve(figure(n), m).rationalizable}
        assert got == FIGURE_VERDICTS[n]

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_witnesses_verify(self, n):
        ds = figure(n)
        for m in MODELS:
            w = rationalizable_bruteforce(ds, m)
            if w is not None:
                assert verify(ds, w, m)
                assert w.problems(ds.space) == []


class TestSearchMatchesEnumeration:
    @settings(max_examples=40)
    @given(tiny(), st.sampled_from(MODELS))
    def test_weak(self, ds, model):
        assert solve(ds, model, "weak").rationalizable == solve(ds, model, "weak", "enumerate").rationalizable

    @settings(max_examples=40)
    @given(tiny(), st.sampled_from(MODELS))
    def test_linear(self, ds, model):
        assert solve(ds, model, "linear").rationalizable == solve(ds, model, "linear", "enumerate").rationalizable

    @given(datasets(periods=st.integers(2, 3), max_size=2))
    def test_linear_witness_is_weak_witness(self, ds):
        for model in MODELS:
            if solve(ds, model, "linear").rationalizable:
                assert solve(ds, model, "weak").rationalizable


class TestEnumerateResult:
    space = ChoiceSpace.from_sizes([2, 2])

    def test_profile_budget_is_reported(self):
        ds = Dataset.build(self.space, [(self.space.outcomes, (0, 0)), ([(0, 0), (1, 1)], (1, 1))])
        res = solve(ds, "strict-nash", "weak", "enumerate", max_profiles=3)
        assert res.profiles_checked <= 3
        if not res.rationalizable:
            assert not res.exhausted

    def test_nash_needs_indifference_somewhere(self):
        # N-SARP characterizes weak-order naive-Nash, not the linear class
        divergent = linear_nash_divergence(SamplerConfig(), 200, seed=0)
        assert divergent
        ds = sample_dataset(SamplerConfig(), 0, divergent[0])
        assert check_nsarp(ds).holds
        assert solve(ds, "nash", "weak").rationalizable
        assert not solve(ds, "nash", "linear").rationalizable
