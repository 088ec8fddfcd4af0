import pytest
from hypothesis import given
from hypothesis import strategies as st

from onpath.axioms import check_condition2, check_condition5, check_nnsarp, check_nsarp, check_condition1, check_tsarp
from onpath.core import ChoiceSpace, Dataset, Preference
from onpath.figures import figure
from onpath.oracle import solve
from onpath.rationalize import (
    ModelKind,
    PreferenceProfile,
    RationalizationError,
    UnsupportedCase,
    backward_induction,
    construct,
    construct_naive,
    construct_sophisticated,
    construct_strict_nash,
    predict,
    satisfies,
    verify,
)
from strategies import datasets, profiles, spaces

SPACE = ChoiceSpace.from_sizes([2, 2])
FULL = frozenset(SPACE.outcomes)
# agent 2 takes (0,1) after 0 and (1,0) after 1; agent 1 ranks (1,1) first
PROFILE = PreferenceProfile((
    Preference.linear([(1, 1), (0, 1), (1, 0), (0, 0)]),
    Preference.linear([(0, 1), (1, 0), (0, 0), (1, 1)]),
))


class TestSemantics:
    def test_backward_induction_sets(self):
        bi = backward_induction(FULL, PROFILE)
        assert bi.M((0,)) == {(0, 0), (0, 1)}
        assert bi.M(()) == {(0, 1), (1, 0)}

    def test_models_disagree_on_one_budget(self):
        assert predict(FULL, PROFILE, "sophisticated").outcomes == {(0, 1)}
        assert predict(FULL, PROFILE, "naive").outcomes == {(1, 0)}
        assert predict(FULL, PROFILE, "nash").outcomes == {(1, 0)}
        assert predict(FULL, PROFILE, "strict-nash").outcomes == {(1, 0)}

    def test_satisfies_matches_predict(self):
        for model in ModelKind:
            pred = predict(FULL, PROFILE, model).outcomes
            for x in FULL:
                assert satisfies(FULL, x, PROFILE, model) == (x in pred)

    def test_indifferent_first_period_is_nash_everywhere_agent2_agrees(self):
        flat = PreferenceProfile((Preference.indifferent(SPACE.outcomes), PROFILE[2]))
        assert predict(FULL, flat, "nash").outcomes == {(0, 1), (1, 0)}
        assert predict(FULL, flat, "strict-nash").outcomes == frozenset()

    @given(st.data())
    def test_strict_nash_implies_nash(self, data):
        space = data.draw(spaces())
        prof = data.draw(profiles(space))
        B = frozenset(data.draw(st.sets(st.sampled_from(space.outcomes), min_size=1)))
        strict = predict(B, prof, "strict-nash").outcomes
        assert strict <= predict(B, prof, "nash").outcomes

    @given(st.data())
    def test_linear_sophisticated_prediction_is_unique(self, data):
        space = data.draw(spaces(periods=st.integers(2, 3), max_size=2))
        prof = data.draw(profiles(space, linear=True))
        B = frozenset(data.draw(st.sets(st.sampled_from(space.outcomes), min_size=1)))
        pred = predict(B, prof, "sophisticated")
        assert pred.unique and len(pred.outcomes) == 1

    def test_profile_is_one_based(self):
        assert PROFILE[1] is PROFILE.prefs[0]

    def test_profile_json_round_trip(self):
        again = PreferenceProfile.from_json(PROFILE.to_json())
        assert [p.rank for p in again.prefs] == [p.rank for p in PROFILE.prefs]

    @pytest.mark.parametrize("alias,kind", [("naive-nash", ModelKind.NAIVE_NASH),
                                            ("Strict_Naive_Nash", ModelKind.STRICT_NAIVE_NASH),
                                            ("soph", ModelKind.SOPHISTICATED)])
    def test_model_aliases(self, alias, kind):
        assert ModelKind.parse(alias) is kind


class TestFigureConstructions:
    def test_figure3_naive_round_trip(self):
        ds = figure(3)
        assert verify(ds, construct_naive(ds), "naive")

    def test_figure2_naive_fails_with_subset(self):
        with pytest.raises(RationalizationError) as info:
            construct_naive(figure(2))
        assert info.value.verdict.witness == {"subset": [0, 1]}

    def test_figure2_sophisticated_round_trip(self):
        ds = figure(2)
        assert verify(ds, construct_sophisticated(ds), "sophisticated")

    def test_figure4_strict_nash_reports_cycle(self):
        with pytest.raises(RationalizationError) as info:
            construct_strict_nash(figure(4))
        assert info.value.verdict.witness["cycle"] == [0, 1]

    def test_duplicate_first_choices_are_unsupported(self):
        ds = Dataset.build(SPACE, [(FULL, (0, 0)), (FULL, (0, 1))])
        with pytest.raises(UnsupportedCase):
            construct_sophisticated(ds)


class TestRoundTrip:
    @given(datasets(periods=st.integers(2, 3), max_size=2))
    def test_naive(self, ds):
        ok = check_tsarp(ds, ds.T).holds and (
            check_condition1(ds).holds if ds.T == 2 else check_condition5(ds).holds)
        if ok:
            assert verify(ds, construct(ds, "naive"), "naive")

    @given(datasets(periods=st.integers(2, 3), max_size=3, distinct_x1=True))
    def test_sophisticated(self, ds):
        if check_condition2(ds).holds:
            assert verify(ds, construct(ds, "sophisticated"), "sophisticated")

    @given(datasets())
    def test_strict_and_weak_nash(self, ds):
        if check_nsarp(ds).holds:
            assert verify(ds, construct(ds, "nash"), "nash")
            if check_nnsarp(ds).holds:
                assert verify(ds, construct(ds, "strict-nash"), "strict-nash")

    @given(datasets(periods=st.integers(2, 3), max_size=2))
    def test_constructed_profiles_are_complete(self, ds):
        for model in ModelKind:
            try:
                prof = construct(ds, model)
            except RationalizationError:
                continue
            assert prof.problems(ds.space) == []


class TestThreePeriodCounterexample:
    """Condition 2 fails, yet a sophisticated profile exists.

    Shrinking the first budget changes the third agent's choice after (1,1),
    which in turn moves the second agent's choice after 1.
    """

    space = ChoiceSpace.from_sizes([2, 2, 2])

    def dataset(self):
        X = self.space.outcomes
        return Dataset.build(self.space, [(X, (0, 0, 1)), ([x for x in X if x != (0, 1, 0)], (1, 0, 0))])

    def _order(self, head):
        return Preference.linear(list(head) + [x for x in self.space.outcomes if x not in head])

    def test_condition2_fails(self):
        v = check_condition2(self.dataset())
        assert v.holds is False and v.witness == {"cycle": [0, 1]}

    def test_hand_profile_rationalizes(self):
        prof = PreferenceProfile((
            self._order([(0, 0, 1), (1, 0, 0)]),
            self._order([(0, 1, 1), (0, 0, 1), (1, 0, 0)]),
            self._order([(1, 0, 0), (1, 1, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)]),
        ))
        assert verify(self.dataset(), prof, "sophisticated")

    def test_oracle_finds_verified_profile(self):
        ds = self.dataset()
        res = solve(ds, "sophisticated", "linear")
        assert res.rationalizable
        assert verify(ds, res.witness, "sophisticated")
