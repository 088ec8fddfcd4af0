import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from onpath.core import (
    ChoiceSpace,
    Dataset,
    DatasetError,
    Observation,
    Preference,
    dataset_to_json,
    dumps_dataset,
    loads_dataset,
    max_set,
    projection,
    section,
    section_fixing_others,
    validate,
)
from strategies import datasets, preferences, spaces


class TestChoiceSpace:
    def test_outcomes_are_lexicographic(self):
        space = ChoiceSpace.from_sizes([2, 3])
        assert space.outcomes == ((0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2))
        assert space.label((1, 2)) == ("x1_1", "x2_2")

    @given(spaces(periods=st.integers(2, 4), max_size=3))
    def test_outcome_count_is_product(self, space):
        n = 1
        for s in space.sizes:
            n *= s
        assert len(space.outcomes) == n
        assert all(space.index[x] == i for i, x in enumerate(space.outcomes))

    def test_contains_rejects_out_of_range(self):
        space = ChoiceSpace.from_sizes([2, 2])
        assert space.contains((1, 1))
        assert not space.contains((2, 0))
        assert not space.contains((0, 0, 0))

    def test_single_period_is_a_problem(self):
        assert ChoiceSpace.from_sizes([3]).problems()


class TestValidate:
    space = ChoiceSpace.from_sizes([2, 2])

    def test_valid_dataset_has_no_violations(self):
        ds = Dataset.build(self.space, [([(0, 0), (1, 1)], (1, 1))])
        assert validate(ds) == []

    def test_choice_outside_budget(self):
        ds = Dataset.build(self.space, [([(0, 0)], (1, 1))])
        (v,) = validate(ds)
        assert v.observation == 0 and "not in the budget" in v.reason

    def test_empty_budget_and_bad_index(self):
        ds = Dataset(self.space, (Observation(frozenset(), (0, 0)), Observation(frozenset({(0, 5)}), (0, 5))))
        reasons = [v.reason for v in validate(ds)]
        assert "empty budget" in reasons
        assert any("unknown alternative" in r for r in reasons)

    def test_arity_mismatch(self):
        ds = Dataset.build(self.space, [([(0, 0, 0)], (0, 0, 0))])
        assert any("arity" in v.reason for v in validate(ds))

    def test_no_observations(self):
        assert validate(Dataset(self.space, ()))


class TestSections:
    B = frozenset({(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 1, 1)})

    def test_section_by_prefix(self):
        assert section(self.B, (0,)) == {(0, 0, 0), (0, 0, 1), (0, 1, 0)}
        assert section(self.B, (0, 0)) == {(0, 0, 0), (0, 0, 1)}
        assert section(self.B, ()) == self.B

    def test_section_fixing_others(self):
        assert section_fixing_others(self.B, (0, None, 0), 2) == {(0, 0, 0), (0, 1, 0)}
        assert section_fixing_others(self.B, (None, 1, 1), 1) == {(1, 1, 1)}

    def test_projection(self):
        assert projection(self.B, ()) == [0, 1]
        assert projection(self.B, (0,)) == [0, 1]
        assert projection(self.B, (1, 1)) == [1]

    def test_max_set_of_empty_set_raises(self):
        with pytest.raises(ValueError, match="empty choice set"):
            max_set([], Preference.linear([(0, 0)]))


class TestPreference:
    def test_linear_rejects_blocks(self):
        with pytest.raises(ValueError):
            Preference((frozenset({(0,), (1,)}),), "linear")

    def test_indifference_and_strictness(self):
        p = Preference.from_blocks([[(1, 0)], [(0, 0), (0, 1)]])
        assert p.prefers((1, 0), (0, 0))
        assert not p.prefers((0, 0), (0, 1)) and not p.prefers((0, 1), (0, 0))
        assert max_set([(0, 0), (0, 1)], p) == {(0, 0), (0, 1)}

    def test_problems_detects_missing_outcome(self):
        space = ChoiceSpace.from_sizes([1, 2])
        assert Preference.linear([(0, 0)]).problems(space)

    @given(st.data())
    def test_json_round_trip(self, data):
        space = data.draw(spaces())
        p = data.draw(preferences(space))
        q = Preference.from_json(json.loads(json.dumps(p.to_json())))
        assert q.rank == p.rank and q.problems(space) == []


class TestJson:
    @given(datasets(periods=st.integers(2, 3)))
    def test_round_trip_is_identity(self, ds):
        again = loads_dataset(dumps_dataset(ds))
        assert dataset_to_json(again) == dataset_to_json(ds)

    def test_output_is_canonical(self):
        space = ChoiceSpace.from_sizes([2, 2])
        a = Dataset.build(space, [([(1, 1), (0, 0)], (0, 0))])
        b = Dataset.build(space, [([(0, 0), (1, 1)], (0, 0))])
        assert dumps_dataset(a) == dumps_dataset(b)

    def test_parse_error_carries_position(self):
        with pytest.raises(DatasetError, match="line 2 column"):
            loads_dataset('{"periods": 2,\n ]')

    def test_invalid_dataset_lists_violations(self):
        text = json.dumps({"periods": 2, "alternatives": [["a"], ["b", "c"]],
                           "observations": [{"budget": [[0, 0]], "choice": [0, 1]}]})
        with pytest.raises(DatasetError) as info:
            loads_dataset(text)
        assert info.value.violations[0].observation == 0

    def test_missing_key_is_malformed(self):
        with pytest.raises(DatasetError, match="malformed"):
            loads_dataset('{"periods": 2}')

    def test_unchecked_load_skips_validation(self):
        text = json.dumps({"periods": 2, "alternatives": [["a"], ["b"]],
                           "observations": [{"budget": [[0, 0]], "choice": [0, 1]}]})
        assert len(loads_dataset(text, check=False)) == 1
