"""The four two-observation illustrations on X1 = {x1, x1'}, X2 = {x2, x2', x2''}.

Both budgets drop one plan: the first removes (x1', x2''), the second removes
(x1, x2''). Only the observed choices differ between the four datasets.
"""

from __future__ import annotations

from onpath.core import ChoiceSpace, Dataset, Observation

SPACE = ChoiceSpace(2, (("x1", "x1'"), ("x2", "x2'", "x2''")))

_FULL = frozenset(SPACE.outcomes)
B1 = _FULL - {(1, 2)}
B2 = _FULL - {(0, 2)}

CHOICES = {
    1: ((0, 0), (0, 1)),
    2: ((1, 0), (0, 0)),
    3: ((0, 0), (1, 1)),
    4: ((0, 0), (1, 0)),
}

# figure -> axiom -> holds
EXPECTED = {
    1: {"nsarp": False, "cond1": True, "cond2": True},
    2: {"cond1": False, "cond2": True},
    3: {"cond2": False, "cond1": True, "nsarp": True, "nnsarp": True},
    4: {"nnsarp": False, "cond2": False, "cond1": True, "nsarp": True},
}


def figure(n: int) -> Dataset:
    a, b = CHOICES[n]
    return Dataset(SPACE, (Observation(B1, a), Observation(B2, b)))
