"""Canonical free-Boolean-algebra combinations."""

import pytest
from hypothesis import given, strategies as st

from theorybench.boolcomb import (BOTTOM, TOP, GeneratorCombination, canonical)


def gen(n):
    return GeneratorCombination.generator(n)


class TestConstructors:
    def test_top_bottom_distinct(self):
        assert TOP.is_top and not TOP.is_bottom
        assert BOTTOM.is_bottom and not BOTTOM.is_top
        assert TOP != BOTTOM

    def test_generator_support(self):
        assert gen(3).support == (3,)

    def test_negative_index_rejected(self):
        with pytest.raises(ValueError):
            gen(-1)

    def test_minterm(self):
        m = GeneratorCombination.minterm({0: True, 2: False})
        assert m.minterm_lines() == ["+A0 -A2"]

    def test_unsorted_support_rejected(self):
        with pytest.raises(ValueError):
            GeneratorCombination((2, 1), frozenset())


class TestAlgebra:
    def test_excluded_middle(self):
        assert (gen(0) | ~gen(0)).is_top

    def test_contradiction(self):
        assert (gen(0) & ~gen(0)).is_bottom

    def test_absorption_drops_support(self):
        # (A0 & A1) | A0 == A0: the A1 dependence must vanish
        assert ((gen(0) & gen(1)) | gen(0)) == gen(0)

    def test_de_morgan(self):
        a, b = gen(0), gen(4)
        assert ~(a & b) == ~a | ~b

    def test_entails(self):
        assert (gen(0) & gen(1)).entails(gen(0))
        assert not gen(0).entails(gen(1))

    def test_iff_of_equal_is_top(self):
        g = gen(2) | ~gen(7)
        assert g.iff(g).is_top

    def test_evaluate(self):
        g = gen(0) & ~gen(1)
        assert g.evaluate({0: True, 1: False})
        assert not g.evaluate({0: True, 1: True})
        assert g.evaluate(lambda i: i == 0)


class TestCanonical:
    def test_vacuous_generator_dropped(self):
        # a truth table listing both rows of A5 does not depend on A5
        g = canonical((5,), frozenset((0, 1)))
        assert g == TOP

    def test_minterm_lines_in_row_order(self):
        g = gen(1) | gen(0)
        assert g.minterm_lines() == ["+A0 -A1", "-A0 +A1", "+A0 +A1"]


# property tests: boolean-algebra laws on random elements

_combos = st.recursive(
    st.one_of(
        st.integers(0, 4).map(gen),
        st.just(TOP),
        st.just(BOTTOM),
    ),
    lambda sub: st.one_of(
        sub.map(lambda g: ~g),
        st.tuples(sub, sub).map(lambda p: p[0] & p[1]),
        st.tuples(sub, sub).map(lambda p: p[0] | p[1]),
    ),
    max_leaves=8,
)


@given(_combos, _combos)
def test_commutativity(a, b):
    assert a & b == b & a
    assert a | b == b | a


@given(_combos, _combos, _combos)
def test_distributivity(a, b, c):
    assert a & (b | c) == (a & b) | (a & c)


@given(_combos)
def test_double_negation(a):
    assert ~~a == a


@given(_combos, _combos)
def test_entailment_matches_evaluation(a, b):
    implied = a.implies(b)
    support = sorted(set(a.support) | set(b.support))
    for mask in range(1 << len(support)):
        val = {idx: bool(mask >> k & 1) for k, idx in enumerate(support)}
        assignment = lambda i: val.get(i, False)
        assert implied.evaluate(assignment) == (
            (not a.evaluate(assignment)) or b.evaluate(assignment))
