from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from srvf.counterexample import MAX_CANTOR_LEVEL, cantor_measure, fat_cantor
from srvf.intervals import IntervalSet


def test_first_levels():
    assert fat_cantor(1) == IntervalSet([(0, F(3, 8)), (F(5, 8), 1)])
    assert fat_cantor(1).measure == F(3, 4)
    assert fat_cantor(2).measure == F(5, 8)
    assert len(fat_cantor(2)) == 4


@pytest.mark.parametrize("k", range(1, 13))
def test_measure_closed_form(k):
    B = fat_cantor(k)
    assert B.measure == cantor_measure(k) == F(1, 2) * (1 + F(1, 2**k))
    assert len(B) == 2**k
    assert B.complement().measure == 1 - B.measure


def test_levels_are_nested():
    for k in range(1, 8):
        assert fat_cantor(k + 1).difference(fat_cantor(k)).measure == 0


def test_level_cap():
    with pytest.raises(ValueError):
        fat_cantor(0)
    with pytest.raises(ValueError):
        fat_cantor(MAX_CANTOR_LEVEL + 1)


def test_endpoints_exactly_representable():
    for x in fat_cantor(10).endpoints():
        assert F(float(x)) == x


def test_merging_and_empty_dropped():
    s = IntervalSet([(F(1, 2), F(3, 4)), (0, F(1, 4)), (F(1, 4), F(1, 3)), (F(9, 10), F(9, 10))])
    assert s.intervals == ((0, F(1, 3)), (F(1, 2), F(3, 4)))


def test_rejects_outside_unit_interval():
    with pytest.raises(ValueError):
        IntervalSet([(F(-1, 4), F(1, 4))])


def test_fatten():
    s = fat_cantor(1).fatten(F(1, 16))
    assert s == IntervalSet([(0, F(7, 16)), (F(9, 16), 1)])
    with pytest.raises(ValueError, match="merges"):
        fat_cantor(1).fatten(F(1, 8))


def test_json_roundtrip():
    s = fat_cantor(4)
    assert IntervalSet.from_json(s.to_json()) == s


def test_contains():
    s = fat_cantor(1)
    assert s.contains(F(3, 8)) and not s.contains(F(1, 2))


fractions = st.fractions(min_value=0, max_value=1, max_denominator=64)
pairs = st.tuples(fractions, fractions).map(lambda t: (min(t), max(t)))
sets = st.lists(pairs, max_size=6).map(IntervalSet)


@given(sets)
def test_complement_involution(s):
    assert s.complement().complement() == s
    assert s.measure + s.complement().measure == 1


@given(sets, sets)
def test_inclusion_exclusion(a, b):
    assert a.union(b).measure == a.measure + b.measure - a.intersection(b).measure
    assert a.difference(b).measure == a.measure - a.intersection(b).measure
