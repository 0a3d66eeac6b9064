import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sievelab.errors import DomainError
from sievelab.exact import Magnitude
from sievelab.greedy import greedy_fill, pick_bin

small_fracs = st.fractions(min_value=Fraction(-3), max_value=Fraction(3), max_denominator=12)


def _cmp_power(a: int, e: Fraction, b: int, f: Fraction) -> int:
    """Sign of a**e - b**f by raising both sides to a common integer power."""
    L = e.denominator * f.denominator
    ea, fb = int(e * L), int(f * L)
    lhs = Fraction(a) ** ea
    rhs = Fraction(b) ** fb
    return (lhs > rhs) - (lhs < rhs)


@given(st.integers(1, 500), small_fracs, st.integers(1, 500), small_fracs)
def test_compare_matches_integer_powers(a, e, b, f):
    got = (Magnitude.of(a) ** e).compare(Magnitude.of(b) ** f)
    assert got == _cmp_power(a, e, b, f)


def test_near_tie_is_decided_exactly():
    # 2**(1/2) * 3**(1/3) vs 6**(5/12): equal only if 2**6 * 3**4 == 6**5
    lhs = Magnitude.of(2) ** Fraction(1, 2) * Magnitude.of(3) ** Fraction(1, 3)
    rhs = Magnitude.of(6) ** Fraction(5, 12)
    assert lhs.compare(rhs) == _cmp_power(2**6 * 3**4, Fraction(1, 12), 6**5, Fraction(1, 12))


def test_huge_near_tie():
    # 3**665 vs 2**1054: a famously close pair (ratio ~ 1 + 1e-4)
    assert Magnitude.of(3) ** 665 > Magnitude.of(2) ** 1054
    assert (3**665 > 2**1054)


def test_equality_is_structural():
    assert Magnitude.of(4) == Magnitude.of(2) ** 2
    assert Magnitude.of(Fraction(8, 4)) == Magnitude.of(2)
    assert Magnitude.x_power(Fraction(1, 3)) ** 3 == Magnitude.x_power(1)


def test_symbolic_x_dominates():
    tiny = Magnitude.x_power(Fraction(1, 10**6))
    assert tiny > Magnitude.of(10**18)
    assert Magnitude.x_power(0) == Magnitude.one()


def test_rejects_floats_and_nonpositive():
    with pytest.raises(DomainError):
        Magnitude.of(1.5)
    with pytest.raises(DomainError):
        Magnitude.of(0)
    with pytest.raises(DomainError):
        Magnitude.x_power(0.5)


def test_as_fraction():
    assert Magnitude.of(Fraction(9, 4)).as_fraction() == Fraction(9, 4)
    assert (Magnitude.of(2) ** Fraction(1, 2)).as_fraction() is None
    assert float(Magnitude.of(10) ** Fraction(3, 2)) == pytest.approx(10**1.5)


def test_pick_bin_tie_break_and_ratio():
    caps = [Magnitude.of(10), Magnitude.of(10)]
    one = Magnitude.one()
    assert pick_bin(Magnitude.of(3), caps, [one, one]) == 0
    assert pick_bin(Magnitude.of(3), caps, [Magnitude.of(2), one]) == 1
    assert pick_bin(Magnitude.of(11), caps, [one, one]) is None
    # exact fill is allowed (<=)
    assert pick_bin(Magnitude.of(5), caps, [Magnitude.of(2), Magnitude.of(3)]) == 0


def test_greedy_fill_places_all():
    items = [Magnitude.of(p) for p in (3, 2, 2, 2, 2)]
    got = greedy_fill(items, [Magnitude.of(10), Magnitude.of(10)])
    contents, placement = got
    assert sorted(int(c.as_fraction()) for c in contents) == [6, 8]
    assert greedy_fill([Magnitude.of(11)], [Magnitude.of(10)]) is None
