import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import oracles
from sievelab.arith import von_mangoldt
from sievelab.errors import DomainError, ResourceError
from sievelab.heath_brown import (
    heath_brown_sum,
    heath_brown_terms,
    sum_terms,
    verify_heath_brown,
)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_unit(k):
    assert not sum_terms(heath_brown_terms(1, k, 1))


def test_small_examples():
    total = sum_terms(heath_brown_terms(8, 1, 8))
    assert total.as_pair() == (1, 2)
    assert float(total) == pytest.approx(math.log(2))
    assert not sum_terms(heath_brown_terms(6, 1, 6))


def test_terms_respect_cutoff_and_product():
    for t in heath_brown_terms(360, 3, 400, include_zero=True):
        assert math.prod(t.tuple) == 360
        ms = t.tuple[t.j:]
        assert all(m**3 <= 8 * 400 for m in ms)
        assert t.sign_coefficient == (-1) ** (t.j - 1) * math.comb(3, t.j)


@given(st.integers(1, 400), st.integers(1, 4))
def test_terms_and_convolution_agree(n, k):
    x = max(n, 1)
    assert sum_terms(heath_brown_terms(n, k, x)) == heath_brown_sum(n, k, x)


@given(st.integers(1, 300), st.integers(1, 3), st.integers(0, 2))
def test_float_oracle(n, k, xshift):
    x = n + xshift * n  # any x with n <= 2x
    got = float(heath_brown_sum(n, k, x))
    assert got == pytest.approx(oracles.heath_brown_float(n, k, x), abs=1e-9)
    assert got == pytest.approx(oracles.von_mangoldt_float(n), abs=1e-9)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_verify_5000(k):
    rep = verify_heath_brown(5000, k)
    assert rep.ok and rep.max_deviation == 0.0 and rep.checked == 5000


def test_verify_fixed_x():
    # x fixed at 2500 covers n <= 5000 = 2x
    assert verify_heath_brown(5000, 3, x_rule=2500).ok


def test_verify_parallel_matches():
    a = verify_heath_brown(2000, 3, cutoff=Fraction(1, 2))
    b = verify_heath_brown(2000, 3, cutoff=Fraction(1, 2), workers=2)
    assert [m[0] for m in a.mismatches] == [m[0] for m in b.mismatches]


def test_cutoff_negative_control():
    rep = verify_heath_brown(5000, 3, cutoff=Fraction(1, 2))
    assert not rep.ok and len(rep.mismatches) > 0


def test_printed_sign_fails():
    got = heath_brown_sum(8, 1, 8, sign="printed")
    assert got == -von_mangoldt(8)
    assert not verify_heath_brown(100, 1, sign="printed").ok


def test_argument_checks():
    with pytest.raises(DomainError):
        heath_brown_sum(10, 5, 10)
    with pytest.raises(DomainError):
        heath_brown_sum(30, 2, 10)
    with pytest.raises(ResourceError):
        heath_brown_terms(10**5 + 1, 1, 10**5)
    with pytest.raises(DomainError):
        verify_heath_brown(10**6, 1)
    with pytest.raises(DomainError):
        heath_brown_sum(8, 1, 8, sign="other")
