import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

import oracles
from sievelab.arith import euler_phi, tau
from sievelab.errors import DomainError, ResourceError
from sievelab.exp_sums import (
    PSI0,
    BumpFunction,
    coprime_sum_check,
    cyclotomic,
    default_H,
    is_zero_cyclotomic,
    kloosterman,
    kloosterman_ramanujan_check,
    kloosterman_table,
    poisson_check,
    psi0_eval,
    psi0_fourier,
    ramanujan,
    ramanujan_table_check,
    weil_check,
)


def test_kloosterman_examples():
    assert kloosterman(1, 1, 2).value == pytest.approx(1)
    assert kloosterman(1, 1, 2).equals_integer(1)
    assert kloosterman(1, 1, 3).equals_integer(-1)
    assert kloosterman(5, 7, 1).equals_integer(1)


@given(st.integers(0, 60), st.integers(0, 60), st.integers(1, 60))
def test_kloosterman_matches_direct_sum(a, b, q):
    s = kloosterman(a, b, q)
    direct = oracles.kloosterman(a, b, q)
    assert s.value == pytest.approx(direct.real, abs=1e-9)
    assert abs(s.imag) < 1e-9 and abs(direct.imag) < 1e-9
    assert s.is_real_exact()


def test_kloosterman_symmetric_and_real():
    for q in range(1, 301, 7):
        for a in range(0, q + 1, max(1, q // 9)):
            for b in range(0, q + 1, max(1, q // 11)):
                s, t = kloosterman(a, b, q), kloosterman(b, a, q)
                assert s.is_real_exact() and abs(s.imag) < 1e-9
                assert s.value == pytest.approx(t.value, abs=1e-9)


def test_kloosterman_limit():
    with pytest.raises(ResourceError):
        kloosterman(1, 1, 10**5 + 1)
    with pytest.raises(DomainError):
        kloosterman(1, 1, 0)


def test_ramanujan_examples():
    assert ramanujan(6, 4) == -1
    assert all(ramanujan(1, b) == 1 for b in range(10))
    assert all(ramanujan(q, 0) == euler_phi(q) for q in range(1, 100))


@given(st.integers(1, 120), st.integers(0, 120))
def test_ramanujan_direct(q, b):
    assert ramanujan(q, b) == round(oracles.ramanujan_direct(q, b).real)


def test_ramanujan_tables_exact():
    assert ramanujan_table_check(120) == []
    assert kloosterman_ramanujan_check(120) == []


def test_cyclotomic_zero_test():
    assert cyclotomic(6) == (1, -1, 1)
    # e(0) + e(1/3) + e(2/3) = 0
    assert is_zero_cyclotomic(np.array([[1, 1, 1]]), 3)[0]
    assert not is_zero_cyclotomic(np.array([[1, 1, 0]]), 3)[0]


def test_kloosterman_table_matches_direct():
    for q in (1, 2, 9, 12, 31):
        S = kloosterman_table(q)
        for a in range(q):
            for b in range(q):
                assert S[a, b] == pytest.approx(oracles.kloosterman(a, b, q).real, abs=1e-8)


def test_weil_scan_small():
    rep = weil_check(100)
    assert rep.violations == []
    assert rep.prime_unit_max <= 2.0
    # degenerate point S(0, 0; q) = phi(q)
    for q in (10, 97):
        assert kloosterman(0, 0, q).equals_integer(euler_phi(q))
        assert euler_phi(q) <= tau(q) * q


def test_weil_workers_agree():
    a, b = weil_check(60), weil_check(60, workers=2)
    assert a.max_ratio == b.max_ratio and a.pairs == b.pairs


# ------------------------------------------------------------------ psi0


def test_psi0_support_and_plateau():
    assert psi0_eval(1.5) == 1.0
    assert psi0_eval(3.0) == 0.0
    grid = np.linspace(0, 3, 10**4)
    vals = np.array([psi0_eval(t) for t in grid])
    assert np.all(vals >= 0) and np.all(vals <= 1 + 1e-15)
    assert np.all(vals[(grid >= 1) & (grid <= 2)] == 1.0)
    assert np.all(vals[(grid <= 0.5) | (grid >= 2.5)] == 0.0)
    ind = ((grid >= 1) & (grid <= 2)).astype(float)
    assert np.all(vals >= ind)


def test_psi0_symmetry():
    for t in np.linspace(0.5, 1.5, 41):
        assert psi0_eval(t) == pytest.approx(psi0_eval(3 - t), abs=1e-12)


def test_psi0_fourier_zero():
    v = psi0_fourier(0)
    ref, _ = integrate.quad(psi0_eval, 0.5, 2.5, points=[0.75, 1, 2, 2.25], limit=200)
    assert 1 <= v.real <= 2 and abs(v.imag) < 1e-12
    assert v.real == pytest.approx(ref, abs=1e-9)
    # symmetric about 3/2 with plateau length 1 and linear-like ramps: integral is 3/2
    assert v.real == pytest.approx(1.5, abs=1e-9)


@pytest.mark.parametrize("xi", [0.1, 0.7, 1.3, 4.0, 11.5])
def test_psi0_fourier_matches_quadrature(xi):
    re, _ = integrate.quad(lambda t: psi0_eval(t) * math.cos(2 * math.pi * xi * t), 0.5, 2.5, limit=400)
    im, _ = integrate.quad(lambda t: -psi0_eval(t) * math.sin(2 * math.pi * xi * t), 0.5, 2.5, limit=400)
    assert psi0_fourier(xi) == pytest.approx(complex(re, im), abs=1e-9)
    assert PSI0.fourier_quad(xi) == pytest.approx(psi0_fourier(xi), abs=1e-9)


def test_derivative_sups_recorded():
    sups = PSI0.derivative_sups(6)
    assert len(sups) == 7
    assert sups[0] == pytest.approx(1.0)
    assert all(np.isfinite(sups))


def test_bump_custom_width_support():
    b = BumpFunction(width=0.1, left=1.0 - 0.1 + 0.0, right=2.0 + 0.1)
    lo, hi = b.support
    assert b(lo - 1e-9) == 0.0 and b(hi + 1e-9) == 0.0 and b(1.5) == 1.0


# ------------------------------------------------------------ completion


def _lhs_direct(M, q, a):
    return math.fsum(psi0_eval(m / M) for m in range(1, 3 * M) if (m - a) % q == 0)


def test_poisson_example():
    rep = poisson_check(1000, 7, 3, 200)
    assert rep.residual <= 1e-6
    assert rep.lhs == pytest.approx(_lhs_direct(1000, 7, 3), abs=1e-9)


def test_poisson_trivial_modulus():
    rep = poisson_check(500, 1, 0)
    assert rep.residual <= 1e-6


def test_poisson_truncation_negative_control():
    # q much larger than M: a small H misses most of the spectrum
    good = poisson_check(100, 997, 5)
    bad = poisson_check(100, 997, 5, H=2)
    assert good.residual <= 1e-6 and bad.residual > 1e-2


def test_default_H():
    assert default_H(1000, 7) == int(100 * 7 / 1000 + 100)


def test_coprime_sum():
    rep = coprime_sum_check(10**4, 6)
    direct = math.fsum(psi0_eval(m / 10**4) for m in range(1, 3 * 10**4) if math.gcd(m, 6) == 1)
    assert rep.lhs == pytest.approx(direct, rel=1e-12)
    assert rep.deviation <= 50 * tau(6) * math.log(10**4) ** 2
    rep1 = coprime_sum_check(1000, 1)
    assert rep1.deviation < 1.0
