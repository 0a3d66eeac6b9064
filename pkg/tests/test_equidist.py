import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import oracles
from sievelab.arith import euler_phi, mobius
from sievelab.equidist import (
    bv_qmax,
    bv_table,
    delta_q,
    double_divisor_experiment,
    fundamental_lemma_check,
    mobius_sequence,
    partition_check,
    pi_ap,
    primes_below,
    siegel_walfisz_probe,
    weighted_prime_discrepancy,
)
from sievelab.errors import DomainError, ResourceError
from sievelab.exp_sums import psi0_eval
from sievelab.sieve_support import WeightSequence

F = Fraction


def test_pi_ap_examples():
    assert pi_ap(100, 1, 0) == 25
    assert pi_ap(100, 3, 1) == 11
    assert pi_ap(100, 4, 1) == 11


def test_pi_is_strict():
    # 97 is prime; primes less than 97 exclude it
    assert pi_ap(97, 1, 0) == 24 and pi_ap(98, 1, 0) == 25


@given(st.integers(2, 3000), st.integers(1, 40), st.integers(0, 40))
def test_pi_ap_matches_oracle(x, q, a):
    assert pi_ap(x, q, a) == oracles.pi_ap(x, q, a)


def test_primes_below():
    assert list(primes_below(30)) == oracles.primes_upto(29)


def test_partition_identity():
    for x in (10**3, 10**4, 10**6):
        for q in range(1, 51):
            assert partition_check(x, q)


def test_bv_small_table():
    rep = bv_table(10**4, 10)
    assert [r.q for r in rep.rows] == list(range(1, 11))
    assert rep.abs_sum == F(535, 12)
    pi = oracles.pi_ap(10**4, 1, 0)
    for r in rep.rows:
        devs = [abs(oracles.pi_ap(10**4, r.q, a) - F(pi, euler_phi(r.q)))
                for a in range(r.q) if math.gcd(a, r.q) == 1]
        assert r.discrepancy == max(devs)
        assert r.main_term == F(pi, euler_phi(r.q))
    assert rep.abs_sum == sum(r.discrepancy for r in rep.rows)


def test_bv_first_row_and_monotone():
    x = 10**4
    rep1 = bv_table(x, 1)
    assert len(rep1.rows) == 1
    r = rep1.rows[0]
    assert (r.q, r.count, r.main_term, r.discrepancy) == (1, 1229, 1229, 0)
    prev = F(0)
    for Q in range(1, 30):
        cur = bv_table(x, Q).abs_sum
        assert cur >= prev
        prev = cur


def test_bv_workers_identical():
    a = bv_table(10**5, 40)
    b = bv_table(10**5, 40, workers=3)
    assert a.rows == b.rows


def test_bv_qmax_and_limits():
    assert bv_qmax(10**6, 3) == 0
    assert bv_qmax(10**6, 1) == 72
    with pytest.raises(ResourceError):
        bv_table(10**8, 5)
    with pytest.raises(DomainError):
        bv_table(100)


def test_normalizations():
    rep = bv_table(10**4, 10)
    lx = math.log(10**4)
    assert rep.normalized() == pytest.approx(float(rep.abs_sum) / (10**4 / lx))
    assert rep.normalized(A=2) == pytest.approx(float(rep.abs_sum) / (10**4 / lx**2))


def test_weighted_examples():
    assert weighted_prime_discrepancy({}, 100, 1).signed_sum == 0
    assert weighted_prime_discrepancy(WeightSequence.delta_one(), 100, 1).signed_sum == 0
    assert weighted_prime_discrepancy({3: 1}, 100, 1).signed_sum == F(-3, 2)


def test_weighted_skips_noncoprime():
    rep = weighted_prime_discrepancy({2: 1, 3: 1, 4: 1}, 100, 2)
    assert [r.q for r in rep.rows] == [3]


def test_weighted_lambda_plus_matches_oracle():
    w = WeightSequence.lambda_plus(100)
    rep = weighted_prime_discrepancy(w, 10**4, 1)
    pi = oracles.pi_ap(10**4, 1, 0)
    want = sum(v * (oracles.pi_ap(10**4, q, 1) - F(pi, oracles.phi(q))) for q, v in w.entries.items())
    assert rep.signed_sum == want


def test_delta_q_examples():
    ones = {n: 1 for n in range(11, 21)}
    assert delta_q(3, {}, ones, 1) == 0
    assert delta_q(1, ones, {n: 2 for n in range(11, 21)}, 0) == 0
    assert delta_q(3, ones, ones, 1, N=10, M=10) == oracles.delta_q(3, ones, ones, 1)


def test_delta_q_dyadic_support_checked():
    with pytest.raises(DomainError):
        delta_q(3, {5: 1}, {11: 1}, 1, N=10)


seq = st.dictionaries(st.integers(1, 60), st.integers(-3, 3), max_size=25)


@given(st.integers(1, 30), seq, seq, st.integers(0, 30))
def test_delta_q_matches_double_loop(q, alpha, beta, a):
    assert delta_q(q, alpha, beta, a) == oracles.delta_q(q, alpha, beta, a)


def test_fundamental_lemma_example():
    rep = fundamental_lemma_check(3, 1, 100, 7)
    total, hits = oracles.rough_count(100, 7, 3, 1)
    assert rep.total == total == 26
    assert rep.lhs == hits == 14
    assert rep.rhs == 13


def test_fundamental_lemma_trivial_cases():
    assert fundamental_lemma_check(1, 0, 1000, 7).deviation == 0
    rep = fundamental_lemma_check(5, 2, 1000, 2)
    assert rep.total == 1000 and rep.lhs == 200
    with pytest.raises(DomainError):
        fundamental_lemma_check(6, 2, 100, 7)


@pytest.mark.parametrize("q,b,t,z", [(7, 3, 5000, 11), (10, 9, 3000, 5), (1, 0, 2000, 13)])
def test_fundamental_lemma_matches_oracle(q, b, t, z):
    rep = fundamental_lemma_check(q, b, t, z)
    assert (rep.total, rep.lhs) == oracles.rough_count(t, z, q, b)


def test_double_divisor_example():
    rep = double_divisor_experiment(11, 1, 4, 20, 20)
    alpha = {m: 1 for m in range(5, 9)}
    assert rep.value == oracles.double_divisor(11, 1, 4, 20, 20, alpha, psi0_eval)


def test_double_divisor_trivial():
    assert double_divisor_experiment(1, 0, 4, 10, 12).value == 0
    assert double_divisor_experiment(7, 1, 4, 10, 12, alpha={}).value == 0
    with pytest.raises(DomainError):
        double_divisor_experiment(6, 2, 4, 10, 12)
    with pytest.raises(DomainError):
        double_divisor_experiment(7, 1, 4, 12, 10)


def test_double_divisor_reference_informational():
    rep = double_divisor_experiment(13, 2, 5, 8, 9, epsilon=0.01)
    x = 5 * 8 * 9
    assert rep.reference == pytest.approx(x / (13 * x**0.01))
    assert rep.ratio == pytest.approx(float(rep.value) / rep.reference)


def test_siegel_walfisz_examples():
    N = 10**4
    mu = mobius_sequence(N)
    rep = siegel_walfisz_probe(mu, N, 1, 3, 1)
    hit = sum(mobius(n) for n in range(N + 1, 2 * N + 1) if n % 3 == 1)
    cop = sum(mobius(n) for n in range(N + 1, 2 * N + 1) if n % 3)
    assert rep.value == abs(hit - F(cop, 2)) == 14
    assert siegel_walfisz_probe({}, N, 1, 3, 1).value == 0
    assert siegel_walfisz_probe(mu, N, 1, 1, 0).value == 0
    assert rep.envelope == pytest.approx(N / math.log(N))
