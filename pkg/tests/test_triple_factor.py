import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

import oracles
from sievelab.errors import DomainError, PreconditionError, ResourceError
from sievelab.exact import Magnitude
from sievelab.sieve_support import enumerate_Dplus
from sievelab.triple_factor import (
    MAINPROP,
    ORACLE_MAX_NAMED,
    PROP91,
    ExponentParams,
    ExponentTuple,
    check_constraints,
    dispatch_case,
    extremal_tuple,
    extremal_witness,
    in_range_control,
    oracle_feasible,
    propose_triple,
    random_exponent_instance,
    soundness_harness,
)

F = Fraction
DELTA = F(1, 2000)
THETA = F(7, 12) - 50 * DELTA
P = ExponentParams(DELTA)


def lp_slack(d: ExponentTuple, n_exp, delta, cset=PROP91):
    """Best common slack over all bin assignments, by linear programming.

    Maximizes t subject to lhs_i + t <= rhs_i for every inequality, with the
    small mass split into three non-negative parts. Feasible iff the result
    is >= 0 (or > 0 for strict sets).
    """
    best = -math.inf
    for assign in itertools.product(range(3), repeat=len(d.named)):
        base = [0.0, 0.0, 0.0]
        for v, b in zip(d.named, assign):
            base[b] += float(v)
        A, b_ub = [], []
        for ineq in cset.inequalities:
            a = ineq.powers
            rhs = float(ineq.rhs(delta)) - ineq.n_power * float(n_exp) - sum(x * y for x, y in zip(a, base))
            A.append([a[0], a[1], a[2], 1.0])
            b_ub.append(rhs)
        res = linprog([0, 0, 0, -1], A_ub=A, b_ub=b_ub, A_eq=[[1, 1, 1, 0]],
                      b_eq=[float(d.small_mass)], bounds=[(0, None)] * 3 + [(None, 1)])
        if res.status == 0:
            best = max(best, -res.fun)
    return best


# ---------------------------------------------------------------- data types


def test_exponent_tuple_invariants():
    t = ExponentTuple((F(1, 5), F(1, 10)), F(1, 4))
    assert t.total == F(11, 20)
    with pytest.raises(DomainError):
        ExponentTuple((F(1, 10), F(1, 5)))
    with pytest.raises(DomainError):
        ExponentTuple((F(0),))
    with pytest.raises(DomainError):
        ExponentTuple((F(3, 4),), F(1, 2))
    with pytest.raises(DomainError):
        ExponentTuple((), F(-1, 10))


def test_exponent_membership():
    assert ExponentTuple((THETA / 3,), THETA - THETA / 3).is_in_Dplus(THETA)
    assert not ExponentTuple((THETA / 3 + F(1, 10**6),)).is_in_Dplus(THETA)
    assert not ExponentTuple((), THETA + F(1, 10**6)).is_in_Dplus(THETA)


# ------------------------------------------------------------- case 1 example


def test_case1_formulas():
    nu = F(1, 6)
    d = ExponentTuple((nu,), THETA - nu)
    assert nu >= 2 * THETA - 1 + 3 * DELTA
    assert dispatch_case(d, DELTA) == "1"
    tr = propose_triple(d, F(1, 3), P)
    assert tr.case_used == "1"
    assert tr.d2 == ExponentTuple((nu,), 0)
    # caps D1 = N / x^delta and D3 = D x^delta / (N p1); their product is D / p1
    D1 = F(1, 3) - DELTA
    D3 = THETA + DELTA - F(1, 3) - nu
    assert D1 + D3 == THETA - nu
    assert tr.d1.total == D1 and tr.d3.total == D3
    assert tr.passed


def test_case1_threshold_value():
    assert float(2 * THETA - 1 + 3 * DELTA) == pytest.approx(0.1181666, abs=1e-7)


def test_nu_one_fifth_is_outside_support():
    # 3/5 > theta, so p1**3 <= D fails
    d = ExponentTuple((F(1, 5),), THETA - F(1, 5))
    assert not d.is_in_Dplus(THETA)
    with pytest.raises(PreconditionError):
        propose_triple(d, F(1, 3), P)


def test_unit_divisor():
    one = ExponentTuple()
    tr = propose_triple(one, F(1, 3), P)
    assert all(c.total == 0 for c in tr.components)
    margins = [r.margin for r in tr.record]
    assert margins == [F(1, 3) - DELTA, F(1, 3) - DELTA, F(4, 3) - DELTA, F(5, 3) - DELTA]


@pytest.mark.parametrize("n_exp", [2 * DELTA, F(1, 5), F(1, 3) + DELTA / 2])
def test_unit_divisor_across_N(n_exp):
    tr = propose_triple(ExponentTuple(), n_exp, P)
    assert tr.passed


def test_preconditions():
    d = ExponentTuple((), F(1, 10))
    with pytest.raises(PreconditionError):
        propose_triple(d, DELTA, P)
    with pytest.raises(PreconditionError):
        propose_triple(d, F(1, 3) + DELTA, P)
    with pytest.raises(PreconditionError):
        propose_triple(d, F(1, 3), ExponentParams(F(1, 500)))
    with pytest.raises(DomainError):
        propose_triple(d, F(1, 3), P, mode="bogus")


# ------------------------------------------------------------ constraint sets


def test_single_violation_flagged():
    n = F(1, 3)
    rec = check_constraints((n, F(0), F(0)), n, P, PROP91)
    assert [r.passed for r in rec] == [False, True, True, True]
    assert rec[0].margin == -DELTA


def test_mainprop_configuration():
    eps = F(1, 100)
    pe = ExponentParams(DELTA, eps)
    n = F(1, 3)
    q = F(3, 5) - 10 * eps
    q1, q2, q3 = n - eps, q - (F(2, 5) - eps), F(2, 5) - n
    rec = check_constraints((q1, q2, q3), n, pe, MAINPROP)
    # Q1 = N / x^eps is the boundary of a strict inequality
    assert rec[0].margin == 0 and not rec[0].passed
    assert [r.passed for r in rec[1:]] == [True, True, True]
    assert [r.lhs_exponent for r in rec[1:]] == [1 - 9 * eps, 2 - 37 * eps, F(9, 5) - 46 * eps]
    rec = check_constraints((q1 - F(1, 1000), q2, q3), n, pe, MAINPROP)
    assert all(r.passed for r in rec)


comp = st.fractions(min_value=0, max_value=F(1, 2), max_denominator=1000)


@given(comp, comp, comp, st.fractions(min_value=0, max_value=F(1, 3), max_denominator=1000),
       st.integers(0, 2), st.fractions(min_value=0, max_value=1, max_denominator=50))
def test_check_constraints_monotone(a, b, c, n, which, shrink):
    before = check_constraints((a, b, c), n, P)
    parts = [a, b, c]
    parts[which] *= shrink
    after = check_constraints(tuple(parts), n, P)
    for r0, r1 in zip(before, after):
        assert not (r0.passed and not r1.passed)


def test_integer_mode_constraints_exact_at_boundary():
    # x = 2**12, N = x^(1/3) = 16, delta = 1/2000: d1 = 16 exceeds N / x^delta
    rec = check_constraints((16, 1, 1), F(1, 3), P, PROP91, x=2**12)
    assert not rec[0].passed
    rec = check_constraints((15, 1, 1), F(1, 3), P, PROP91, x=2**12)
    assert rec[0].passed


# ------------------------------------------------------------ case dispatch


def _case4b_instance():
    delta = F(1, 2000)
    theta = F(7, 12) - 50 * delta
    t = 2 * theta - 1 + 3 * delta
    a = (theta - 2 * t) / F(19, 2)
    b = (t - 9 * a / 10) / 2
    named = (b,) * 4 + (a,) * 10
    return ExponentTuple(named, theta - sum(named)), 9 * a / 10 + delta


def test_case_4b_reachable():
    d, n = _case4b_instance()
    assert d.is_in_Dplus(THETA)
    assert dispatch_case(d, DELTA) == "4"
    tr = propose_triple(d, n, P)
    assert tr.case_used == "4b" and tr.passed
    assert oracle_feasible(d, n, P) is not None


def test_dispatch_total_and_exclusive():
    rng = random.Random(7)
    seen = set()
    for _ in range(3000):
        d, n = random_exponent_instance(rng, DELTA)
        case = dispatch_case(d, DELTA)
        t = 2 * THETA - 1 + 3 * DELTA
        v = list(d.named) + [F(0)] * 4
        conds = [v[0] >= t, v[1] + v[2] >= t, v[0] + v[3] >= t]
        expected = next((str(i + 1) for i, c in enumerate(conds) if c), "4")
        assert case == expected
        tr = propose_triple(d, n, P)
        assert tr.case_used == case or (case == "4" and tr.case_used == "4b")
        seen.add(case)
    assert seen == {"1", "2", "3", "4"}


def test_random_instances_are_admissible():
    rng = random.Random(3)
    for delta in (F(1, 1500), F(1, 2000)):
        theta = F(7, 12) - 50 * delta
        for _ in range(500):
            d, n = random_exponent_instance(rng, delta)
            assert d.is_in_Dplus(theta)
            assert 2 * delta <= n <= F(1, 3) + delta / 2


# ---------------------------------------------------------------- soundness


def test_soundness_harness_small():
    res = soundness_harness(600, seed=11, oracle_every=3)
    assert all(r.error is None and r.passed for r in res)
    assert all(r.oracle for r in res if r.oracle is not None)


def test_soundness_harness_worker_independent():
    a = soundness_harness(80, seed=5, workers=1)
    b = soundness_harness(80, seed=5, workers=2)
    assert [(r.seed, r.case, r.instance, r.n_exp) for r in a] == [(r.seed, r.case, r.instance, r.n_exp) for r in b]


def test_components_multiply_back():
    rng = random.Random(19)
    for _ in range(300):
        d, n = random_exponent_instance(rng, DELTA)
        tr = propose_triple(d, n, P)
        assert sum(c.total for c in tr.components) == d.total
        merged = sorted((v for c in tr.components for v in c.named), reverse=True)
        assert tuple(merged) == d.named


# ------------------------------------------------------------------- oracle


def test_oracle_agrees_with_linear_program():
    rng = random.Random(23)
    checked = 0
    for _ in range(250):
        d, n = random_exponent_instance(rng, DELTA, max_named=4)
        # also probe beyond the hypothesis region by raising the mass
        bump = rng.choice([F(0), F(1, 20), F(1, 5)])
        d = ExponentTuple(d.named, min(d.small_mass + bump, 1 - sum(d.named)))
        slack = lp_slack(d, n, DELTA)
        if abs(slack) < 1e-9:
            continue
        assert (oracle_feasible(d, n, P) is not None) == (slack > 0)
        checked += 1
    assert checked > 180


def test_oracle_integer_mode_small():
    tr = oracle_feasible(6, F(1, 3), P, mode="integer", x=10**12)
    assert tr is not None and tr.d1 * tr.d2 * tr.d3 == 6 and tr.passed


def test_oracle_size_limit():
    d = ExponentTuple((F(1, 100),) * (ORACLE_MAX_NAMED + 1))
    with pytest.raises(ResourceError):
        oracle_feasible(d, F(1, 3), P)


def test_integer_mode_random_members():
    x = 10**12
    D = Magnitude.of(x) ** THETA
    members = [f.value for f in enumerate_Dplus(D, 10**6)]
    rng = random.Random(1)
    for d in rng.sample(members, 25) + [1, max(members)]:
        tr = propose_triple(d, F(1, 3), P, mode="integer", x=x)
        assert tr.d1 * tr.d2 * tr.d3 == d and tr.passed
        # brute force over ordered divisor triples, exact constraint check
        found = any(
            all(r.passed for r in check_constraints(t, F(1, 3), P, PROP91, x=x))
            for t in oracles.ordered_triples(d)
        )
        assert found


def test_integer_mode_all_members_small_scale():
    x = 10**8
    D = Magnitude.of(x) ** THETA
    for f in enumerate_Dplus(D, 10**4):
        tr = propose_triple(f.value, F(1, 3), P, mode="integer", x=x)
        assert tr.passed


# -------------------------------------------------------------- extremal


@pytest.mark.parametrize("dp", [F(1, 100), F(1, 1000), F(1, 10**6)])
def test_extremal_infeasible(dp):
    rep = extremal_witness(dp)
    assert rep.in_Dplus and not rep.feasible
    assert rep.tuple.total == rep.theta
    # the strongest reading (delta = 0 in the constraints) is infeasible too
    assert lp_slack(rep.tuple, F(1, 3), F(0)) < 0


def test_extremal_shape():
    t = extremal_tuple(F(7, 12))
    assert t.named == (F(1, 6), F(1, 6), F(1, 12), F(1, 12))
    assert t.small_mass == F(1, 12)


def test_in_range_control_feasible():
    rep = in_range_control()
    assert rep.in_Dplus and rep.feasible
    assert oracle_feasible(rep.tuple, F(1, 3), P) is not None
    assert lp_slack(rep.tuple, F(1, 3), DELTA) >= 0


def test_extremal_domain():
    with pytest.raises(DomainError):
        extremal_witness(F(1, 50))
    with pytest.raises(DomainError):
        extremal_witness(0)
