"""Three-way factorization of linear-sieve support elements.

Given ``D = x**(7/12 - 50 delta)`` and ``x**(2 delta) <= N <= x**(1/3 + delta/2)``
every ``d`` in ``D+(D)`` splits as ``d = d1 d2 d3`` with

    d1 <= N / x**delta
    N**2 d2 d3**2 <= x**(1 - delta)
    N**2 d1 d2**4 d3**3 <= x**(2 - delta)
    N d1 d2**5 d3**2 <= x**(2 - delta)

The construction distinguishes four cases on the sizes of ``p1, p2 p3, p1 p4``
and fills the remaining bins greedily, with a repair step when the three-bin
greedy pass gets stuck.

Two representations are supported. In *exponent* mode ``d`` is an
:class:`ExponentTuple` (sizes in units of ``log x``, small primes pooled as
divisible mass) and all comparisons are exact rational comparisons. In
*integer* mode ``d`` is an integer and ``x`` a concrete integer; comparisons
are exact via :class:`~sievelab.exact.Magnitude`.
"""
from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import FactoredInteger, as_factored, divisors, tau_k
from .errors import DomainError, InvariantViolation, PreconditionError, ResourceError
from .exact import Magnitude
from .greedy import pick_bin
from .sieve_support import is_in_Dplus

F = Fraction
ORACLE_MAX_NAMED = 16
ORACLE_MAX_TAU3 = 10**7


# --------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class ExponentTuple:
    """A divisor in ``log x`` units: named prime exponents plus divisible small mass."""

    named: tuple[Fraction, ...] = ()
    small_mass: Fraction = F(0)

    def __post_init__(self):
        named = tuple(F(v) for v in self.named)
        object.__setattr__(self, "named", named)
        object.__setattr__(self, "small_mass", F(self.small_mass))
        if any(v <= 0 for v in named):
            raise DomainError("named exponents must be positive")
        if any(a < b for a, b in zip(named, named[1:])):
            raise DomainError("named exponents must be non-increasing")
        if self.small_mass < 0:
            raise DomainError("small mass must be non-negative")
        if self.total > 1:
            raise DomainError("total exponent exceeds 1")

    @property
    def total(self) -> Fraction:
        return sum(self.named, F(0)) + self.small_mass

    def is_in_Dplus(self, theta: Fraction) -> bool:
        """Exponent form of the support conditions at level ``x**theta``."""
        s = F(0)
        for j in range((len(self.named) + 1) // 2):
            if s + 3 * self.named[2 * j] > theta:
                return False
            s += self.named[2 * j]
            if 2 * j + 1 < len(self.named):
                s += self.named[2 * j + 1]
        return self.total <= theta

    def __str__(self) -> str:
        named = ", ".join(str(v) for v in self.named)
        return f"[{named}] + mass {self.small_mass}"


@dataclass(frozen=True)
class Inequality:
    """``N**n_power * d1**a1 * d2**a2 * d3**a3 (<|<=) x**(const + coeff * param)``."""

    label: str
    powers: tuple[int, int, int]
    n_power: int
    const: Fraction
    coeff: int
    strict: bool

    def rhs(self, param: Fraction) -> Fraction:
        return self.const + self.coeff * param


@dataclass(frozen=True)
class ConstraintSet:
    name: str
    inequalities: tuple[Inequality, ...]
    param: str  # "delta" or "epsilon"


PROP91 = ConstraintSet(
    "PROP91",
    (
        Inequality("d1 <= N/x^delta", (1, 0, 0), -1, F(0), -1, False),
        Inequality("N^2 d2 d3^2 <= x^(1-delta)", (0, 1, 2), 2, F(1), -1, False),
        Inequality("N^2 d1 d2^4 d3^3 <= x^(2-delta)", (1, 4, 3), 2, F(2), -1, False),
        Inequality("N d1 d2^5 d3^2 <= x^(2-delta)", (1, 5, 2), 1, F(2), -1, False),
    ),
    "delta",
)

MAINPROP = ConstraintSet(
    "MAINPROP",
    (
        Inequality("Q1 < N/x^eps", (1, 0, 0), -1, F(0), -1, True),
        Inequality("N^2 Q2 Q3^2 < x^(1-8eps)", (0, 1, 2), 2, F(1), -8, True),
        Inequality("N^2 Q1 Q2^4 Q3^3 < x^(2-15eps)", (1, 4, 3), 2, F(2), -15, True),
        Inequality("N Q1 Q2^5 Q3^2 < x^(2-15eps)", (1, 5, 2), 1, F(2), -15, True),
    ),
    "epsilon",
)

CONSTRAINT_SETS = {"PROP91": PROP91, "MAINPROP": MAINPROP}


@dataclass
class InequalityRecord:
    label: str
    lhs_exponent: Fraction | float
    rhs_exponent: Fraction
    passed: bool

    @property
    def margin(self) -> Fraction | float:
        return self.rhs_exponent - self.lhs_exponent


@dataclass
class TripleFactorization:
    """``d = d1 d2 d3`` with the case that produced it and its constraint record."""

    d1: object
    d2: object
    d3: object
    case_used: str
    record: list[InequalityRecord] = field(default_factory=list)
    mode: str = "exponent"

    @property
    def components(self) -> tuple:
        return self.d1, self.d2, self.d3

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.record)


@dataclass(frozen=True)
class ExponentParams:
    """Parameters for exponent mode, where ``x`` stays symbolic."""

    delta: Fraction = F(1, 2000)
    epsilon: Fraction = F(1, 100)
    x: int | None = None


# --------------------------------------------------------------------------
# scale handling


class _Scale:
    """Builds magnitudes ``x**e`` and converts components for one mode."""

    def __init__(self, x: int | None):
        self.x = x
        self._xm = Magnitude.of(x) if x is not None else None
        self._logx = math.log(x) if x is not None else None

    @property
    def symbolic(self) -> bool:
        return self.x is None

    def xp(self, e) -> Magnitude:
        e = F(e)
        return Magnitude.x_power(e) if self.x is None else self._xm ** e

    def size(self, comp) -> Magnitude:
        if isinstance(comp, ExponentTuple):
            return Magnitude.x_power(comp.total)
        if isinstance(comp, Magnitude):
            return comp
        return Magnitude.of(comp)

    def log_x_units(self, m: Magnitude) -> Fraction | float:
        if self.x is None:
            return m.x_exponent
        return m.log() / self._logx


def _params(params) -> tuple[int | None, Fraction, Fraction]:
    if params is None:
        return None, F(1, 2000), F(1, 100)
    return getattr(params, "x", None), F(params.delta), F(params.epsilon)


def check_constraints(triple, N_exp, params=None, cset: ConstraintSet = PROP91,
                      x: int | None = None) -> list[InequalityRecord]:
    """Evaluate every inequality of ``cset`` on ``triple`` exactly.

    ``triple`` holds three components: ints (integer mode, needs ``x``),
    :class:`ExponentTuple` values, Fractions read as ``log x`` exponents, or
    Magnitudes. ``N = x**N_exp``.
    """
    px, delta, eps = _params(params)
    if x is None:
        x = px
    comps = list(triple.components if isinstance(triple, TripleFactorization) else triple)
    if len(comps) != 3:
        raise DomainError("a triple needs exactly three components")
    symbolic_input = all(isinstance(c, (ExponentTuple, Fraction)) for c in comps)
    scale = _Scale(None if symbolic_input else x)
    if not scale.symbolic and x is None:
        raise DomainError("integer components need a concrete x")
    sizes = []
    for c in comps:
        if isinstance(c, Fraction):
            sizes.append(scale.xp(c))
        else:
            s = scale.size(c)
            if s < 1:
                raise DomainError("triple components must be >= 1")
            sizes.append(s)
    param = delta if cset.param == "delta" else eps
    Nm = scale.xp(N_exp)
    out = []
    for ineq in cset.inequalities:
        lhs = Nm ** ineq.n_power
        for s, k in zip(sizes, ineq.powers):
            lhs = lhs * s**k
        rhs_e = ineq.rhs(param)
        cmp = lhs.compare(scale.xp(rhs_e))
        ok = cmp < 0 if ineq.strict else cmp <= 0
        out.append(InequalityRecord(ineq.label, scale.log_x_units(lhs), rhs_e, ok))
    return out


# --------------------------------------------------------------------------
# the case analysis


def _water_fill(mass: Fraction, caps, contents, bins) -> list[Fraction]:
    """Split divisible mass (exponent units) over ``bins`` by largest slack first."""
    shares = [F(0)] * 3
    left = mass
    if not left:
        return shares
    slack = {i: (caps[i] / contents[i]).x_exponent for i in bins}
    order = sorted(bins, key=lambda i: (-slack[i], i))
    for i in order:
        take = min(max(slack[i], F(0)), left)
        shares[i] += take
        left -= take
        if not left:
            break
    if left:
        raise InvariantViolation(f"small mass {mass} does not fit the remaining capacity")
    return shares


def _greedy(items, caps, contents, members, bins):
    """Greedy pass; returns index of the first item that fits nowhere, else None."""
    for idx, (item, tag) in enumerate(items):
        i = pick_bin(item, caps, contents, bins)
        if i is None:
            return idx
        contents[i] = contents[i] * item
        members[i].append(tag)
    return None


def propose_triple(d, N_exp, params=None, mode: str = "exponent",
                   x: int | None = None, check: bool = True) -> TripleFactorization:
    """Factor ``d`` into three pieces satisfying the PROP91 inequalities.

    ``d`` is an :class:`ExponentTuple` in exponent mode or a positive integer
    in integer mode (then ``x`` or ``params.x`` fixes the scale). ``N_exp``
    is the exponent of ``N``. Cases are tried in the order p1 large, p2 p3
    large, p1 p4 large, otherwise; case "4b" is the repair after the
    three-bin greedy pass is stuck.
    """
    px, delta, eps = _params(params)
    if mode not in ("exponent", "integer"):
        raise DomainError(f"unknown mode {mode!r}")
    if mode == "integer":
        x = x if x is not None else px
        if x is None or x < 2:
            raise PreconditionError("integer mode needs a concrete scale x >= 2")
    else:
        x = None
    if not 0 < delta < F(1, 1000):
        raise PreconditionError("delta must lie in (0, 1/1000)")
    N_exp = F(N_exp)
    if not 2 * delta <= N_exp <= F(1, 3) + delta / 2:
        raise PreconditionError("N must satisfy x^(2 delta) <= N <= x^(1/3 + delta/2)")
    theta = F(7, 12) - 50 * delta
    scale = _Scale(x)
    D = scale.xp(theta)

    if mode == "exponent":
        if not isinstance(d, ExponentTuple):
            raise DomainError("exponent mode expects an ExponentTuple")
        if not d.is_in_Dplus(theta):
            raise PreconditionError(f"{d} is not in D+(x^{theta})")
        primes = [Magnitude.x_power(v) for v in d.named]
        mass = d.small_mass
    else:
        fi = as_factored(d)
        if not is_in_Dplus(fi, D):
            raise PreconditionError(f"{fi.value} is not in D+(x^{theta})")
        primes = [Magnitude.of(p) for p in fi.flattened]
        mass = F(0)

    one = Magnitude.one()
    p = primes + [one] * max(0, 4 - len(primes))
    tags = list(range(len(primes))) + [None] * max(0, 4 - len(primes))
    T = D**2 / scale.xp(1 - 3 * delta)
    Nm = scale.xp(N_exp)
    members: list[list[int]] = [[], [], []]
    contents = [one, one, one]

    def take(bin_, idxs):
        for k in idxs:
            contents[bin_] = contents[bin_] * p[k]
            if tags[k] is not None:
                members[bin_].append(tags[k])

    def rest(skip):
        return [(primes[k], k) for k in range(len(primes)) if k not in skip]

    if p[0] >= T:
        case = "1"
        caps = [Nm / scale.xp(delta), p[0], D * scale.xp(delta) / (Nm * p[0])]
        take(1, [0])
        stuck = _greedy(rest({0}), caps, contents, members, (0, 2))
        fill_bins = (0, 2)
    elif p[1] * p[2] >= T:
        case = "2"
        # delta (not 2 delta) in both caps; same product D1 D3 = D / d2
        caps = [Nm / scale.xp(delta), p[1] * p[2],
                scale.xp(delta) * D / (Nm * p[1] * p[2])]
        take(1, [1, 2])
        stuck = _greedy(rest({1, 2}), caps, contents, members, (0, 2))
        fill_bins = (0, 2)
    elif p[0] * p[3] >= T:
        case = "3"
        # delta (not 2 delta) in both caps; same product D1 D3 = D / d2
        caps = [Nm / scale.xp(delta), p[0] * p[3],
                scale.xp(delta) * D / (Nm * p[0] * p[3])]
        take(1, [0, 3])
        stuck = _greedy(rest({0, 3}), caps, contents, members, (0, 2))
        fill_bins = (0, 2)
    else:
        case = "4"
        caps = [Nm / scale.xp(delta), T, scale.xp(1 - 2 * delta) / (D * Nm)]
        take(1, [0, 3])
        if p[1] * p[2] > caps[0]:
            take(2, [1, 2])
        else:
            take(0, [1, 2])
        if not all(contents[i] <= caps[i] for i in range(3)):
            raise InvariantViolation("case 4 initial placement exceeds a cap")
        tail = rest({0, 1, 2, 3})
        stuck = _greedy(tail, caps, contents, members, (0, 1, 2))
        fill_bins = (0, 1, 2)
        if stuck is not None:
            case = "4b"
            item, tag = tail[stuck]
            if tag % 2 == 0 or tag < 5:
                # 0-based tag; the first stuck position must be even and >= 6
                raise InvariantViolation(f"case 4 greedy stuck at position {tag + 1}")
            contents[1] = contents[1] * item
            members[1].append(tag)
            cap2_repair = caps[1] * scale.xp(F(1, 12) - 6 * delta)
            if not (caps[1] <= contents[1] <= cap2_repair):
                raise InvariantViolation("repaired d2 leaves [D2, D2 x^(1/12 - 6 delta)]")
            caps = [caps[0], contents[1], caps[1] * caps[2] / contents[1]]
            stuck = _greedy(tail[stuck + 1 :], caps, contents, members, (0, 2))
            fill_bins = (0, 2)
    if stuck is not None:
        raise InvariantViolation(f"case {case}: greedy pass stuck for d={d}")
    if not all(contents[i] <= caps[i] or contents[i] == one for i in fill_bins):
        raise InvariantViolation(f"case {case}: a bin exceeds its cap")

    if mode == "exponent":
        shares = _water_fill(mass, caps, contents, fill_bins)
        comps = [
            ExponentTuple(tuple(sorted((d.named[k] for k in members[i]), reverse=True)), shares[i])
            for i in range(3)
        ]
        if sum((c.total for c in comps), F(0)) != d.total:
            raise InvariantViolation("components do not multiply back to d")
    else:
        comps = [int(c.as_fraction()) for c in contents]
        if comps[0] * comps[1] * comps[2] != fi.value:
            raise InvariantViolation("components do not multiply back to d")

    triple = TripleFactorization(*comps, case_used=case, mode=mode)
    triple.record = check_constraints(comps, N_exp, params, PROP91, x=x)
    if check and not triple.passed:
        failed = [r.label for r in triple.record if not r.passed]
        raise InvariantViolation(f"case {case} output violates {failed} for d={d}")
    return triple


def dispatch_case(d: ExponentTuple, delta) -> str:
    """Which of the four cases applies to ``d`` (exponent mode)."""
    delta = F(delta)
    theta = F(7, 12) - 50 * delta
    t = 2 * theta - 1 + 3 * delta
    v = list(d.named) + [F(0)] * max(0, 4 - len(d.named))
    if v[0] >= t:
        return "1"
    if v[1] + v[2] >= t:
        return "2"
    if v[0] + v[3] >= t:
        return "3"
    return "4"


# --------------------------------------------------------------------------
# independent feasibility oracle


def _fm_feasible(rows, nvars):
    """Fourier-Motzkin feasibility with back-substitution.

    ``rows`` are ``(coeffs, rhs, strict)`` meaning ``coeffs . v (<|<=) rhs``.
    Returns a feasible point (list of Fractions) or ``None``.
    """
    systems = [rows]
    for k in range(nvars - 1, -1, -1):
        cur = systems[-1]
        pos = [r for r in cur if r[0][k] > 0]
        neg = [r for r in cur if r[0][k] < 0]
        zero = [r for r in cur if r[0][k] == 0]
        nxt = list(zero)
        for cp, bp, sp in pos:
            for cn, bn, sn in neg:
                lp, ln = -cn[k], cp[k]
                coeffs = tuple(lp * a + ln * b for a, b in zip(cp, cn))
                nxt.append((coeffs, lp * bp + ln * bn, sp or sn))
        systems.append(nxt)
    for coeffs, b, strict in systems[-1]:
        if (strict and not 0 < b) or (not strict and not 0 <= b):
            return None
    point = [F(0)] * nvars
    for k in range(nvars):
        cur = systems[nvars - 1 - k]
        lo, lo_strict, hi, hi_strict = None, False, None, False
        for coeffs, b, strict in cur:
            a = coeffs[k]
            if a == 0:
                continue
            rest = b - sum(coeffs[i] * point[i] for i in range(k))
            bound = rest / a
            if a > 0 and (hi is None or bound < hi or (bound == hi and strict)):
                hi, hi_strict = bound, strict
            elif a < 0 and (lo is None or bound > lo or (bound == lo and strict)):
                lo, lo_strict = bound, strict
        if lo is not None and hi is not None:
            point[k] = lo if lo == hi else (lo + hi) / 2
        elif lo is not None:
            point[k] = lo + 1 if lo_strict else lo
        elif hi is not None:
            point[k] = hi - 1 if hi_strict else hi
    return point


def _exponent_assignment_feasible(bins_named, mass, N_exp, param, cset):
    """Mass split (m1, m2, m3) making the assignment feasible, or ``None``."""
    base = [sum(b, F(0)) for b in bins_named]
    rows = []
    for ineq in cset.inequalities:
        a = ineq.powers
        b = ineq.rhs(param) - ineq.n_power * N_exp - sum(ai * e for ai, e in zip(a, base))
        if mass == 0:
            if (ineq.strict and not b > 0) or (not ineq.strict and not b >= 0):
                return None
            continue
        # substitute m2 = mass - m1 - m3
        rows.append(((a[0] - a[1], a[2] - a[1]), b - a[1] * mass, ineq.strict))
    if mass == 0:
        return (F(0), F(0), F(0))
    rows += [((F(-1), F(0)), F(0), False), ((F(0), F(-1)), F(0), False),
             ((F(1), F(1)), mass, False)]
    pt = _fm_feasible(rows, 2)
    if pt is None:
        return None
    m1, m3 = pt
    return (m1, mass - m1 - m3, m3)


def _assignments(named, N_exp, param, cset):
    """All bin assignments of ``named``, skipping subtrees whose partial sums fail.

    Every inequality has non-negative powers, so a partial assignment that
    already violates one cannot be completed.
    """
    slack0 = [ineq.rhs(param) - ineq.n_power * N_exp for ineq in cset.inequalities]
    bins = [[], [], []]

    def ok(slack):
        return all(s > 0 if ineq.strict else s >= 0 for s, ineq in zip(slack, cset.inequalities))

    def rec(i, slack):
        if i == len(named):
            yield [list(b) for b in bins]
            return
        v = named[i]
        for b in range(3):
            nxt = [s - ineq.powers[b] * v for s, ineq in zip(slack, cset.inequalities)]
            if not ok(nxt):
                continue
            bins[b].append(v)
            yield from rec(i + 1, nxt)
            bins[b].pop()

    if ok(slack0):
        yield from rec(0, slack0)


def oracle_feasible(d, N_exp, params=None, cset: ConstraintSet = PROP91,
                    mode: str = "exponent", x: int | None = None) -> TripleFactorization | None:
    """Exhaustive search for any triple satisfying ``cset``.

    Integer mode scans all ordered divisor triples of ``d``. Exponent mode
    tries every assignment of named exponents to the three bins and solves
    the divisible-mass split exactly (Fourier-Motzkin on two variables).
    """
    px, delta, eps = _params(params)
    param = delta if cset.param == "delta" else eps
    N_exp = F(N_exp)
    if mode == "exponent":
        if len(d.named) > ORACLE_MAX_NAMED:
            raise ResourceError(f"oracle limited to {ORACLE_MAX_NAMED} named exponents")
        named = d.named
        for bins_named in _assignments(named, N_exp, param, cset):
            split = _exponent_assignment_feasible(bins_named, d.small_mass, N_exp, param, cset)
            if split is None:
                continue
            comps = [ExponentTuple(tuple(sorted(bins_named[i], reverse=True)), split[i]) for i in range(3)]
            triple = TripleFactorization(*comps, case_used="oracle", mode="exponent")
            triple.record = check_constraints(comps, N_exp, params, cset)
            if not triple.passed:
                raise InvariantViolation("oracle witness fails its own constraints")
            return triple
        return None
    x = x if x is not None else px
    fi = as_factored(d)
    if tau_k(fi, 3) > ORACLE_MAX_TAU3:
        raise ResourceError(f"tau_3(d) exceeds {ORACLE_MAX_TAU3}")
    logx = math.log(x)
    divs = divisors(fi)
    logs = {e: math.log(e) / logx for e in divs}
    rhs = [ineq.rhs(param) for ineq in cset.inequalities]
    for d1 in divs:
        for d2 in divs:
            if fi.value % (d1 * d2):
                continue
            d3 = fi.value // (d1 * d2)
            ok = True
            ambiguous = False
            for ineq, r in zip(cset.inequalities, rhs):
                a = ineq.powers
                lhs = ineq.n_power * float(N_exp) + a[0] * logs[d1] + a[1] * logs[d2] + a[2] * logs[d3]
                gap = float(r) - lhs
                if abs(gap) < 1e-9:
                    ambiguous = True
                elif gap < 0:
                    ok = False
                    break
            if not ok:
                continue
            if ambiguous:
                rec = check_constraints((d1, d2, d3), N_exp, params, cset, x=x)
                if not all(r.passed for r in rec):
                    continue
            triple = TripleFactorization(d1, d2, d3, case_used="oracle", mode="integer")
            triple.record = check_constraints((d1, d2, d3), N_exp, params, cset, x=x)
            return triple
    return None


# --------------------------------------------------------------------------
# the extremal configuration


@dataclass
class WitnessReport:
    theta: Fraction
    tuple: ExponentTuple
    in_Dplus: bool
    feasible: bool
    witness: TripleFactorization | None
    constraint_delta: Fraction


def extremal_tuple(theta: Fraction) -> ExponentTuple:
    """``p1 = p2 = D**(2/7)``, ``p3 = p4 = D**(1/7)``, small primes filling up to ``D``."""
    theta = F(theta)
    return ExponentTuple((2 * theta / 7, 2 * theta / 7, theta / 7, theta / 7), theta / 7)


def extremal_witness(delta_prime, N_exp=F(1, 3), constraint_delta=None) -> WitnessReport:
    """Run the oracle on the extremal tuple at ``D = x**(7/12 + delta_prime)``.

    The constraints use ``delta = delta_prime`` unless ``constraint_delta`` is
    given; since every right-hand side only shrinks as delta grows,
    infeasibility at a smaller delta implies it at every larger one.
    """
    delta_prime = F(delta_prime)
    if not 0 < delta_prime <= F(1, 100):
        raise DomainError("delta_prime must lie in (0, 1/100]")
    cd = F(constraint_delta) if constraint_delta is not None else delta_prime
    theta = F(7, 12) + delta_prime
    tup = extremal_tuple(theta)
    params = ExponentParams(cd)
    wit = oracle_feasible(tup, N_exp, params, PROP91)
    return WitnessReport(theta, tup, tup.is_in_Dplus(theta), wit is not None, wit, cd)


def in_range_control(delta=F(1, 2000), N_exp=F(1, 3)) -> WitnessReport:
    """Same shape at the admissible level ``7/12 - 50 delta``; must be feasible."""
    delta = F(delta)
    theta = F(7, 12) - 50 * delta
    tup = extremal_tuple(theta)
    params = ExponentParams(delta)
    triple = propose_triple(tup, N_exp, params)
    return WitnessReport(theta, tup, tup.is_in_Dplus(theta), triple.passed, triple, delta)


# --------------------------------------------------------------------------
# random instances


def random_exponent_instance(rng: random.Random, delta, max_named: int = 8,
                             denom: int = 10**6) -> tuple[ExponentTuple, Fraction]:
    """A random admissible ``(d, N_exp)`` pair in exponent mode.

    Named exponents are drawn one at a time below the bound the support
    conditions leave for them (sometimes exactly at the bound, to exercise
    ties); the small mass takes a random share of what remains.
    """
    delta = F(delta)
    theta = F(7, 12) - 50 * delta
    k = rng.randint(0, max_named)
    named: list[Fraction] = []
    s = F(0)
    prev = theta
    for i in range(k):
        cap = (theta - s) / 3 if i % 2 == 0 else theta - s
        cap = min(cap, prev)
        if cap <= 0:
            break
        if rng.random() < 0.15:
            v = cap
        else:
            v = cap * F(rng.randint(1, denom), denom)
        named.append(v)
        s += v
        prev = v
    left = theta - s
    r = rng.random()
    if r < 0.3:
        mass = left
    elif r < 0.4:
        mass = F(0)
    else:
        mass = left * F(rng.randint(0, denom), denom)
    lo, hi = 2 * delta, F(1, 3) + delta / 2
    u = rng.random()
    if u < 0.05:
        n_exp = lo
    elif u < 0.1:
        n_exp = hi
    else:
        n_exp = lo + (hi - lo) * F(rng.randint(0, denom), denom)
    return ExponentTuple(tuple(named), mass), n_exp


@dataclass
class HarnessResult:
    seed: int
    delta: Fraction
    instance: ExponentTuple
    n_exp: Fraction
    case: str | None
    passed: bool
    oracle: bool | None
    error: str | None = None


def _run_one(args) -> HarnessResult:
    seed, delta, with_oracle = args
    rng = random.Random(seed)
    tup, n_exp = random_exponent_instance(rng, delta)
    params = ExponentParams(F(delta))
    try:
        triple = propose_triple(tup, n_exp, params)
    except InvariantViolation as exc:
        return HarnessResult(seed, delta, tup, n_exp, None, False, None, str(exc))
    oracle = None
    if with_oracle:
        oracle = oracle_feasible(tup, n_exp, params) is not None
    return HarnessResult(seed, delta, tup, n_exp, triple.case_used, triple.passed, oracle)


def soundness_harness(count: int, seed: int = 0, deltas: Sequence = (F(1, 1500), F(1, 2000)),
                      oracle_every: int = 0, workers: int = 1) -> list[HarnessResult]:
    """Run ``propose_triple`` on ``count`` random instances, results in seed order.

    Instance ``i`` uses seed ``seed * 1_000_003 + i`` and ``deltas[i % len(deltas)]``,
    so the output does not depend on ``workers``. Every ``oracle_every``-th
    instance (0 = never) is cross-checked by :func:`oracle_feasible`.
    """
    jobs = [
        (seed * 1_000_003 + i, F(deltas[i % len(deltas)]), bool(oracle_every) and i % oracle_every == 0)
        for i in range(count)
    ]
    if workers <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs, chunksize=max(1, count // (8 * workers))))
