"""Support set of the upper-bound linear sieve and its factorization properties.

``D+(D)`` is the set of ``d = p_1 ... p_r`` (``p_1 >= ... >= p_r``) with
``p_1 ... p_{2j} p_{2j+1}**3 <= D`` for every ``0 <= j < r/2``. Levels may be
ints, Fractions or :class:`~sievelab.exact.Magnitude` values such as
``10**(3/2)``; every comparison against a level is exact.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .arith import FactoredInteger, as_factored, divisors, factorize, mobius, prime_table
from .errors import DomainError, InvariantViolation, PreconditionError, ResourceError
from .exact import Magnitude
from .greedy import greedy_fill

ENUM_LIMIT = 10**6
DEFAULT_ETA = Fraction(1, 20)

Level = "int | Fraction | Magnitude"


def _level(D) -> Magnitude:
    return Magnitude.of(D)


class _LevelCmp:
    """``value <= D`` for integer values, exact and cheap for rational ``D``."""

    def __init__(self, D):
        if isinstance(D, Magnitude):
            frac = D.as_fraction()
            self._rational = frac
            self._mag = D
        else:
            self._rational = Fraction(D)
            self._mag = None
        if self._rational is not None and self._rational < 1:
            raise DomainError(f"level must be >= 1, got {self._rational}")
        if self._rational is None and self._mag < 1:
            raise DomainError(f"level must be >= 1, got {self._mag}")

    def le(self, value: int) -> bool:
        if self._rational is not None:
            return value <= self._rational
        return Magnitude.of(value) <= self._mag


# --------------------------------------------------------------------------
# membership


def _prefix_ok(primes: tuple[int, ...], cmp: _LevelCmp) -> bool:
    prod = 1
    r = len(primes)
    for j in range((r + 1) // 2):
        if not cmp.le(prod * primes[2 * j] ** 3):
            return False
        prod *= primes[2 * j]
        if 2 * j + 1 < r:
            prod *= primes[2 * j + 1]
    return True


def is_in_Dplus(d: int | FactoredInteger, D) -> bool:
    """Membership of ``d`` in the linear-sieve support set ``D+(D)``."""
    return _prefix_ok(as_factored(d).flattened, _LevelCmp(D))


def lambda_plus(d: int | FactoredInteger, D) -> int:
    """Upper-bound linear sieve weight: ``mu(d)`` on ``D+(D)``, else 0."""
    fi = as_factored(d)
    mu = mobius(fi)
    if mu == 0:
        return 0
    return mu if is_in_Dplus(fi, D) else 0


def enumerate_Dplus(D, limit: int) -> list[FactoredInteger]:
    """All members of ``D+(D)`` not exceeding ``limit``, sorted by value.

    Every member is ``D**(1/3)``-smooth, so a depth-first search over
    non-increasing prime sequences with prefix checks is exhaustive.
    """
    if limit > ENUM_LIMIT:
        raise ResourceError(f"exhaustive enumeration is limited to {ENUM_LIMIT}")
    cmp = _LevelCmp(D)
    if limit < 1:
        return []
    pmax = 1
    while cmp.le((pmax + 1) ** 3):
        pmax += 1
    primes = [int(p) for p in prime_table(max(2, pmax))] if pmax >= 2 else []
    primes = [p for p in primes if p <= pmax]
    out: list[tuple[int, ...]] = [()]

    def extend(seq: list[int], prod: int, hi: int) -> None:
        # seq has len r; the next prime sits at 1-based position r + 1
        r = len(seq)
        for idx in range(hi, -1, -1):
            p = primes[idx]
            if prod * p > limit:
                continue
            if r % 2 == 0 and not cmp.le(prod * p**3):
                continue
            seq.append(p)
            out.append(tuple(seq))
            extend(seq, prod * p, idx)
            seq.pop()

    extend([], 1, len(primes) - 1)
    members = [FactoredInteger.from_primes(s) for s in out]
    members.sort(key=lambda f: f.value)
    return members


# --------------------------------------------------------------------------
# two-way and three-way splits


def _check_product(levels: Iterable, D) -> None:
    prod = Magnitude.one()
    for q in levels:
        q = _level(q)
        if q < 1:
            raise PreconditionError(f"split levels must be >= 1, got {q}")
        prod = prod * q
    if prod != _level(D):
        raise PreconditionError("split levels must multiply exactly to the total level")


def split_two(d: int | FactoredInteger, D, D1, D2) -> tuple[int, int]:
    """Write ``d = d1 * d2`` with ``d1 <= D1``, ``d2 <= D2`` for ``d`` in ``D+(D)``.

    Primes are placed largest first into whichever bin has room, preferring
    the larger remaining ratio and then the lower index. The placement cannot
    fail when ``D = D1 * D2``; a failure raises ``InvariantViolation``.
    """
    fi = as_factored(d)
    _check_product((D1, D2), D)
    if not is_in_Dplus(fi, D):
        raise PreconditionError(f"{fi.value} is not in D+({D})")
    res = greedy_fill([Magnitude.of(p) for p in fi.flattened], [_level(D1), _level(D2)])
    if res is None:
        raise InvariantViolation(f"greedy two-way split failed for d={fi.value}")
    d1, d2 = (int(c.as_fraction()) for c in res[0])
    if d1 * d2 != fi.value:
        raise InvariantViolation("split does not multiply back to d")
    return d1, d2


def split_greedy(d: int | FactoredInteger, levels: list) -> tuple[int, ...] | None:
    """Greedy k-way split of ``d`` under the given levels; ``None`` if stuck."""
    fi = as_factored(d)
    res = greedy_fill([Magnitude.of(p) for p in fi.flattened], [_level(q) for q in levels])
    if res is None:
        return None
    return tuple(int(c.as_fraction()) for c in res[0])


def split_exhaustive(d: int | FactoredInteger, levels: list) -> tuple[int, ...] | None:
    """First ordered factorization ``d = d_1 ... d_k`` with ``d_i <= levels[i]``."""
    fi = as_factored(d)
    cmps = [_LevelCmp(q) for q in levels]
    divs = divisors(fi)

    def rec(rest: int, i: int) -> tuple[int, ...] | None:
        if i == len(cmps) - 1:
            return (rest,) if cmps[i].le(rest) else None
        for e in divs:
            if rest % e == 0 and cmps[i].le(e):
                tail = rec(rest // e, i + 1)
                if tail is not None:
                    return (e,) + tail
        return None

    return rec(fi.value, 0)


# --------------------------------------------------------------------------
# weight sequences


@dataclass
class WeightSequence:
    """Sparse weights ``q -> lambda_q`` declared at a level ``Q``."""

    level: Magnitude
    entries: dict[int, Fraction | int | float]
    coprime_to_a: int | None = None
    squarefree_only: bool = False

    def __post_init__(self):
        self.level = _level(self.level)
        cmp = _LevelCmp(self.level)
        self.entries = {int(q): v for q, v in self.entries.items() if v}
        for q in self.entries:
            if q < 1 or not cmp.le(q):
                raise DomainError(f"support point {q} exceeds level {self.level}")
            if self.coprime_to_a is not None and math.gcd(q, self.coprime_to_a) != 1:
                raise DomainError(f"support point {q} is not coprime to {self.coprime_to_a}")
            if self.squarefree_only and not as_factored(q).is_squarefree:
                raise DomainError(f"support point {q} is not squarefree")

    def __getitem__(self, q: int):
        return self.entries.get(q, 0)

    def support(self) -> list[int]:
        return sorted(self.entries)

    def max_abs(self) -> float:
        return max((abs(v) for v in self.entries.values()), default=0)

    @classmethod
    def delta_one(cls, level=1) -> "WeightSequence":
        return cls(level, {1: 1})

    @classmethod
    def from_function(cls, level, fn: Callable[[int], object], limit: int, **flags) -> "WeightSequence":
        return cls(level, {q: fn(q) for q in range(1, limit + 1)}, **flags)

    @classmethod
    def lambda_plus(cls, D, limit: int | None = None, a: int | None = None) -> "WeightSequence":
        """The weights ``lambda+_d`` at level ``D``, optionally restricted to ``(d, a) = 1``."""
        lv = _level(D)
        if limit is None:
            frac = lv.as_fraction()
            limit = int(frac) if frac is not None else int(math.floor(float(lv)))
        entries = {}
        for fi in enumerate_Dplus(D, limit):
            mu = mobius(fi)
            if mu and (a is None or math.gcd(fi.value, a) == 1):
                entries[fi.value] = mu
        return cls(lv, entries, coprime_to_a=a, squarefree_only=True)


def convolve(*seqs: Mapping[int, object], limit: int | None = None) -> dict[int, object]:
    """Dirichlet convolution of sparse sequences (optionally truncated)."""
    out: dict[int, object] = {1: 1}
    for s in seqs:
        nxt: dict[int, object] = {}
        for n, u in out.items():
            for m, v in s.items():
                if not v:
                    continue
                k = n * m
                if limit is not None and k > limit:
                    continue
                nxt[k] = nxt.get(k, 0) + u * v
        out = {k: v for k, v in nxt.items() if v}
    return out


@dataclass
class TriplyReport:
    """Outcome of per-element three-way splitting of a weight sequence."""

    levels: tuple
    checked: int
    greedy_failures: list[int]
    infeasible: list[int]
    splits: dict[int, tuple[int, int, int]] = field(repr=False, default_factory=dict)

    @property
    def factorable(self) -> bool:
        return not self.infeasible


def verify_triply_well_factorable(seq: WeightSequence, Q1, Q2, Q3, test_limit: int) -> TriplyReport:
    """Try to split every support point ``q <= test_limit`` as ``q1 q2 q3``, ``q_i <= Q_i``.

    Each point is first attempted greedily (largest prime first); when the
    greedy pass is stuck an exhaustive search over ordered divisor triples
    decides whether any split exists. Points with no split are reported in
    ``infeasible``.
    """
    _check_product((Q1, Q2, Q3), seq.level)
    levels = [Q1, Q2, Q3]
    greedy_fail, infeasible, splits = [], [], {}
    checked = 0
    for q in seq.support():
        if q > test_limit:
            break
        checked += 1
        got = split_greedy(q, levels)
        if got is None:
            greedy_fail.append(q)
            got = split_exhaustive(q, levels)
            if got is None:
                infeasible.append(q)
                continue
        splits[q] = got
    return TriplyReport(tuple(levels), checked, greedy_fail, infeasible, splits)


# --------------------------------------------------------------------------
# the eta-adic variant and its two-factor decomposition


class EtaBoxes:
    """Boxes ``[B_k, B_{k+1})`` with ``B_k = 2**((1+eta)**k)``.

    Every prime lies in exactly one box; box ``k`` has lower end ``B_k`` and
    upper end ``B_{k+1} = B_k**(1+eta)``.
    """

    def __init__(self, eta: Fraction):
        self.eta = Fraction(eta)
        self.growth = 1 + self.eta
        self._cache: dict[int, int] = {}

    def lower(self, k: int) -> Magnitude:
        return Magnitude({2: self.growth**k})

    def upper(self, k: int) -> Magnitude:
        return self.lower(k + 1)

    def box(self, p: int) -> int:
        if p in self._cache:
            return self._cache[p]
        k = max(0, int(math.floor(math.log(math.log2(p)) / math.log(float(self.growth)))) - 1)
        mp = Magnitude.of(p)
        while not mp < self.upper(k):
            k += 1
        while k > 0 and mp < self.lower(k):
            k -= 1
        self._cache[p] = k
        return k


def _signature(fi: FactoredInteger, boxes: EtaBoxes) -> tuple[int, ...]:
    return tuple(sorted((boxes.box(p) for p in fi.flattened), reverse=True))


def _box_admissible(sig: tuple[int, ...], boxes: EtaBoxes, level: Magnitude) -> bool:
    prod = Magnitude.one()
    r = len(sig)
    for j in range((r + 1) // 2):
        low = boxes.lower(sig[2 * j])
        if not prod * low**3 <= level:
            return False
        prod = prod * low
        if 2 * j + 1 < r:
            prod = prod * boxes.lower(sig[2 * j + 1])
    return True


def lambda_tilde(d: int | FactoredInteger, D, eta: Fraction = DEFAULT_ETA) -> int:
    """Eta-adic variant: ``(-1)**r`` on squarefree ``d`` whose box profile is admissible.

    Admissible means the lower box ends ``L_1 >= ... >= L_r`` satisfy
    ``L_1 ... L_{2j} L_{2j+1}**3 <= D**(1/(1+eta))`` for all ``0 <= j < r/2``.
    """
    fi = as_factored(d)
    if not fi.is_squarefree:
        return 0
    boxes = EtaBoxes(eta)
    level = _level(D) ** (1 / boxes.growth)
    sig = _signature(fi, boxes)
    if not _box_admissible(sig, boxes, level):
        return 0
    return -1 if len(sig) % 2 else 1


@dataclass
class FactorPair:
    """One term ``alpha * beta`` of a two-factor decomposition."""

    alpha: WeightSequence
    beta: WeightSequence
    signature: tuple[int, ...]
    thresholds: tuple[tuple[int, int], ...] = ()


@dataclass
class TildeDecomposition:
    D: Magnitude
    D1: Magnitude
    D2: Magnitude
    eta: Fraction
    pairs: list[FactorPair]
    signatures: list[tuple[int, ...]]

    @property
    def pair_count(self) -> int:
        return len(self.pairs)

    def evaluate(self, limit: int) -> dict[int, int]:
        """``sum_j (alpha_j * beta_j)_d`` for all ``d <= limit`` by direct convolution."""
        total: dict[int, int] = {}
        for pair in self.pairs:
            for k, v in convolve(pair.alpha.entries, pair.beta.entries, limit=limit).items():
                total[k] = total.get(k, 0) + v
        return {k: v for k, v in total.items() if v}


def _admissible_signatures(boxes: EtaBoxes, level: Magnitude, box_sizes: dict[int, int]):
    ks = sorted(box_sizes, reverse=True)
    out = [()]

    def extend(sig: list[int], start: int) -> None:
        for i in range(start, len(ks)):
            k = ks[i]
            if sig.count(k) >= box_sizes[k]:
                continue
            cand = tuple(sig + [k])
            if _box_admissible(cand, boxes, level):
                out.append(cand)
                sig.append(k)
                extend(sig, i)
                sig.pop()

    extend([], 0)
    return out


def decompose_tilde_lambda(D, D1, D2, eta: Fraction = DEFAULT_ETA) -> TildeDecomposition:
    """Write the eta-adic weights as a finite sum of convolutions ``alpha * beta``.

    For every admissible box profile the boxes are split greedily between the
    two sides using the upper box ends, so each ``alpha`` is supported below
    ``D1`` and each ``beta`` below ``D2``. When one box contributes primes to
    both sides, the side-1 primes of that box are forced above a threshold
    prime ``t`` (with ``t`` the smallest of them) and the side-2 primes below
    it; summing over ``t`` counts every squarefree ``d`` exactly once.
    All entries are 0 or +-1.
    """
    eta = Fraction(eta)
    if not 0 < eta <= Fraction(1, 10):
        raise DomainError("eta must lie in (0, 1/10]")
    Dm, D1m, D2m = _level(D), _level(D1), _level(D2)
    _check_product((D1m, D2m), Dm)
    boxes = EtaBoxes(eta)
    level = Dm ** (1 / boxes.growth)
    top = float(Dm)
    primes = [int(p) for p in prime_table(max(2, int(top) + 1)) if p <= top]
    box_primes: dict[int, list[int]] = {}
    for p in primes:
        box_primes.setdefault(boxes.box(p), []).append(p)
    sigs = _admissible_signatures(boxes, level, {k: len(v) for k, v in box_primes.items()})

    # squarefree integers up to max(D1, D2), indexed by box profile
    bound = int(max(float(D1m), float(D2m))) + 1
    by_sig: dict[tuple[int, ...], list[FactoredInteger]] = {}
    for n in range(1, bound + 1):
        fi = factorize(n)
        if fi.is_squarefree:
            by_sig.setdefault(_signature(fi, boxes), []).append(fi)

    pairs: list[FactorPair] = []
    for sig in sigs:
        res = greedy_fill([boxes.upper(k) for k in sig], [D1m, D2m])
        if res is None:
            raise InvariantViolation(f"box profile {sig} admits no two-way split")
        side = res[1]
        sig1 = tuple(k for k, s in zip(sig, side) if s == 0)
        sig2 = tuple(k for k, s in zip(sig, side) if s == 1)
        shared = sorted(set(sig1) & set(sig2), reverse=True)
        cand1 = by_sig.get(sig1, [])
        cand2 = by_sig.get(sig2, [])
        sign1 = -1 if len(sig1) % 2 else 1
        sign2 = -1 if len(sig2) % 2 else 1
        for ts in itertools.product(*(box_primes[k] for k in shared)):
            thr = dict(zip(shared, ts))
            alpha = {
                fi.value: sign1
                for fi in cand1
                if all(min(p for p in fi.flattened if boxes.box(p) == k) == t for k, t in thr.items())
            }
            if not alpha:
                continue
            beta = {
                fi.value: sign2
                for fi in cand2
                if all(max(p for p in fi.flattened if boxes.box(p) == k) < t for k, t in thr.items())
            }
            if not beta:
                continue
            pairs.append(
                FactorPair(
                    WeightSequence(D1m, alpha, squarefree_only=True),
                    WeightSequence(D2m, beta, squarefree_only=True),
                    sig,
                    tuple(sorted(thr.items())),
                )
            )
    return TildeDecomposition(Dm, D1m, D2m, eta, pairs, sigs)
