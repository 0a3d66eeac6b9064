"""Heath-Brown's identity for the von Mangoldt function, checked exactly.

For ``k >= 1`` and ``n <= 2x``

    Lambda(n) = sum_{j=1}^{k} (-1)**(j-1) * C(k, j)
                * sum_{n1..nj m1..mj = n, m_i <= 2 x**(1/k)} mu(m1)...mu(mj) log n1

Values are kept as integer combinations of ``log p`` so that both sides
are compared exactly. The sign can be switched to ``(-1)**j`` to reproduce
the variant in which every summand is negated.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .arith import (
    LogCombination,
    ZERO_LOG,
    as_factored,
    divisors,
    mobius,
    von_mangoldt,
)
from .errors import DomainError, ResourceError

TERMS_LIMIT = 10**5
VERIFY_LIMIT = 10**5
SIGNS = ("resolved", "printed")


@dataclass(frozen=True)
class HBTerm:
    """One tuple ``(n1..nj, m1..mj)`` and its contribution."""

    j: int
    sign_coefficient: int
    tuple: tuple[int, ...]
    value: LogCombination


def _coefficient(k: int, j: int, sign: str) -> int:
    if sign not in SIGNS:
        raise DomainError(f"sign must be one of {SIGNS}")
    s = (-1) ** (j - 1) if sign == "resolved" else (-1) ** j
    return s * math.comb(k, j)


def _cutoff_ok(m: int, k: int, x, scale: Fraction) -> bool:
    # m <= scale * x**(1/k)  <=>  m**k <= scale**k * x
    return m**k <= scale**k * x


def _check_args(n: int, k: int, x) -> None:
    if not 1 <= k <= 4:
        raise DomainError("k must lie in 1..4")
    if n < 1:
        raise DomainError("n must be positive")
    if x <= 0 or n > 2 * x:
        raise DomainError("need 1 <= n <= 2x")


def _ordered_factorizations(n: int, parts: int):
    """All ordered ``parts``-tuples of positive integers with product ``n``."""
    if parts == 1:
        yield (n,)
        return
    for d in divisors(n):
        for rest in _ordered_factorizations(n // d, parts - 1):
            yield (d,) + rest


def heath_brown_terms(n: int, k: int, x, cutoff=Fraction(2), sign: str = "resolved",
                      include_zero: bool = False) -> list[HBTerm]:
    """Enumerate the tuples contributing to the identity at ``n``.

    Tuples with some ``mu(m_i) = 0`` contribute nothing and are skipped
    unless ``include_zero`` is set.
    """
    _check_args(n, k, x)
    if n > TERMS_LIMIT:
        raise ResourceError(f"tuple enumeration limited to n <= {TERMS_LIMIT}")
    scale = Fraction(cutoff)
    out = []
    for j in range(1, k + 1):
        coef = _coefficient(k, j, sign)
        for tup in _ordered_factorizations(n, 2 * j):
            ms = tup[j:]
            if not all(_cutoff_ok(m, k, x, scale) for m in ms):
                continue
            mu = math.prod(mobius(m) for m in ms)
            if mu == 0 and not include_zero:
                continue
            value = LogCombination.log(tup[0]).scale(coef * mu) if mu else ZERO_LOG
            out.append(HBTerm(j, coef, tup, value))
    return out


def sum_terms(terms) -> LogCombination:
    total = ZERO_LOG
    for t in terms:
        total = total + t.value
    return total


def heath_brown_sum(n: int, k: int, x, cutoff=Fraction(2), sign: str = "resolved") -> LogCombination:
    """Right-hand side at ``n`` via Dirichlet convolution on the divisors of ``n``.

    Uses ``g_j = 1^{*(j-1)} * mu_z^{*j}`` with ``mu_z`` the truncated Moebius
    function, so the sum equals ``sum_j c_j sum_{n1 | n} g_j(n / n1) log n1``.
    """
    _check_args(n, k, x)
    scale = Fraction(cutoff)
    divs = divisors(n)
    index = {d: i for i, d in enumerate(divs)}
    pairs = [[(index[e], index[d // e]) for e in divs if d % e == 0] for d in divs]

    def conv(f, g):
        return [sum(f[a] * g[b] for a, b in pr) for pr in pairs]

    mu_z = [mobius(d) if _cutoff_ok(d, k, x, scale) else 0 for d in divs]
    one = [1] * len(divs)
    g = mu_z
    coeff_of_n1 = [0] * len(divs)
    for j in range(1, k + 1):
        if j > 1:
            g = conv(conv(g, one), mu_z)
        c = _coefficient(k, j, sign)
        for i, n1 in enumerate(divs):
            coeff_of_n1[i] += c * g[index[n // n1]]
    acc: dict[int, int] = {}
    for n1, c in zip(divs, coeff_of_n1):
        if c:
            for p, e in as_factored(n1).factors:
                acc[p] = acc.get(p, 0) + c * e
    return LogCombination.from_dict(acc)


@dataclass
class HBReport:
    limit: int
    k: int
    sign: str
    cutoff: Fraction
    checked: int = 0
    mismatches: list[tuple[int, LogCombination, LogCombination]] = field(default_factory=list)

    @property
    def max_deviation(self) -> float:
        """Largest ``|rhs - Lambda(n)|`` as a float (0.0 when exact)."""
        return max((abs(float(got - want)) for _, got, want in self.mismatches), default=0.0)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _resolve_x(x_rule) -> Callable[[int], object]:
    if x_rule == "n" or x_rule is None:
        return lambda n: n
    if callable(x_rule):
        return x_rule
    fixed = Fraction(x_rule)
    return lambda n: fixed


def _verify_chunk(args):
    lo, hi, k, x_rule, cutoff, sign = args
    xf = _resolve_x(x_rule)
    bad = []
    for n in range(lo, hi):
        got = heath_brown_sum(n, k, xf(n), cutoff, sign)
        want = von_mangoldt(n)
        if got != want:
            bad.append((n, got, want))
    return bad


def verify_heath_brown(limit: int, k: int, x_rule="n", cutoff=Fraction(2),
                       sign: str = "resolved", workers: int = 1) -> HBReport:
    """Compare both sides exactly for every ``n <= limit``.

    ``x_rule`` is ``"n"`` (``x = n``), a fixed number, or a callable
    ``n -> x``. With ``workers > 1`` the range is sharded over processes;
    callables must then be picklable.
    """
    if not 1 <= limit <= VERIFY_LIMIT:
        raise DomainError(f"limit must lie in 1..{VERIFY_LIMIT}")
    if sign not in SIGNS:
        raise DomainError(f"sign must be one of {SIGNS}")
    cutoff = Fraction(cutoff)
    report = HBReport(limit, k, sign, cutoff, checked=limit)
    shards = max(1, workers) * 4
    step = -(-limit // shards)
    jobs = [(lo, min(lo + step, limit + 1), k, x_rule, cutoff, sign) for lo in range(1, limit + 1, step)]
    if workers <= 1:
        results = map(_verify_chunk, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_verify_chunk, jobs)
    for bad in results:
        report.mismatches.extend(bad)
    if workers > 1:
        pool.shutdown()
    return report
