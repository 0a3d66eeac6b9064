"""Exact elementary arithmetic: factorization, multiplicative functions, primes.

Everything here is a pure function of its arguments. Prime tables and the
smallest-prime-factor table are built lazily and never mutated afterwards,
so they can be shared freely between threads and forked workers.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from . import _kernels
from .errors import DomainError, ResourceError

FACTOR_LIMIT = 10**18
TRIAL_BOUND = 10**6
SPF_LIMIT = 1 << 21
PRIME_TABLE_LIMIT = 4 * 10**8

# P^-(1): ordered above every integer so that "P^-(n) >= z" holds vacuously at n = 1.
PLUS_INFINITY = math.inf


@dataclass(frozen=True)
class FactoredInteger:
    """A positive integer together with its prime factorization.

    ``factors`` lists ``(prime, multiplicity)`` with strictly decreasing
    primes, and ``flattened`` repeats each prime by its multiplicity, giving
    the non-increasing sequence ``p_1 >= p_2 >= ... >= p_r``.
    """

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = None
        for p, e in self.factors:
            if e < 1 or (last is not None and p >= last):
                raise DomainError(f"malformed factorization {self.factors}")
            prod *= p**e
            last = p
        if prod != self.value:
            raise DomainError(f"factors {self.factors} do not multiply to {self.value}")

    @property
    def flattened(self) -> tuple[int, ...]:
        return tuple(p for p, e in self.factors for _ in range(e))

    @property
    def omega(self) -> int:
        """Number of distinct prime factors."""
        return len(self.factors)

    @property
    def big_omega(self) -> int:
        """Number of prime factors counted with multiplicity."""
        return sum(e for _, e in self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    @classmethod
    def from_primes(cls, primes: Iterable[int]) -> "FactoredInteger":
        counts: dict[int, int] = {}
        value = 1
        for p in primes:
            counts[p] = counts.get(p, 0) + 1
            value *= p
        return cls(value, tuple(sorted(counts.items(), reverse=True)))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"FactoredInteger({self.value}, {list(self.factors)})"


def as_factored(n: int | FactoredInteger) -> FactoredInteger:
    return n if isinstance(n, FactoredInteger) else factorize(n)


# --------------------------------------------------------------------------
# prime infrastructure


@lru_cache(maxsize=1)
def _spf_table() -> np.ndarray:
    spf = np.zeros(SPF_LIMIT + 1, dtype=np.int32)
    for p in _kernels.sieve_primes(math.isqrt(SPF_LIMIT)):
        p = int(p)
        block = spf[p * p :: p]
        block[block == 0] = p
    idx = np.flatnonzero(spf == 0)
    spf[idx] = idx
    return spf


@lru_cache(maxsize=8)
def _cached_primes(limit: int) -> np.ndarray:
    arr = _kernels.sieve_primes(limit)
    arr.setflags(write=False)
    return arr


def prime_table(limit: int, segment: int = 1 << 18) -> np.ndarray:
    """Sorted array of all primes ``<= limit`` (segmented sieve).

    Raises ``ResourceError`` beyond ``PRIME_TABLE_LIMIT``; the segment size
    only controls working memory, the output array is always materialized.
    """
    if limit < 2:
        raise DomainError("prime_table needs limit >= 2")
    if limit > PRIME_TABLE_LIMIT:
        raise ResourceError(
            f"prime table up to {limit} exceeds the memory budget "
            f"({PRIME_TABLE_LIMIT}); split the range into more segments"
        )
    if segment != 1 << 18:
        arr = _kernels.sieve_primes(limit, segment)
        arr.setflags(write=False)
        return arr
    return _cached_primes(int(limit))


@lru_cache(maxsize=1)
def _trial_primes() -> tuple[int, ...]:
    return tuple(int(p) for p in _kernels.sieve_primes(TRIAL_BOUND))


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with the first 12 prime bases; deterministic below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        y = pow(a, d, n)
        if y in (1, n - 1):
            continue
        for _ in range(s - 1):
            y = y * y % n
            if y == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        c = rng.randrange(1, n)
        f = lambda v: (v * v + c) % n  # noqa: E731
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def _split_large(n: int, out: dict[int, int], rng: random.Random) -> None:
    if n == 1:
        return
    if is_probable_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_rho(n, rng)
    _split_large(d, out, rng)
    _split_large(n // d, out, rng)


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> FactoredInteger:
    """Full prime factorization of ``1 <= n <= FACTOR_LIMIT``.

    Small inputs walk a smallest-prime-factor table; larger ones use trial
    division below 10**6 followed by Miller-Rabin and Pollard rho.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    if n > FACTOR_LIMIT:
        raise DomainError(f"factorize limit is {FACTOR_LIMIT}, got {n}")
    counts: dict[int, int] = {}
    if n <= SPF_LIMIT:
        spf = _spf_table()
        m = n
        while m > 1:
            p = int(spf[m])
            counts[p] = counts.get(p, 0) + 1
            m //= p
    else:
        m = n
        for p in _trial_primes():
            if p * p > m:
                break
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                counts[p] = e
        if m > 1:
            if m < TRIAL_BOUND * TRIAL_BOUND:
                counts[m] = counts.get(m, 0) + 1
            else:
                _split_large(m, counts, random.Random(n))
    return FactoredInteger(n, tuple(sorted(counts.items(), reverse=True)))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n <= SPF_LIMIT:
        return int(_spf_table()[n]) == n
    return is_probable_prime(n)


def divisors(n: int | FactoredInteger) -> list[int]:
    """All positive divisors, sorted."""
    fi = as_factored(n)
    divs = [1]
    for p, e in fi.factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


# --------------------------------------------------------------------------
# multiplicative functions


def mobius(n: int | FactoredInteger) -> int:
    fi = as_factored(n)
    if not fi.is_squarefree:
        return 0
    return -1 if fi.omega % 2 else 1


def euler_phi(n: int | FactoredInteger) -> int:
    fi = as_factored(n)
    out = 1
    for p, e in fi.factors:
        out *= p ** (e - 1) * (p - 1)
    return out


def tau_k(n: int | FactoredInteger, k: int = 2) -> int:
    """Number of ordered ``k``-tuples of positive integers with product ``n``."""
    if k < 1:
        raise DomainError("tau_k needs k >= 1")
    out = 1
    for _, e in as_factored(n).factors:
        out *= math.comb(e + k - 1, k - 1)
    return out


def tau(n: int | FactoredInteger) -> int:
    return tau_k(n, 2)


def p_extremes(n: int | FactoredInteger) -> tuple[float | int, int]:
    """``(P^-(n), P^+(n))``; for ``n = 1`` this is ``(PLUS_INFINITY, 1)``."""
    fi = as_factored(n)
    if fi.value == 1:
        return PLUS_INFINITY, 1
    return fi.factors[-1][0], fi.factors[0][0]


def squarefull_part(n: int | FactoredInteger) -> int:
    out = 1
    for p, e in as_factored(n).factors:
        if e >= 2:
            out *= p**e
    return out


def smooth_part(n: int | FactoredInteger, z: float) -> int:
    if z < 2:
        raise DomainError("smooth_part needs z >= 2")
    out = 1
    for p, e in as_factored(n).factors:
        if p <= z:
            out *= p**e
    return out


# --------------------------------------------------------------------------
# symbolic logarithms


@dataclass(frozen=True)
class LogCombination:
    """An integer combination ``sum c_p log p`` over primes ``p``.

    Equality is exact because ``{log p}`` is linearly independent over Q.
    """

    coeffs: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_dict(cls, d: dict[int, int]) -> "LogCombination":
        return cls(tuple(sorted((p, c) for p, c in d.items() if c)))

    @classmethod
    def log(cls, n: int | FactoredInteger) -> "LogCombination":
        return cls(tuple(sorted((p, e) for p, e in as_factored(n).factors)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.coeffs)

    def __add__(self, other: "LogCombination") -> "LogCombination":
        d = self.as_dict()
        for p, c in other.coeffs:
            d[p] = d.get(p, 0) + c
        return LogCombination.from_dict(d)

    def __neg__(self) -> "LogCombination":
        return LogCombination(tuple((p, -c) for p, c in self.coeffs))

    def __sub__(self, other: "LogCombination") -> "LogCombination":
        return self + (-other)

    def scale(self, k: int) -> "LogCombination":
        return LogCombination.from_dict({p: k * c for p, c in self.coeffs})

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __float__(self) -> float:
        return math.fsum(c * math.log(p) for p, c in self.coeffs)

    def as_pair(self) -> tuple[int, int] | int:
        """``(coefficient, prime)`` for a single-prime combination, 0 when empty."""
        if not self.coeffs:
            return 0
        if len(self.coeffs) != 1:
            raise DomainError(f"{self} is not a multiple of a single log p")
        p, c = self.coeffs[0]
        return c, p

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*log({p})" for p, c in self.coeffs)


ZERO_LOG = LogCombination()


def von_mangoldt(n: int | FactoredInteger) -> LogCombination:
    """``Lambda(n)`` as ``log p`` when ``n = p^k``, else the zero combination."""
    fi = as_factored(n)
    if fi.omega == 1:
        return LogCombination(((fi.factors[0][0], 1),))
    return ZERO_LOG


# --------------------------------------------------------------------------
# global parameters


def _as_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class GlobalParams:
    """Scale ``x``, residue ``a``, and the small exponents ``epsilon``, ``delta``.

    ``z0`` and ``y0`` default to ``round(x**(1/(log log x)**3))`` and
    ``round(x**(1/log log x))``; at desk scale these are tiny, so explicit
    overrides are accepted.
    """

    x: int
    a: int = 1
    epsilon: Fraction = Fraction(1, 100)
    delta: Fraction = Fraction(1, 2000)
    z0_override: int | None = None
    y0_override: int | None = None
    _derived: tuple[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "epsilon", _as_fraction(self.epsilon))
        object.__setattr__(self, "delta", _as_fraction(self.delta))
        if self.x < 1:
            raise DomainError("x must be a positive integer")
        if self.a == 0:
            raise DomainError("a must be nonzero")
        if self.epsilon <= 0:
            raise DomainError("epsilon must be positive")
        if not 0 < self.delta < Fraction(1, 1000):
            raise DomainError("delta must lie in (0, 1/1000)")
        z0, y0 = self.z0_override, self.y0_override
        if z0 is None or y0 is None:
            if self.x < 16:
                raise DomainError("default z0/y0 need x >= 16 (log log x > 1)")
            llx = math.log(math.log(self.x))
            lx = math.log(self.x)
            if z0 is None:
                z0 = max(2, round(math.exp(lx / llx**3)))
            if y0 is None:
                y0 = max(z0, round(math.exp(lx / llx)))
        if not 2 <= z0 <= y0 <= self.x:
            raise DomainError(f"need 2 <= z0 <= y0 <= x, got z0={z0}, y0={y0}")
        object.__setattr__(self, "_derived", (z0, y0))

    @property
    def z0(self) -> int:
        return self._derived[0]

    @property
    def y0(self) -> int:
        return self._derived[1]


def iter_squarefree(limit: int) -> Iterator[int]:
    for n in range(1, limit + 1):
        if as_factored(n).is_squarefree:
            yield n
