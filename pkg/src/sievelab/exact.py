"""Exact comparison of products of rational powers.

A :class:`Magnitude` is a formal product ``x**e_x * prod p**e_p`` with
rational exponents, where ``x`` is an optional symbolic "large" base and the
``p`` are primes. Equality is decided exactly from the exponent vector
(unique factorization). Order is decided first by the exponent of the
symbolic ``x`` (the asymptotic reading, x -> infinity) and then by the sign
of ``sum e_p log p``, using a float pass and, near ties, interval evaluation
at escalating precision. Termination is guaranteed because a non-zero
exponent vector has a non-zero logarithm.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering

import mpmath

from .arith import factorize
from .errors import DomainError, NumericError

X = "x"
_FLOAT_REL = 1e-13
_MAX_PREC = 1 << 15


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        raise DomainError("exponents must be exact rationals, not floats")
    return Fraction(v)


@total_ordering
class Magnitude:
    __slots__ = ("_exps", "_hash")

    def __init__(self, exps: dict | None = None):
        clean = {}
        for k, v in (exps or {}).items():
            v = _frac(v)
            if v:
                clean[k] = v
        self._exps = clean
        self._hash = None

    # construction -----------------------------------------------------

    @classmethod
    def one(cls) -> "Magnitude":
        return cls()

    @classmethod
    def of(cls, value) -> "Magnitude":
        """Exact magnitude of a positive int or Fraction (or a Magnitude)."""
        if isinstance(value, Magnitude):
            return value
        if isinstance(value, float):
            raise DomainError("use exact ints or Fractions, not floats")
        value = Fraction(value)
        if value <= 0:
            raise DomainError(f"magnitudes must be positive, got {value}")
        exps: dict = {}
        for p, e in factorize(value.numerator).factors:
            exps[p] = exps.get(p, 0) + e
        for p, e in factorize(value.denominator).factors:
            exps[p] = exps.get(p, 0) - e
        return cls(exps)

    @classmethod
    def x_power(cls, e) -> "Magnitude":
        """The symbolic ``x**e``."""
        return cls({X: _frac(e)})

    # algebra -----------------------------------------------------------

    def __mul__(self, other) -> "Magnitude":
        other = Magnitude.of(other)
        d = dict(self._exps)
        for k, v in other._exps.items():
            d[k] = d.get(k, 0) + v
        return Magnitude(d)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Magnitude":
        return self * Magnitude.of(other) ** -1

    def __rtruediv__(self, other) -> "Magnitude":
        return Magnitude.of(other) * self ** -1

    def __pow__(self, e) -> "Magnitude":
        e = _frac(e)
        return Magnitude({k: v * e for k, v in self._exps.items()})

    # inspection --------------------------------------------------------

    @property
    def x_exponent(self) -> Fraction:
        return self._exps.get(X, Fraction(0))

    @property
    def numeric_part(self) -> "Magnitude":
        return Magnitude({k: v for k, v in self._exps.items() if k != X})

    @property
    def is_symbolic(self) -> bool:
        return X in self._exps

    def exponents(self) -> dict:
        return dict(self._exps)

    def log(self) -> float:
        """Float natural log of the numeric part (symbolic part excluded)."""
        return math.fsum(float(v) * math.log(k) for k, v in self._exps.items() if k != X)

    def __float__(self) -> float:
        if self.is_symbolic:
            raise DomainError("symbolic magnitude has no float value")
        return math.exp(self.log())

    def as_fraction(self) -> Fraction | None:
        """Exact value if all exponents are integers, else ``None``."""
        if self.is_symbolic or any(v.denominator != 1 for v in self._exps.values()):
            return None
        out = Fraction(1)
        for k, v in self._exps.items():
            out *= Fraction(k) ** int(v)
        return out

    # comparison --------------------------------------------------------

    def sign_of_log(self) -> int:
        """Sign of ``log(self)``: -1, 0 or 1, decided exactly."""
        ex = self.x_exponent
        if ex:
            return 1 if ex > 0 else -1
        terms = [(k, v) for k, v in self._exps.items() if k != X]
        if not terms:
            return 0
        fl = [float(v) * math.log(k) for k, v in terms]
        s = math.fsum(fl)
        bound = _FLOAT_REL * math.fsum(abs(t) for t in fl) + 1e-300
        if abs(s) > bound:
            return 1 if s > 0 else -1
        prec = 128
        while prec <= _MAX_PREC:
            with mpmath.workprec(prec):
                acc = mpmath.mpf(0)
                mag = mpmath.mpf(0)
                for k, v in terms:
                    t = mpmath.mpf(v.numerator) / v.denominator * mpmath.log(k)
                    acc += t
                    mag += abs(t)
                err = mag * mpmath.ldexp(1, 8 - prec) * len(terms)
                if abs(acc) > err:
                    return 1 if acc > 0 else -1
            prec *= 2
        raise NumericError("could not separate magnitude from 1")

    def compare(self, other) -> int:
        return (self / Magnitude.of(other)).sign_of_log()

    def __eq__(self, other) -> bool:
        try:
            other = Magnitude.of(other)
        except (DomainError, TypeError):
            return NotImplemented
        return self._exps == other._exps

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __le__(self, other) -> bool:
        return self.compare(other) <= 0

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._exps.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._exps:
            return "Magnitude(1)"
        parts = [f"{k}^({v})" for k, v in sorted(self._exps.items(), key=lambda kv: str(kv[0]))]
        return "Magnitude(" + " * ".join(parts) + ")"


def log_ratio(a: Magnitude, b: Magnitude) -> float:
    """Float ``log(a/b)`` of the numeric parts, for reporting margins."""
    return (Magnitude.of(a) / Magnitude.of(b)).log()
