"""Desk-scale experiments on primes and convolutions in arithmetic progressions.

Prime counts follow the convention ``pi(x; q, a) = #{p < x : p = a (mod q)}``
(strictly below ``x``). Main terms such as ``pi(x)/phi(q)`` stay exact
rationals; floats appear only in rendered reports.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from ._kernels import count_rough
from .arith import euler_phi, mobius, prime_table, tau
from .errors import DomainError, ResourceError
from .exp_sums import PSI0, BumpFunction
from .sieve_support import WeightSequence

PI_LIMIT = 10**8
SUP_MODE_LIMIT = 10**7
BUCKET_Q_LIMIT = 10**4
BRUTE_BUDGET = 10**7
DEFAULT_Z = 7


# --------------------------------------------------------------------------
# prime counts


def primes_below(x: int) -> np.ndarray:
    """Primes ``p < x`` (read-only, cached)."""
    if x > PI_LIMIT:
        raise ResourceError(f"prime counts limited to x <= {PI_LIMIT}")
    if x <= 2:
        return np.zeros(0, dtype=np.int64)
    return prime_table(int(x) - 1)


def residue_counts(x: int, q: int) -> np.ndarray:
    """``counts[a] = pi(x; q, a)`` for ``0 <= a < q``."""
    if q < 1:
        raise DomainError("q must be positive")
    return np.bincount(primes_below(x) % q, minlength=q)


def pi_ap(x: int, q: int, a: int) -> int:
    return int(np.count_nonzero(primes_below(x) % q == a % q))


def partition_check(x: int, q: int) -> bool:
    """``sum over units a of pi(x; q, a) + #{p < x : p | q} == pi(x)``."""
    counts = residue_counts(x, q)
    units = sum(int(counts[a]) for a in range(q) if math.gcd(a, q) == 1)
    p = primes_below(x)
    dividing = int(np.count_nonzero(q % p == 0)) if len(p) else 0
    return units + dividing == len(p)


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class DiscrepancyRow:
    q: int
    count: int
    main_term: Fraction
    discrepancy: Fraction
    weight: object = 1
    residue: int | None = None


@dataclass
class DiscrepancyReport:
    """Per-modulus rows plus aggregates recomputed from them."""

    params: dict
    rows: list[DiscrepancyRow] = field(default_factory=list)

    @property
    def signed_sum(self):
        return sum((r.weight * r.discrepancy for r in self.rows), Fraction(0))

    @property
    def abs_sum(self):
        return sum((abs(r.weight * r.discrepancy) for r in self.rows), Fraction(0))

    @property
    def max_row(self) -> DiscrepancyRow | None:
        return max(self.rows, key=lambda r: (abs(r.weight * r.discrepancy), -r.q), default=None)

    def normalized(self, value=None, A: float | None = None) -> float:
        """``value / (x / log x)``, or ``value / (x / (log x)**A)`` when ``A`` is given."""
        x = self.params["x"]
        value = self.abs_sum if value is None else value
        lx = math.log(x)
        scale = x / lx if A is None else x / lx**A
        return float(value) / scale


# --------------------------------------------------------------------------
# Bombieri-Vinogradov table


def bv_qmax(x: int, B: float) -> int:
    return int(math.floor(math.sqrt(x) / math.log(x) ** B))


def _bv_rows(args) -> list[DiscrepancyRow]:
    x, qs = args
    p = primes_below(x)
    pi = len(p)
    out = []
    for q in qs:
        counts = np.bincount(p % q, minlength=q)
        phi = euler_phi(q)
        units = np.array([a for a in range(q) if math.gcd(a, q) == 1])
        # |count - pi/phi| = |count*phi - pi| / phi, maximized in integers
        dev = np.abs(counts[units].astype(object) * phi - pi)
        k = int(np.argmax(dev))  # first index: lowest residue attaining the sup
        a = int(units[k])
        out.append(DiscrepancyRow(q, int(counts[a]), Fraction(pi, phi), Fraction(int(dev[k]), phi), 1, a))
    return out


def _chunks(qs: list[int], workers: int) -> list[list[int]]:
    if not qs:
        return []
    n = max(1, min(len(qs), 4 * workers))
    return [qs[i::n] for i in range(n)]


def bv_table(x: int, Q_max: int | None = None, B: float | None = None, workers: int = 1) -> DiscrepancyReport:
    """``sum_{q <= Q_max} sup_{(a,q)=1} |pi(x;q,a) - pi(x)/phi(q)|`` with one row per ``q``.

    ``Q_max`` defaults to ``floor(x**(1/2) / (log x)**B)``. The sup takes
    the lowest residue among ties.
    """
    if x > SUP_MODE_LIMIT:
        raise ResourceError(f"sup-over-a mode limited to x <= {SUP_MODE_LIMIT}")
    if x < 2:
        raise DomainError("x must be at least 2")
    if Q_max is None:
        if B is None:
            raise DomainError("give Q_max or B")
        Q_max = bv_qmax(x, B)
    if Q_max < 0:
        raise DomainError("Q_max must be non-negative")
    qs = list(range(1, Q_max + 1))
    jobs = [(x, c) for c in _chunks(qs, workers)]
    if workers <= 1:
        parts = [_bv_rows(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_bv_rows, jobs))
    rows = sorted((r for part in parts for r in part), key=lambda r: r.q)
    return DiscrepancyReport({"x": x, "Q_max": Q_max, "B": B, "mode": "sup", "weight": "1"}, rows)


@dataclass
class TrendPoint:
    x: int
    Q_max: int
    total: Fraction
    normalized: float


def bv_trend(xs=(10**4, 10**5, 10**6), B: float = 3, workers: int = 1) -> list[TrendPoint]:
    out = []
    for x in xs:
        rep = bv_table(x, B=B, workers=workers)
        out.append(TrendPoint(x, rep.params["Q_max"], rep.abs_sum, rep.normalized()))
    return out


# --------------------------------------------------------------------------
# weighted discrepancy


def weighted_prime_discrepancy(weights: WeightSequence | Mapping[int, object], x: int, a: int) -> DiscrepancyReport:
    """``sum_q lambda_q (pi(x;q,a) - pi(x)/phi(q))`` over ``(q, a) = 1``; other ``q`` are dropped."""
    entries = weights.entries if isinstance(weights, WeightSequence) else dict(weights)
    p = primes_below(x)
    pi = len(p)
    rows = []
    for q in sorted(entries):
        w = entries[q]
        if not w or math.gcd(q, a) != 1:
            continue
        count = int(np.count_nonzero(p % q == a % q))
        main = Fraction(pi, euler_phi(q))
        rows.append(DiscrepancyRow(q, count, main, count - main, w, a % q))
    return DiscrepancyReport({"x": x, "a": a, "mode": "weighted", "weight": "lambda"}, rows)


# --------------------------------------------------------------------------
# bilinear discrepancy


def _check_dyadic(seq: Mapping[int, object], N: int | None, name: str) -> None:
    if N is None:
        return
    bad = [n for n, v in seq.items() if v and not N < n <= 2 * N]
    if bad:
        raise DomainError(f"{name} has support outside ({N}, {2 * N}]: {bad[:3]}")


def _buckets(seq: Mapping[int, object], q: int) -> list:
    out = [0] * q
    for n, v in seq.items():
        if v:
            out[n % q] += v
    return out


def _unit_mask(q: int) -> list[bool]:
    return [math.gcd(r, q) == 1 for r in range(q)]


def delta_q(q: int, alpha: Mapping[int, object], beta: Mapping[int, object], a: int,
            N: int | None = None, M: int | None = None):
    """``sum_n alpha_n sum_m beta_m (1_{nm = a (q)} - 1_{(nm,q)=1} / phi(q))``.

    Sums are grouped by residue class, so the cost is ``O(len + q**2)``.
    Exact whenever the inputs are ints or Fractions.
    """
    if q < 1:
        raise DomainError("q must be positive")
    if q > BUCKET_Q_LIMIT:
        raise ResourceError(f"residue bucketing limited to q <= {BUCKET_Q_LIMIT}")
    _check_dyadic(alpha, N, "alpha")
    _check_dyadic(beta, M, "beta")
    A, B = _buckets(alpha, q), _buckets(beta, q)
    unit = _unit_mask(q)
    a %= q
    hit = 0
    for r in range(q):
        if A[r]:
            for s in range(q):
                if B[s] and (r * s) % q == a:
                    hit += A[r] * B[s]
    au = sum(v for v, u in zip(A, unit) if u)
    bu = sum(v for v, u in zip(B, unit) if u)
    return hit - Fraction(au * bu) / euler_phi(q) if (au and bu) else hit + Fraction(0)


def delta_q_bruteforce(q: int, alpha: Mapping[int, object], beta: Mapping[int, object], a: int):
    """Naive double loop over the supports (oracle for :func:`delta_q`)."""
    if len(alpha) * len(beta) > BRUTE_BUDGET:
        raise ResourceError("double loop exceeds the brute-force budget")
    phi = euler_phi(q)
    total = Fraction(0)
    for n, u in alpha.items():
        for m, v in beta.items():
            nm = n * m
            total += u * v * ((1 if nm % q == a % q else 0) - Fraction(1 if math.gcd(nm, q) == 1 else 0, phi))
    return total


# --------------------------------------------------------------------------
# fundamental-lemma count


@dataclass
class FundamentalReport:
    q: int
    b: int
    t: int
    z: float
    lhs: int
    total: int
    rhs: Fraction

    @property
    def deviation(self) -> Fraction:
        return self.lhs - self.rhs

    @property
    def normalized(self) -> float:
        return float(self.deviation) / (self.t / self.q)


def fundamental_lemma_check(q: int, b: int, t: int, z: float = DEFAULT_Z) -> FundamentalReport:
    """``#{n <= t : n = b (q), P-(n) >= z}`` against ``phi(q)**-1 #{n <= t : P-(n) >= z}``.

    ``n = 1`` counts (it has no prime factor below ``z``).
    """
    if q < 1 or t < 1:
        raise DomainError("q and t must be positive")
    if math.gcd(b, q) != 1:
        raise DomainError(f"need (b, q) = 1, got b={b}, q={q}")
    if t > PI_LIMIT:
        raise ResourceError(f"t limited to {PI_LIMIT}")
    total, hits = count_rough(int(t), float(z), int(q), int(b) % q)
    return FundamentalReport(q, b, t, z, int(hits), int(total), Fraction(int(total), euler_phi(q)))


# --------------------------------------------------------------------------
# smoothed double-divisor sum


def _psi_weights(Nn: int, psi: BumpFunction) -> dict[int, Fraction]:
    lo, hi = psi.support
    ns = np.arange(max(1, math.ceil(lo * Nn)), math.floor(hi * Nn) + 1)
    vals = psi(ns / Nn)
    return {int(n): Fraction(float(v)) for n, v in zip(ns, vals) if v}


@dataclass
class DoubleDivisorReport:
    q: int
    a: int
    M: int
    N1: int
    N2: int
    value: Fraction
    reference: float | None

    @property
    def ratio(self) -> float | None:
        return None if not self.reference else float(self.value) / self.reference


def double_divisor_experiment(q: int, a: int, M: int, N1: int, N2: int,
                              alpha: Mapping[int, object] | None = None,
                              epsilon: float | None = None, psi: BumpFunction = PSI0) -> DoubleDivisorReport:
    """``|sum_m alpha_m sum_{n1,n2} psi(n1/N1) psi(n2/N2) (1_{m n1 n2 = a} - 1_{(m n1 n2, q)=1}/phi(q))|``.

    ``psi`` values enter as the exact rationals of their float values, so
    the result is an exact Fraction. ``alpha`` defaults to ``1`` on
    ``(M, 2M]``. With ``epsilon`` the value is compared with
    ``x / (q x**epsilon)``, ``x = M N1 N2`` (informational).
    """
    if math.gcd(a, q) != 1:
        raise DomainError("need (a, q) = 1")
    if not 1 <= N1 <= N2:
        raise DomainError("need 1 <= N1 <= N2")
    if q > BUCKET_Q_LIMIT:
        raise ResourceError(f"residue bucketing limited to q <= {BUCKET_Q_LIMIT}")
    if alpha is None:
        alpha = {m: 1 for m in range(M + 1, 2 * M + 1)}
    _check_dyadic(alpha, M, "alpha")
    A = _buckets(alpha, q)
    P1 = _buckets(_psi_weights(N1, psi), q)
    P2 = _buckets(_psi_weights(N2, psi), q)
    C = [0] * q
    for r in range(q):
        if A[r]:
            for s in range(q):
                if P1[s]:
                    C[(r * s) % q] += A[r] * P1[s]
    hit = 0
    for t in range(q):
        if C[t]:
            for s in range(q):
                if P2[s] and (t * s) % q == a % q:
                    hit += C[t] * P2[s]
    unit = _unit_mask(q)
    au, p1u, p2u = (sum(v for v, u in zip(X, unit) if u) for X in (A, P1, P2))
    value = abs(hit - Fraction(au * p1u * p2u) / euler_phi(q)) if (au and p1u and p2u) else abs(hit + Fraction(0))
    reference = None
    if epsilon is not None:
        x = M * N1 * N2
        reference = x / (q * x**epsilon)
    return DoubleDivisorReport(q, a, M, N1, N2, value, reference)


def double_divisor_bruteforce(q: int, a: int, M: int, N1: int, N2: int,
                              alpha: Mapping[int, object] | None = None, psi: BumpFunction = PSI0) -> Fraction:
    """Triple loop oracle for :func:`double_divisor_experiment`."""
    if alpha is None:
        alpha = {m: 1 for m in range(M + 1, 2 * M + 1)}
    w1, w2 = _psi_weights(N1, psi), _psi_weights(N2, psi)
    if len(alpha) * len(w1) * len(w2) > BRUTE_BUDGET:
        raise ResourceError("triple loop exceeds the brute-force budget")
    phi = euler_phi(q)
    total = Fraction(0)
    for m, am in alpha.items():
        for n1, u in w1.items():
            for n2, v in w2.items():
                k = m * n1 * n2
                total += am * u * v * ((1 if k % q == a % q else 0) - Fraction(1 if math.gcd(k, q) == 1 else 0, phi))
    return abs(total)


# --------------------------------------------------------------------------
# Siegel-Walfisz probe


@dataclass
class SWReport:
    N: int
    d: int
    q: int
    a: int
    A: float
    value: Fraction
    envelope: float

    @property
    def ratio(self) -> float:
        return float(self.value) / self.envelope


def mobius_sequence(N: int) -> dict[int, int]:
    """``mu`` restricted to ``(N, 2N]``."""
    return {n: mobius(n) for n in range(N + 1, 2 * N + 1)}


def siegel_walfisz_probe(alpha: Mapping[int, object], N: int, d: int, q: int, a: int, A: float = 1.0) -> SWReport:
    """``|sum_{n~N, n=a (q), (n,d)=1} alpha_n - phi(q)**-1 sum_{n~N, (n,dq)=1} alpha_n|``.

    Reported next to ``N tau(d) / (log N)**A``; nothing is asserted.
    """
    if math.gcd(a, q) != 1:
        raise DomainError("need (a, q) = 1")
    if N < 2 or d < 1 or q < 1:
        raise DomainError("need N >= 2, d >= 1, q >= 1")
    _check_dyadic(alpha, N, "alpha")
    hit = 0
    coprime = 0
    for n, v in alpha.items():
        if not v or math.gcd(n, d) != 1:
            continue
        if n % q == a % q:
            hit += v
        if math.gcd(n, q) == 1:
            coprime += v
    value = abs(hit - Fraction(coprime) / euler_phi(q))
    envelope = N * tau(d) / math.log(N) ** A
    return SWReport(N, d, q, a, A, value, envelope)
