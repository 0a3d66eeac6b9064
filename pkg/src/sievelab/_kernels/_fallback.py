"""Pure numpy implementations of the compiled kernels in ``_core``."""
import math

import numpy as np


def _small_primes(limit):
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_primes(limit, segment=1 << 18):
    """All primes ``<= limit`` by a segmented odd-only sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    base = _small_primes(math.isqrt(limit))
    chunks = [np.array([2], dtype=np.int64)]
    span = 2 * segment
    low = 3
    while low <= limit:
        high = min(low + span, limit + 1)
        nodd = (high - low + 1) // 2
        seg = np.ones(nodd, dtype=bool)
        for p in base[1:]:
            p = int(p)
            if p * p >= high:
                break
            start = max(p * p, -(-low // p) * p)
            if start % 2 == 0:
                start += p
            seg[(start - low) // 2 :: p] = False
        chunks.append(low + 2 * np.flatnonzero(seg).astype(np.int64))
        low = high if high % 2 else high + 1
    return np.concatenate(chunks)


def count_rough(t, z, q, b, segment=1 << 18):
    """Count ``n <= t`` with no prime factor below ``z``: (total, n = b mod q)."""
    if t < 1:
        return 0, 0
    # primes p < z are sieved out
    zi = math.ceil(z) - 1
    small = _small_primes(zi) if zi >= 2 else np.zeros(0, dtype=np.int64)
    total = hit = 0
    bq = b % q
    low = 1
    while low <= t:
        high = min(low + segment, t + 1)
        seg = np.ones(high - low, dtype=bool)
        for p in small:
            p = int(p)
            seg[(-low) % p :: p] = False
        idx = np.flatnonzero(seg)
        total += int(idx.size)
        hit += int(np.count_nonzero((low + idx) % q == bq))
        low = high
    return total, hit


def kloosterman_counts(a, b, q):
    """Histogram of ``a x + b x^{-1} mod q`` over units ``x mod q``."""
    counts = np.zeros(q, dtype=np.int64)
    if q == 1:
        counts[0] = 1
        return counts
    xs = np.arange(1, q, dtype=np.int64)
    units = xs[np.gcd(xs, q) == 1]
    inv = np.array([pow(int(x), -1, q) for x in units], dtype=np.int64)
    np.add.at(counts, (a % q * units + b % q * inv) % q, 1)
    return counts


def residue_sums_int(weights, start, q):
    """``out[r] = sum of weights[i]`` over ``start + i = r mod q``."""
    weights = np.asarray(weights, dtype=np.int64)
    out = np.zeros(q, dtype=np.int64)
    np.add.at(out, (start + np.arange(weights.size, dtype=np.int64)) % q, weights)
    return out
