# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror ``_fallback`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, sqrt

cnp.import_array()

ctypedef long long i64


cdef cnp.ndarray[cnp.int64_t, ndim=1] _small_primes(i64 limit):
    cdef i64 n = limit + 1
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] flags = np.ones(n, dtype=np.uint8)
    cdef i64 i, j
    if n > 0:
        flags[0] = 0
    if n > 1:
        flags[1] = 0
    i = 2
    while i * i <= limit:
        if flags[i]:
            j = i * i
            while j <= limit:
                flags[j] = 0
                j += i
        i += 1
    return np.flatnonzero(flags).astype(np.int64)


cdef inline i64 _inverse(i64 x, i64 q):
    """Inverse of ``x`` modulo ``q``, or 0 when ``gcd(x, q) > 1``."""
    cdef i64 r0 = q, r1 = x, s0 = 0, s1 = 1, t
    while r1:
        t = r0 // r1
        r0, r1 = r1, r0 - t * r1
        s0, s1 = s1, s0 - t * s1
    if r0 != 1:
        return 0
    return s0 % q if s0 >= 0 else s0 % q + q


def sieve_primes(i64 limit, i64 segment=1 << 18):
    """All primes ``<= limit`` by a segmented odd-only sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    cdef i64 root = <i64>sqrt(<double>limit)
    while root * root > limit:
        root -= 1
    while (root + 1) * (root + 1) <= limit:
        root += 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] base = _small_primes(root)
    cdef i64 nbase = base.shape[0]
    # pi(x) < 1.26 x / log x for x > 1
    cdef i64 cap = <i64>(1.3 * limit / max(1.0, np.log(limit))) + 16
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(cap, dtype=np.int64)
    cdef i64 count = 0
    out[count] = 2
    count += 1
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] seg = np.empty(segment, dtype=np.uint8)
    cdef i64 low = 3, high, span, k, p, start, idx, nodd
    span = 2 * segment
    while low <= limit:
        high = min(low + span, limit + 1)
        nodd = (high - low + 1) // 2
        for idx in range(nodd):
            seg[idx] = 1
        for k in range(1, nbase):
            p = base[k]
            if p * p >= high:
                break
            start = p * p
            if start < low:
                start = ((low + p - 1) // p) * p
            if (start & 1) == 0:
                start += p
            idx = (start - low) >> 1
            while idx < nodd:
                seg[idx] = 0
                idx += p
        for idx in range(nodd):
            if seg[idx]:
                out[count] = low + 2 * idx
                count += 1
        low = high if (high & 1) else high + 1
    return out[:count].copy()


def count_rough(i64 t, double z, i64 q, i64 b, i64 segment=1 << 18):
    """Count ``n <= t`` with no prime factor below ``z``: (total, n = b mod q)."""
    if t < 1:
        return 0, 0
    # primes p < z are sieved out
    cdef i64 zi = <i64>ceil(z) - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] small = (
        _small_primes(zi) if zi >= 2 else np.zeros(0, dtype=np.int64))
    cdef i64 ns = small.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] seg = np.empty(segment, dtype=np.uint8)
    cdef i64 low = 1, high, k, p, start, idx, width, n
    cdef i64 total = 0, hit = 0
    cdef i64 bq = b % q
    while low <= t:
        high = min(low + segment, t + 1)
        width = high - low
        for idx in range(width):
            seg[idx] = 1
        for k in range(ns):
            p = small[k]
            start = ((low + p - 1) // p) * p
            idx = start - low
            while idx < width:
                seg[idx] = 0
                idx += p
        # residue of low + idx tracked incrementally (no division per entry)
        n = low % q
        for idx in range(width):
            if seg[idx]:
                total += 1
                if n == bq:
                    hit += 1
            n += 1
            if n == q:
                n = 0
        low = high
    return total, hit


def kloosterman_counts(i64 a, i64 b, i64 q):
    """Histogram of ``a x + b x^{-1} mod q`` over units ``x mod q``."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(q, dtype=np.int64)
    if q == 1:
        counts[0] = 1
        return counts
    cdef i64 x, r, xi
    a %= q
    b %= q
    if a < 0:
        a += q
    if b < 0:
        b += q
    for x in range(1, q):
        xi = _inverse(x, q)
        if xi:
            r = (a * x + b * xi) % q
            counts[r] += 1
    return counts


def residue_sums_int(cnp.ndarray[cnp.int64_t, ndim=1] weights, i64 start, i64 q):
    """``out[r] = sum of weights[i]`` over ``start + i = r mod q``."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(q, dtype=np.int64)
    cdef i64 i, n = weights.shape[0]
    cdef i64 r = start % q
    for i in range(n):
        out[r] += weights[i]
        r += 1
        if r == q:
            r = 0
    return out
