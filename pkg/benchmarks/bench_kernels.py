"""Compare the compiled kernels with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from sievelab._kernels import _fallback

try:
    from sievelab._kernels import _core
except ImportError:
    _core = None

CASES = [
    ("sieve_primes(10^7)", "sieve_primes", (10**7,)),
    ("count_rough(10^6, z=7, q=7)", "count_rough", (10**6, 7.0, 7, 3)),
    ("count_rough(10^6, z=100, q=7)", "count_rough", (10**6, 100.0, 7, 3)),
    ("kloosterman_counts(1, 1, 99991)", "kloosterman_counts", (1, 1, 99991)),
    ("kloosterman_counts(3, 5, 30030)", "kloosterman_counts", (3, 5, 30030)),
]


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return tuple(a) == tuple(b)
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3, help="timing repetitions (best is reported)")
    ns = ap.parse_args(argv)
    print(f"{'kernel':34s} {'python (s)':>11s} {'cython (s)':>11s} {'speedup':>8s} agree")
    for label, name, args in CASES:
        py = getattr(_fallback, name)
        t_py = min(timeit.repeat(lambda: py(*args), number=1, repeat=ns.repeat))
        if _core is None:
            print(f"{label:34s} {t_py:11.4f} {'n/a':>11s} {'':>8s} -")
            continue
        cy = getattr(_core, name)
        t_cy = min(timeit.repeat(lambda: cy(*args), number=1, repeat=ns.repeat))
        agree = _same(py(*args), cy(*args))
        print(f"{label:34s} {t_py:11.4f} {t_cy:11.4f} {t_py / t_cy:7.1f}x {agree}")


if __name__ == "__main__":
    main()
