"""Kernel backend selection.

The compiled ``_core`` extension is used when it was built; otherwise the
numpy implementations in ``_fallback`` are loaded. Setting the environment
variable ``SIEVELAB_PURE=1`` forces the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
if os.environ.get("SIEVELAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

sieve_primes = _impl.sieve_primes
count_rough = _impl.count_rough
kloosterman_counts = _impl.kloosterman_counts
residue_sums_int = _impl.residue_sums_int

__all__ = [
    "BACKEND",
    "sieve_primes",
    "count_rough",
    "kloosterman_counts",
    "residue_sums_int",
]
