import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
import sievelab
from sievelab import _kernels
from sievelab._kernels import _fallback

try:
    from sievelab._kernels import _core
except ImportError:  # extension not built
    _core = None

BACKENDS = [pytest.param(_fallback, id="python")]
if _core is not None:
    BACKENDS.append(pytest.param(_core, id="cython"))


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("limit", [0, 1, 2, 3, 10, 97, 1000, 65_536, 300_001])
def test_sieve_primes(impl, limit):
    assert list(impl.sieve_primes(limit, 1 << 10)) == oracles.primes_upto(limit)


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("t,z,q,b", [(100, 7, 3, 1), (5000, 11.0, 7, 3), (1, 2, 1, 0), (999, 2.5, 4, 3)])
def test_count_rough(impl, t, z, q, b):
    assert tuple(impl.count_rough(t, z, q, b)) == oracles.rough_count(t, z, q, b)


@pytest.mark.parametrize("impl", BACKENDS)
@given(a=st.integers(0, 200), b=st.integers(0, 200), q=st.integers(1, 200))
def test_kloosterman_counts(impl, a, b, q):
    got = np.asarray(impl.kloosterman_counts(a, b, q))
    want = np.zeros(q, dtype=np.int64)
    for x in range(q):
        if np.gcd(x, q) == 1 or q == 1:
            want[(a * x + b * (pow(x, -1, q) if q > 1 else 0)) % q] += 1
    assert np.array_equal(got, want)


@pytest.mark.parametrize("impl", BACKENDS)
def test_residue_sums(impl):
    rng = np.random.default_rng(0)
    w = rng.integers(-5, 6, size=500)
    out = np.asarray(impl.residue_sums_int(w, 17, 13))
    want = np.zeros(13, dtype=np.int64)
    for i, v in enumerate(w):
        want[(17 + i) % 13] += v
    assert np.array_equal(out, want)


def test_backend_selection_env():
    code = "import sievelab; print(sievelab.BACKEND)"
    env = dict(os.environ, SIEVELAB_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert sievelab.BACKEND in ("python", "cython")
    if _core is not None and os.environ.get("SIEVELAB_PURE", "") not in ("1", "true", "yes"):
        assert _kernels.BACKEND == "cython"
