"""Kloosterman and Ramanujan sums, the bump ``psi0``, and completion checks.

A sum of roots of unity ``sum_r c_r e(r/q)`` is stored as its integer
coefficient vector ``c``. Its float value is a compensated cosine sum; exact
identities are decided by reducing the coefficient polynomial modulo the
cyclotomic polynomial ``Phi_q``, which is zero exactly when the sum vanishes.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from scipy import integrate

from ._kernels import kloosterman_counts
from .arith import divisors, euler_phi, factorize, is_prime, mobius, tau
from .errors import DomainError, NumericError, ResourceError

KLOOSTERMAN_LIMIT = 10**5
WEIL_LIMIT = 2000
COMPLETION_LIMIT = 10**5
TAU = 2.0 * math.pi


def e(x: float) -> complex:
    return complex(math.cos(TAU * x), math.sin(TAU * x))


# --------------------------------------------------------------------------
# cyclotomic arithmetic


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact quotient of integer polynomials (coefficients low to high, ``den`` monic)."""
    num = list(num)
    dq = len(den) - 1
    out = [0] * (len(num) - dq)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + dq]
        out[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    if any(num[:dq]):
        raise NumericError("polynomial division left a remainder")
    return out


@lru_cache(maxsize=None)
def cyclotomic(q: int) -> tuple[int, ...]:
    """Coefficients of ``Phi_q`` from the constant term up."""
    if q < 1:
        raise DomainError("q must be positive")
    poly = [-1] + [0] * (q - 1) + [1]
    for d in divisors(q):
        if d < q:
            poly = _poly_divexact(poly, list(cyclotomic(d)))
    return tuple(poly)


def reduce_cyclotomic(coeffs, q: int) -> np.ndarray:
    """Remainders of coefficient rows modulo ``Phi_q``.

    ``coeffs`` is a 1-d or 2-d integer array (rows are polynomials, low
    degree first). Works in int64 while a running bound stays safe and
    switches to Python integers otherwise.
    """
    phi = np.array(cyclotomic(q), dtype=np.int64)
    deg = len(phi) - 1
    R = np.atleast_2d(np.asarray(coeffs, dtype=np.int64)).copy()
    width = R.shape[1]
    if width <= deg:
        return R
    growth = int(np.abs(phi).max()) + 1
    bound = int(np.abs(R).max()) if R.size else 0
    use_obj = False
    for top in range(width - 1, deg - 1, -1):
        if not use_obj and bound * growth >= 1 << 62:
            R = R.astype(object)
            use_obj = True
        c = R[:, top].copy()
        if np.any(c != 0):
            R[:, top - deg : top + 1] -= c[:, None] * phi[None, :]
            bound *= growth
    return R[:, :deg]


def is_zero_cyclotomic(coeffs, q: int) -> np.ndarray:
    """Whether each row's root-of-unity sum is exactly zero."""
    R = reduce_cyclotomic(coeffs, q)
    return np.all(R == 0, axis=1)


def _float_value(counts, q: int) -> tuple[float, float]:
    r = np.nonzero(counts)[0]
    c = np.asarray(counts)[r]
    ang = TAU * r / q
    return math.fsum(c * np.cos(ang)), math.fsum(c * np.sin(ang))


# --------------------------------------------------------------------------
# Kloosterman and Ramanujan sums


@dataclass(frozen=True)
class KloostermanSum:
    """``S(a, b; q)`` as the count of units ``x`` with ``ax + b/x = r (mod q)``."""

    a: int
    b: int
    q: int
    counts: tuple[int, ...]

    @property
    def value(self) -> float:
        return _float_value(self.counts, self.q)[0]

    @property
    def imag(self) -> float:
        return _float_value(self.counts, self.q)[1]

    def __float__(self) -> float:
        return self.value

    def equals_integer(self, n: int) -> bool:
        """Exact test ``S(a, b; q) == n``."""
        c = np.array(self.counts, dtype=np.int64)
        c[0] -= n
        return bool(is_zero_cyclotomic(c, self.q)[0])

    def is_real_exact(self) -> bool:
        """Exact reality: the coefficient vector is symmetric under ``r -> -r``."""
        c = np.array(self.counts)
        return bool(np.array_equal(c, np.roll(c[::-1], 1)))


def kloosterman(a: int, b: int, q: int) -> KloostermanSum:
    """``S(a, b; q) = sum over units x mod q of e((a x + b x^-1) / q)``; ``S(a, b; 1) = 1``."""
    if q < 1:
        raise DomainError("q must be positive")
    if q > KLOOSTERMAN_LIMIT:
        raise ResourceError(f"direct evaluation limited to q <= {KLOOSTERMAN_LIMIT}")
    counts = kloosterman_counts(a % q, b % q, q)
    return KloostermanSum(a, b, q, tuple(int(c) for c in counts))


def ramanujan(q: int, b: int) -> int:
    """``c_q(b) = sum_{d | (q, b)} d mu(q/d)``."""
    if q < 1:
        raise DomainError("q must be positive")
    g = math.gcd(q, b)
    return sum(d * mobius(q // d) for d in divisors(g))


def ramanujan_counts(q: int, b: int) -> np.ndarray:
    """Coefficient vector of the direct sum ``sum_{(x,q)=1} e(bx/q)``."""
    x = np.arange(q)
    units = x[np.gcd(x, q) == 1]
    return np.bincount((b * units) % q, minlength=q).astype(np.int64)


def ramanujan_table_check(q_max: int) -> list[tuple[int, int]]:
    """Pairs ``(q, b)``, ``0 <= b <= q <= q_max``, where the divisor formula and
    the direct sum disagree exactly (expected empty)."""
    bad = []
    for q in range(1, q_max + 1):
        rows = np.stack([ramanujan_counts(q, b) for b in range(q + 1)])
        rows[:, 0] -= np.array([ramanujan(q, b) for b in range(q + 1)])
        ok = is_zero_cyclotomic(rows, q)
        bad += [(q, b) for b in range(q + 1) if not ok[b]]
    return bad


def kloosterman_ramanujan_check(q_max: int) -> list[tuple[int, int]]:
    """Pairs where ``S(0, b; q) != c_q(b)`` exactly (expected empty)."""
    bad = []
    for q in range(1, q_max + 1):
        rows = np.stack([np.asarray(kloosterman_counts(0, b % q, q), dtype=np.int64) for b in range(q + 1)])
        rows[:, 0] -= np.array([ramanujan(q, b) for b in range(q + 1)])
        ok = is_zero_cyclotomic(rows, q)
        bad += [(q, b) for b in range(q + 1) if not ok[b]]
    return bad


# --------------------------------------------------------------------------
# Weil bound scan


def kloosterman_table(q: int) -> np.ndarray:
    """Real array ``S[a, b]`` for ``0 <= a, b < q`` via one FFT per ``b``."""
    x = np.arange(q)
    units = x[np.gcd(x, q) == 1]
    inv = np.array([pow(int(u), -1, q) for u in units], dtype=np.int64) if q > 1 else np.zeros(1, np.int64)
    F = np.zeros((q, q), dtype=np.complex128)
    bs = np.arange(q)[:, None]
    F[:, units] = np.exp(TAU * 1j * ((bs * inv[None, :]) % q) / q)
    # S[a, b] = sum_x e(a x / q) F[b, x]
    S = np.fft.ifft(F, axis=1) * q
    return S.real.T.copy()


def _exact_square_vs(counts: np.ndarray, q: int, B: int) -> int:
    """Sign of ``S**2 - B`` decided exactly (0 on equality)."""
    c = np.asarray(counts, dtype=np.int64)
    sq = np.convolve(c, c)
    folded = sq[:q].copy()
    folded[: len(sq) - q] += sq[q:]
    folded[0] -= B
    if is_zero_cyclotomic(folded, q)[0]:
        return 0
    with mpmath.workdps(60):
        s = mpmath.fsum(int(k) * mpmath.cospi(mpmath.mpf(2 * r) / q) for r, k in enumerate(c) if k)
        d = s * s - B
        if abs(d) < mpmath.mpf(10) ** -40:
            raise NumericError(f"could not separate S^2 from {B} at q={q}")
        return 1 if d > 0 else -1


@dataclass
class WeilRow:
    q: int
    pairs: int
    violations: list[tuple[int, int, int]]
    max_ratio: float
    argmax: tuple[int, int]
    prime_unit_max: float | None
    exact_ties: int


def _weil_q(q: int) -> WeilRow:
    S = kloosterman_table(q)
    t = tau(q)
    idx = np.arange(1, q + 1)
    a, b = np.meshgrid(idx, idx, indexing="ij")
    g = np.gcd(np.gcd(a, b), q)
    vals = S[a % q, b % q]
    B = (t * t * q) * g
    ratio = np.abs(vals) / np.sqrt(B)
    sq = vals * vals
    near = np.abs(sq - B) <= 1e-6 * B
    viol = (sq > B) & ~near
    violations = [(q, int(x), int(y)) for x, y in zip(a[viol], b[viol])]
    ties = 0
    for x, y in zip(a[near], b[near]):
        ties += 1
        counts = kloosterman_counts(int(x) % q, int(y) % q, q)
        if _exact_square_vs(counts, q, int(B[x - 1, y - 1])) > 0:
            violations.append((q, int(x), int(y)))
    k = int(np.argmax(ratio))
    prime_max = None
    if is_prime(q):
        mask = (a % q != 0) & (b % q != 0)
        prime_max = float(np.abs(vals[mask]).max() / math.sqrt(q)) if mask.any() else 0.0
    return WeilRow(q, q * q, violations, float(ratio.flat[k]),
                   (int(a.flat[k]), int(b.flat[k])), prime_max, ties)


@dataclass
class WeilReport:
    q_limit: int
    rows: list[WeilRow] = field(default_factory=list)

    @property
    def violations(self) -> list[tuple[int, int, int]]:
        return [v for r in self.rows for v in r.violations]

    @property
    def pairs(self) -> int:
        return sum(r.pairs for r in self.rows)

    @property
    def max_ratio(self) -> tuple[float, int, tuple[int, int]]:
        r = max(self.rows, key=lambda r: (r.max_ratio, -r.q))
        return r.max_ratio, r.q, r.argmax

    @property
    def prime_unit_max(self) -> float:
        """``max |S(a,b;p)| / sqrt(p)`` over primes ``p`` and units ``a, b``."""
        vals = [r.prime_unit_max for r in self.rows if r.prime_unit_max is not None]
        return max(vals, default=0.0)


def weil_check(q_limit: int, q_min: int = 1, workers: int = 1) -> WeilReport:
    """Scan ``|S(a,b;q)| <= tau(q) sqrt(q) gcd(a,b,q)^(1/2)`` for ``1 <= a, b <= q``.

    Near-equalities are settled exactly (cyclotomic reduction of ``S**2 - B``).
    """
    if q_limit > WEIL_LIMIT:
        raise ResourceError(f"full scan limited to q <= {WEIL_LIMIT}")
    qs = range(max(1, q_min), q_limit + 1)
    if workers <= 1:
        rows = [_weil_q(q) for q in qs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_weil_q, qs, chunksize=8))
    return WeilReport(q_limit, rows)


# --------------------------------------------------------------------------
# the bump function


def _bump(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


@dataclass(frozen=True)
class BumpFunction:
    """``psi0 = 1_[3/4, 9/4] * m_w`` with ``m_w`` the normalized bump of half-width ``w``.

    Support is ``[3/4 - w, 9/4 + w]`` and ``psi0 = 1`` on ``[3/4 + w, 9/4 - w]``;
    with ``w = 1/4`` that is ``[1/2, 5/2]`` and ``[1, 2]``. The Fourier
    transform factors as the transform of the indicator times ``m_w^``, and
    ``m_w^`` is computed by the trapezoid rule, which converges faster than
    any power here because the bump is flat at both ends.
    """

    width: float = 0.25
    left: float = 0.75
    right: float = 2.25
    gl_nodes: int = 120
    trap_nodes: int = 8192
    freq_cutoff: float = 1000.0  # in units of xi * width; |m^| < 1e-30 beyond

    def __post_init__(self):
        if not 0 < self.width <= (self.right - self.left) / 2:
            raise DomainError("mollifier width must be positive and at most half the plateau")

    @property
    def support(self) -> tuple[float, float]:
        return self.left - self.width, self.right + self.width

    @property
    def plateau(self) -> tuple[float, float]:
        return self.left + self.width, self.right - self.width

    @property
    def _gl(self):
        return _gl_rule(self.gl_nodes)

    @property
    def _mass(self) -> float:
        return _bump_mass(self.trap_nodes)

    def _cdf(self, u: np.ndarray) -> np.ndarray:
        """Normalized ``int_{-1}^{u} m`` for ``u`` clipped to ``[-1, 1]``."""
        u = np.clip(np.asarray(u, dtype=float), -1.0, 1.0)
        x, w = self._gl
        half = (u + 1.0) / 2.0
        s = half[..., None] * (x + 1.0) - 1.0
        val = half * (_bump(s) * w).sum(axis=-1)
        return val / _gl_mass(self.gl_nodes)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        w = self.width
        # mirror the right half (m is even) so each edge is a single tail integral
        mid = (self.left + self.right) / 2
        out = np.where(
            t <= mid,
            self._cdf((t - self.left) / w) - self._cdf((t - self.right) / w),
            self._cdf((self.right - t) / w) - self._cdf((self.left - t) / w),
        )
        out = np.clip(out, 0.0, 1.0)
        lo, hi = self.plateau
        out = np.where((t >= lo) & (t <= hi), 1.0, out)
        a, b = self.support
        out = np.where((t <= a) | (t >= b), 0.0, out)
        return out if out.ndim else float(out)

    def mollifier_hat(self, xi) -> np.ndarray:
        """Fourier transform of the normalized ``m_w`` (real and even)."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        k = np.abs(xi) * self.width
        out = np.zeros_like(k)
        live = k <= self.freq_cutoff
        u, mv = _trap_rule(self.trap_nodes)
        kk = k[live]
        res = np.empty_like(kk)
        for start in range(0, len(kk), 256):
            chunk = kk[start : start + 256]
            res[start : start + 256] = np.cos(TAU * chunk[:, None] * u[None, :]) @ mv
        out[live] = res / mv.sum()
        return out

    def fourier(self, xi):
        """``psi0^(xi) = int psi0(t) e(-xi t) dt``."""
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
        length = self.right - self.left
        centre = (self.right + self.left) / 2
        with np.errstate(invalid="ignore", divide="ignore"):
            ind = np.where(xi_arr == 0, length, np.sin(math.pi * length * xi_arr) / (math.pi * xi_arr))
        phase = np.exp(-1j * TAU * centre * xi_arr)
        out = phase * ind * self.mollifier_hat(xi_arr)
        return out if np.ndim(xi) else complex(out[0])

    def fourier_quad(self, xi: float, tol: float = 1e-10) -> complex:
        """Independent check of :meth:`fourier` by adaptive quadrature of ``psi0`` itself."""
        a, b = self.support
        lo, hi = self.plateau
        out = []
        for fn in (math.cos, math.sin):
            total = 0.0
            err = 0.0
            for p, r in ((a, lo), (lo, hi), (hi, b)):
                v, ev = integrate.quad(lambda t: float(self(t)) * fn(TAU * xi * t), p, r,
                                       epsabs=tol / 10, epsrel=0, limit=400)
                total += v
                err += ev
            if err > tol:
                raise NumericError(f"quadrature error estimate {err:.2e} exceeds {tol:.0e} at xi={xi}")
            out.append(total)
        return complex(out[0], -out[1])

    def derivative_sups(self, max_order: int = 6, grid: int = 400) -> list[float]:
        """Measured ``sup |psi0^(j)|`` for ``j = 0..max_order``.

        For ``j >= 1`` the derivative is ``w**-j (m^(j-1)(u1) - m^(j-1)(u2)) / Z``
        with disjoint supports, so its sup is ``w**-j sup |m^(j-1)| / Z``.
        """
        Z = _bump_mass(self.trap_nodes)
        sups = [1.0]
        if max_order < 1:
            return sups
        best = [0.0] * max_order
        f = lambda s: mpmath.exp(-1 / (1 - s * s))
        with mpmath.workdps(30):
            for i in range(grid):
                s = mpmath.mpf(i) / grid  # m is even, so s in [0, 1) suffices
                ders = mpmath.taylor(f, s, max_order - 1)
                for n, c in enumerate(ders):
                    best[n] = max(best[n], abs(float(c)) * math.factorial(n))
        for j in range(1, max_order + 1):
            sups.append(best[j - 1] / Z / self.width**j)
        return sups


@lru_cache(maxsize=None)
def _gl_rule(n: int):
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=None)
def _gl_mass(n: int) -> float:
    x, w = _gl_rule(n)
    return float((_bump(x) * w).sum())


@lru_cache(maxsize=None)
def _trap_rule(n: int):
    u = np.linspace(-1.0, 1.0, n + 1)[1:-1]
    return u, _bump(u) * (2.0 / n)


@lru_cache(maxsize=None)
def _bump_mass(n: int) -> float:
    return float(_trap_rule(n)[1].sum())


PSI0 = BumpFunction()


def psi0_eval(t):
    return PSI0(t)


def psi0_fourier(xi):
    return PSI0.fourier(xi)


# --------------------------------------------------------------------------
# completion checks


@dataclass
class PoissonReport:
    M: int
    q: int
    a: int
    H: int
    lhs: float
    rhs: float
    rhs_imag: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def default_H(M: int, q: int) -> int:
    return int(100 * q / M + 100)


def poisson_check(M: int, q: int, a: int, H: int | None = None, psi: BumpFunction = PSI0) -> PoissonReport:
    """Both sides of the truncated Poisson formula for ``sum_{m = a (q)} psi(m/M)``."""
    if not (1 <= q <= COMPLETION_LIMIT and 1 <= M <= COMPLETION_LIMIT):
        raise DomainError(f"need 1 <= q, M <= {COMPLETION_LIMIT}")
    H = default_H(M, q) if H is None else int(H)
    if H < 0:
        raise DomainError("H must be non-negative")
    lo, hi = psi.support
    first = math.ceil(lo * M)
    first += (a - first) % q
    ms = np.arange(first, math.floor(hi * M) + 1, q)
    lhs = math.fsum(psi(ms / M)) if len(ms) else 0.0
    h = np.arange(1, H + 1)
    hats = psi.fourier(h * M / q) if H else np.zeros(0, complex)
    tw = np.exp(TAU * 1j * ((a * h) % q) / q)
    terms = hats * tw
    # h and -h are complex conjugates since psi is real
    body = psi.fourier(0.0).real + 2 * math.fsum(terms.real)
    imag = 0.0
    return PoissonReport(M, q, a, H, lhs, (M / q) * body, imag)


@dataclass
class CoprimeReport:
    M: int
    q: int
    lhs: float
    main: float

    @property
    def deviation(self) -> float:
        return abs(self.lhs - self.main)

    @property
    def envelope(self) -> float:
        return tau(self.q) * max(1.0, math.log(self.M)) ** 2

    @property
    def ratio(self) -> float:
        return self.deviation / self.envelope


def coprime_sum_check(M: int, q: int, psi: BumpFunction = PSI0) -> CoprimeReport:
    """``sum_{(m,q)=1} psi(m/M)`` against ``(phi(q)/q) M psi^(0)``."""
    if not (1 <= q <= COMPLETION_LIMIT and 1 <= M <= COMPLETION_LIMIT):
        raise DomainError(f"need 1 <= q, M <= {COMPLETION_LIMIT}")
    lo, hi = psi.support
    ms = np.arange(math.ceil(lo * M), math.floor(hi * M) + 1)
    ms = ms[np.gcd(ms, q) == 1]
    lhs = math.fsum(psi(ms / M)) if len(ms) else 0.0
    main = euler_phi(q) / q * M * psi.fourier(0.0).real
    return CoprimeReport(M, q, lhs, main)
