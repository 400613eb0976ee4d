"""Truncated Dirichlet series, local Euler factors and the ideal-count series b_K."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Optional, Sequence

from . import errors
from .cmfield import CMField
from .exactmath import (
    DEFAULT_SEED,
    ModPoly,
    RatPoly,
    factor_mod_p,
    is_fundamental_discriminant,
    kronecker_symbol,
    primes_up_to,
    smallest_prime_factors,
)
from .splitting import Bad, NoneFixed, SomeFixed, classify_prime

MAX_PQ_INDEX = 64


@dataclass(frozen=True)
class DirichletCoeffs:
    """Coefficients a_1..a_N of sum a_n n^{-s}; ``coeffs[0]`` is a_1."""

    N: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.N:
            raise ValueError(f"expected {self.N} coefficients, got {len(self.coeffs)}")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    def __getitem__(self, n: int) -> Fraction:
        if not 1 <= n <= self.N:
            raise IndexError(n)
        return self.coeffs[n - 1]

    def scale(self, c) -> "DirichletCoeffs":
        c = Fraction(c)
        return DirichletCoeffs(self.N, tuple(a * c for a in self.coeffs))

    def as_ints(self) -> list[int]:
        if any(c.denominator != 1 for c in self.coeffs):
            raise ValueError("series has non-integral coefficients")
        return [int(c) for c in self.coeffs]

    @classmethod
    def from_function(cls, N: int, f: Callable[[int], object]) -> "DirichletCoeffs":
        return cls(N, tuple(f(n) for n in range(1, N + 1)))


@dataclass(frozen=True)
class EulerFactorRat:
    """Local factor numerator(t) / denominator(t) with t = p^{-s}."""

    p: int
    numerator: tuple  # ascending integer coefficients
    denominator: tuple

    def __post_init__(self):
        if not self.numerator or not self.denominator or self.numerator[0] != 1 or self.denominator[0] != 1:
            raise ValueError("Euler factors are normalized: numerator(0) = denominator(0) = 1")

    def series(self, k_max: int) -> list[int]:
        """Coefficients of t^0..t^k_max."""
        num, den = self.numerator, self.denominator
        out = []
        for k in range(k_max + 1):
            c = num[k] if k < len(num) else 0
            c -= sum(den[j] * out[k - j] for j in range(1, min(k, len(den) - 1) + 1))
            out.append(c)
        return out


# ---------------------------------------------------------------------------
# P_n and Q_n
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def pn_poly(n: int) -> RatPoly:
    """P_n with sum_k (k+1)^n t^k = P_n(t) / (1-t)^(n+1)."""
    if not 0 <= n <= MAX_PQ_INDEX:
        raise ValueError(f"n must lie in [0, {MAX_PQ_INDEX}]")
    if n == 0:
        return RatPoly((1,))
    prev = pn_poly(n - 1)
    m = n - 1
    x = RatPoly.x()
    return x * (1 - x) * prev.derivative() + (1 + m * x) * prev


@lru_cache(maxsize=None)
def qn_poly(n: int) -> RatPoly:
    """Q_n with sum_l (2l+1)^n t^(2l) = Q_n(t) / (1-t^2)^(n+1)."""
    if not 0 <= n <= MAX_PQ_INDEX:
        raise ValueError(f"n must lie in [0, {MAX_PQ_INDEX}]")
    if n == 0:
        return RatPoly((1,))
    prev = qn_poly(n - 1)
    m = n - 1
    x = RatPoly.x()
    return x * (1 - x * x) * prev.derivative() + (1 + (2 * m + 1) * x * x) * prev


def _one_minus_power(k: int, e: int) -> tuple:
    """Coefficients of (1 - t^k)^e."""
    out = [0] * (k * e + 1)
    for j in range(e + 1):
        out[k * j] = (-1) ** j * comb(e, j)
    return tuple(out)


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> tuple:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _trim_int(a: Sequence[int]) -> tuple:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return tuple(a)


# ---------------------------------------------------------------------------
# Local factors of Z(K, s)
# ---------------------------------------------------------------------------

def ramified_local_count(e_pairs: Sequence[int], e_fixed: Sequence[int], k: int) -> int:
    """#ideals with a*conj(a) = p^k: a+b = k e per swapped pair, 2a = k e per fixed place."""
    out = 1
    for e in e_pairs:
        out *= k * e + 1
    for e in e_fixed:
        if (k * e) % 2:
            return 0
    return out


def _closed_form(series: Callable[[int], int], den: tuple, p: int) -> EulerFactorRat:
    """Match a power series to numerator / den with deg numerator < deg den."""
    dd = len(den) - 1
    length = 3 * (dd + 2)
    s = [series(k) for k in range(length)]
    prod = [sum(den[j] * s[k - j] for j in range(min(k, dd) + 1)) for k in range(length)]
    if any(prod[dd:]):
        raise errors.WeilZetaError(
            f"local series at p={p} does not have the expected rational closed form"
        )
    return EulerFactorRat(p, _trim_int(prod[:dd] or [1]), den)


def euler_factor_Z(field: CMField, p: int) -> EulerFactorRat:
    """Local factor Z_p(K, s) = sum_k b_K(p^k) t^k as a rational function of t."""
    cls = classify_prime(field, p)
    if isinstance(cls, Bad):
        raise errors.BadPrimeFactor(f"{p} is a bad prime of {field.name}")
    if isinstance(cls, NoneFixed):
        num = tuple(int(c) for c in pn_poly(cls.r).coeffs)
        return EulerFactorRat(p, num, _one_minus_power(1, cls.r + 1))
    if isinstance(cls, SomeFixed):
        num = tuple(int(c) for c in qn_poly(cls.r_prime).coeffs)
        return EulerFactorRat(p, num, _one_minus_power(2, cls.r_prime + 1))
    sp = cls.splitting
    e_pairs = [sp.places[i].e for i, _ in sp.swapped_pairs]
    e_fixed = [sp.places[i].e for i in sp.fixed]
    parity = any(e % 2 for e in e_fixed)
    den = _one_minus_power(2 if parity else 1, len(e_pairs) + 1)
    return _closed_form(lambda k: ramified_local_count(e_pairs, e_fixed, k), den, p)


def local_ideal_counts(field: CMField, p: int, k_max: int) -> list[int]:
    """b_K(p^k) for k = 0..k_max straight from the exponent combinatorics."""
    cls = classify_prime(field, p)
    if isinstance(cls, Bad):
        raise errors.BadPrimeFactor(f"{p} is a bad prime of {field.name}")
    if isinstance(cls, NoneFixed):
        return [(k + 1) ** cls.r for k in range(k_max + 1)]
    if isinstance(cls, SomeFixed):
        return [0 if k % 2 else (k + 1) ** cls.r_prime for k in range(k_max + 1)]
    sp = cls.splitting
    e_pairs = [sp.places[i].e for i, _ in sp.swapped_pairs]
    e_fixed = [sp.places[i].e for i in sp.fixed]
    return [ramified_local_count(e_pairs, e_fixed, k) for k in range(k_max + 1)]


# ---------------------------------------------------------------------------
# Global assembly
# ---------------------------------------------------------------------------

def _max_power(p: int, N: int) -> int:
    k, q = 0, 1
    while q * p <= N:
        q *= p
        k += 1
    return k


def assemble_multiplicative(N: int, local: Callable[[int, int], Sequence[int]]) -> list[int]:
    """c_n = prod_p local(p, k_max)[v_p(n)] for n = 1..N (returned 0-indexed at n-1)."""
    if N < 1:
        return []
    spf = smallest_prime_factors(max(N, 2))
    tables = {p: list(local(p, _max_power(p, N))) for p in primes_up_to(N)}
    c = [0] * (N + 1)
    c[1] = 1
    for n in range(2, N + 1):
        p = int(spf[n])
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        c[n] = c[m] * tables[p][k]
    return c[1:]


def z_coeffs(field: CMField, N: int, omit: Iterable[int] = ()) -> DirichletCoeffs:
    """b_K(1..N) from the Euler product; primes in ``omit`` get local factor 1."""
    omit = set(omit)

    def local(p, k_max):
        if p in omit:
            return [1] + [0] * k_max
        return euler_factor_Z(field, p).series(k_max)

    return DirichletCoeffs(N, tuple(assemble_multiplicative(N, local)))


def dedekind_coeffs(minpoly: Sequence[int], bad_primes: Iterable[int], N: int,
                    omit: Iterable[int] = (), seed: int = DEFAULT_SEED) -> DirichletCoeffs:
    """Number of ideals of norm n, n = 1..N, from splitting types of minpoly.

    ``minpoly`` is an ascending integer list.  Primes outside ``bad_primes`` are
    trusted to be coprime to the index of Z[theta].
    """
    bad, omit = set(bad_primes), set(omit)
    f = RatPoly(tuple(minpoly))

    def local(p, k_max):
        if p in omit:
            return [1] + [0] * k_max
        if p in bad:
            raise errors.BadPrimeFactor(f"{p} is bad for the Dedekind factorization")
        den = (1,)
        for g, _ in factor_mod_p(ModPoly.from_ratpoly(f, p), seed):
            den = _poly_mul(den, _one_minus_power(g.degree, 1))
        return EulerFactorRat(p, (1,), den).series(k_max)

    return DirichletCoeffs(N, tuple(assemble_multiplicative(N, local)))


def quadratic_L_coeffs(D: int, N: int) -> DirichletCoeffs:
    """Coefficients of L(eps_D, s); primes dividing D contribute factor 1."""
    if not is_fundamental_discriminant(D):
        raise errors.NotFundamentalDiscriminant(f"{D} is not a fundamental discriminant")
    return DirichletCoeffs.from_function(N, lambda n: kronecker_symbol(D, n))


def zeta_ones(N: int) -> DirichletCoeffs:
    return DirichletCoeffs(N, (1,) * N)


def identity_series(N: int) -> DirichletCoeffs:
    return DirichletCoeffs(N, (1,) + (0,) * (N - 1))


# ---------------------------------------------------------------------------
# Series algebra
# ---------------------------------------------------------------------------

def _same_length(a: DirichletCoeffs, b: DirichletCoeffs):
    if a.N != b.N:
        raise errors.TruncationMismatch(f"truncations differ: {a.N} vs {b.N}")


def series_convolve(a: DirichletCoeffs, b: DirichletCoeffs) -> DirichletCoeffs:
    _same_length(a, b)
    N = a.N
    out = [Fraction(0)] * (N + 1)
    for d in range(1, N + 1):
        x = a.coeffs[d - 1]
        if not x:
            continue
        for m in range(1, N // d + 1):
            y = b.coeffs[m - 1]
            if y:
                out[d * m] += x * y
    return DirichletCoeffs(N, tuple(out[1:]))


def series_invert(a: DirichletCoeffs) -> DirichletCoeffs:
    if a.N < 1 or a.coeffs[0] == 0:
        raise errors.NonUnitLeadingCoefficient("a_1 must be nonzero to invert")
    N = a.N
    inv = [Fraction(0)] * (N + 1)
    inv[1] = 1 / a.coeffs[0]
    # accumulate sum_{d | n, d > 1} a_d inv_{n/d} by sieving over multiples
    acc = [Fraction(0)] * (N + 1)
    for n in range(1, N + 1):
        if n > 1:
            inv[n] = -acc[n] * inv[1]
        x = inv[n]
        if x:
            for d in range(2, N // n + 1):
                ad = a.coeffs[d - 1]
                if ad:
                    acc[d * n] += ad * x
    return DirichletCoeffs(N, tuple(inv[1:]))


def series_dilate(a: DirichletCoeffs, k: int) -> DirichletCoeffs:
    """Substitute s -> k s: coefficient a_n moves to index n^k."""
    if k < 1:
        raise ValueError("dilation factor must be >= 1")
    out = [Fraction(0)] * a.N
    n = 1
    while n**k <= a.N:
        out[n**k - 1] = a.coeffs[n - 1]
        n += 1
    return DirichletCoeffs(a.N, tuple(out))


def series_restrict_coprime(a: DirichletCoeffs, primes: Iterable[int]) -> DirichletCoeffs:
    out = list(a.coeffs)
    for p in primes:
        for m in range(p, a.N + 1, p):
            out[m - 1] = Fraction(0)
    return DirichletCoeffs(a.N, tuple(out))


def series_mismatches(a: DirichletCoeffs, b: DirichletCoeffs, limit: Optional[int] = None) -> list:
    _same_length(a, b)
    out = [(n, x, y) for n, (x, y) in enumerate(zip(a.coeffs, b.coeffs), start=1) if x != y]
    return out[:limit] if limit else out
