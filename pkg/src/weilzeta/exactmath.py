"""Exact arithmetic kernel.

Rationals are :class:`fractions.Fraction` throughout (aliased here as
``BigRational``).  Polynomials are stored as coefficient tuples in ascending
degree order.  Two polynomial types are provided:

* :class:`RatPoly` -- polynomials over Q,
* :class:`ModPoly` -- polynomials over F_p for a prime ``p < 2**31``.

plus factorization over F_p (square-free, distinct-degree, equal-degree)
and the Kronecker symbol.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import sympy

from .errors import ModulusMismatch, ZeroPolynomial

BigRational = Fraction

DEFAULT_SEED = 0x5EED
MAX_MODULUS = 2**31


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions, ``(num, den)`` pairs and decimal strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (list, tuple)):
        num, den = x
        return Fraction(int(num), int(den))
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(int(x))


# ---------------------------------------------------------------------------
# Polynomials over Q
# ---------------------------------------------------------------------------

def _strip(coeffs: list) -> list:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


@dataclass(frozen=True)
class RatPoly:
    """Univariate polynomial with rational coefficients, ascending order."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = _strip([as_fraction(a) for a in self.coeffs])
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def x(cls) -> "RatPoly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __add__(self, other):
        other = _to_ratpoly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RatPoly([self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return RatPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_to_ratpoly(other))

    def __rsub__(self, other):
        return _to_ratpoly(other) - self

    def __mul__(self, other):
        other = _to_ratpoly(other)
        if self.is_zero() or other.is_zero():
            return RatPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RatPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = RatPoly((1,))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other):
        other = _to_ratpoly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        inv = 1 / other.lc()
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] * inv
            if c:
                quot[k - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[k - dq + j] -= c * b
        return RatPoly(quot), RatPoly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def derivative(self) -> "RatPoly":
        return RatPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "RatPoly":
        if self.is_zero():
            return self
        inv = 1 / self.lc()
        return RatPoly([c * inv for c in self.coeffs])

    def compose(self, inner: "RatPoly") -> "RatPoly":
        acc = RatPoly()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def __repr__(self):
        if not self.coeffs:
            return "RatPoly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" + ("" if i == 0 else "*x" if i == 1 else f"*x^{i}"))
        return "RatPoly(" + " + ".join(terms) + ")"


def _to_ratpoly(a) -> RatPoly:
    if isinstance(a, RatPoly):
        return a
    return RatPoly((a,))


def ratpoly_gcd(a: RatPoly, b: RatPoly) -> RatPoly:
    """Monic gcd over Q."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


# ---------------------------------------------------------------------------
# Polynomials over F_p -- list kernels
# ---------------------------------------------------------------------------

def _trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _padd(a, b, p):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return _trim(out)


def _psub(a, b, p):
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, x in enumerate(b):
        out[i] = (out[i] - x) % p
    return _trim(out)


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _pdivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    db = len(b) - 1
    if len(rem) - 1 < db:
        return [], _trim([c % p for c in rem])
    inv = 1 if b[-1] == 1 else pow(b[-1], -1, p)
    quot = [0] * (len(rem) - db)
    for k in range(len(rem) - 1, db - 1, -1):
        c = rem[k] % p
        if inv != 1:
            c = c * inv % p
        if c:
            quot[k - db] = c
            base = k - db
            for j in range(db):
                rem[base + j] -= c * b[j]
    return _trim(quot), _trim([c % p for c in rem[:db]])


def _pmod(a, b, p):
    return _pdivmod(a, b, p)[1]


def _pmonic(a, p):
    if not a:
        return []
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return _pmonic(a, p)


def _ppowmod(base, e, mod, p):
    result = [1]
    base = _pmod(base, mod, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), mod, p)
        e >>= 1
        if e:
            base = _pmod(_pmul(base, base, p), mod, p)
    return result


def _pderiv(a, p):
    return _trim([(i * c) % p for i, c in enumerate(a)][1:])


def _pcompose_mod(outer, inner, mod, p):
    """outer(inner(x)) mod ``mod`` over F_p, by Horner's rule."""
    acc = []
    for c in reversed(outer):
        acc = _pmod(_pmul(acc, inner, p), mod, p) if acc else []
        if c:
            acc = _padd(acc, [c], p)
    return acc


def _ppth_root(a, p):
    # a(x) = b(x)^p with b having the same coefficients at x^(i*p) -> x^i
    return _trim([a[i] for i in range(0, len(a), p)])


@dataclass(frozen=True)
class ModPoly:
    """Polynomial over F_p with coefficients reduced into [0, p)."""

    p: int
    coeffs: tuple = ()

    def __post_init__(self):
        if not (2 <= self.p < MAX_MODULUS):
            raise ValueError(f"modulus {self.p} out of range [2, 2^31)")
        c = _trim([int(a) % self.p for a in self.coeffs])
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_ratpoly(cls, f: RatPoly, p: int) -> "ModPoly":
        out = []
        for c in f.coeffs:
            if c.denominator % p == 0:
                raise ZeroDivisionError(f"denominator divisible by {p}")
            out.append(c.numerator * pow(c.denominator, -1, p))
        return cls(p, out)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def _check(self, other: "ModPoly"):
        if other.p != self.p:
            raise ModulusMismatch(f"moduli differ: {self.p} vs {other.p}")

    def __add__(self, other):
        self._check(other)
        return ModPoly(self.p, _padd(self.coeffs, other.coeffs, self.p))

    def __sub__(self, other):
        self._check(other)
        return ModPoly(self.p, _psub(self.coeffs, other.coeffs, self.p))

    def __mul__(self, other):
        if isinstance(other, int):
            return ModPoly(self.p, [c * other for c in self.coeffs])
        self._check(other)
        return ModPoly(self.p, _pmul(self.coeffs, other.coeffs, self.p))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = [1]
        for _ in range(k):
            out = _pmul(out, self.coeffs, self.p)
        return ModPoly(self.p, out)

    def __divmod__(self, other):
        self._check(other)
        q, r = _pdivmod(self.coeffs, other.coeffs, self.p)
        return ModPoly(self.p, q), ModPoly(self.p, r)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def monic(self) -> "ModPoly":
        return ModPoly(self.p, _pmonic(list(self.coeffs), self.p))

    def __repr__(self):
        return f"ModPoly(p={self.p}, {list(self.coeffs)})"


def poly_gcd_mod_p(a: ModPoly, b: ModPoly) -> ModPoly:
    """Monic gcd of two polynomials over the same prime field."""
    if a.p != b.p:
        raise ModulusMismatch(f"moduli differ: {a.p} vs {b.p}")
    return ModPoly(a.p, _pgcd(a.coeffs, b.coeffs, a.p))


# ---------------------------------------------------------------------------
# Factorization over F_p
# ---------------------------------------------------------------------------

def _squarefree(f, p):
    """Square-free decomposition of a monic ``f``: list of (g, multiplicity)."""
    out = []
    fp = _pderiv(f, p)
    if not fp:
        for g, m in _squarefree(_ppth_root(f, p), p):
            out.append((g, m * p))
        return out
    c = _pgcd(f, fp, p)
    w = _pdivmod(f, c, p)[0]
    i = 1
    while len(w) > 1:
        y = _pgcd(w, c, p)
        fac = _pdivmod(w, y, p)[0]
        if len(fac) > 1:
            out.append((_pmonic(fac, p), i))
        i += 1
        w = y
        c = _pdivmod(c, y, p)[0]
    if len(c) > 1:
        for g, m in _squarefree(_ppth_root(_pmonic(c, p), p), p):
            out.append((g, m * p))
    return out


def _distinct_degree(f, p):
    """Split a square-free monic f into (product of degree-i factors, i)."""
    out = []
    x = [0, 1]
    xp = _ppowmod(x, p, f, p)  # Frobenius acts on F_p[x]/f by composing with x^p
    h = xp
    i = 1
    while len(f) - 1 >= 2 * i:
        g = _pgcd(f, _psub(h, x, p), p)
        if len(g) > 1:
            out.append((g, i))
            f = _pdivmod(f, g, p)[0]
            h = _pmod(h, f, p)
            xp = _pmod(xp, f, p)
        i += 1
        if len(f) - 1 >= 2 * i:
            h = _pcompose_mod(h, xp, f, p)
    if len(f) > 1:
        out.append((_pmonic(f, p), len(f) - 1))
    return out


def _equal_degree(f, d, p, rng):
    """Cantor-Zassenhaus splitting of f, a product of distinct degree-d irreducibles."""
    n = len(f) - 1
    if n == d:
        return [f]
    xp = _ppowmod([0, 1], p, f, p)
    while True:
        a = _trim([rng.randrange(p) for _ in range(n)])
        if len(a) < 2:
            continue
        if p == 2:
            # absolute trace a + a^2 + ... + a^(2^(d-1))
            b = list(a)
            t = list(a)
            for _ in range(d - 1):
                t = _pmod(_pmul(t, t, p), f, p)
                b = _padd(b, t, p)
        else:
            # a^((p^d - 1)/2) = (a * a^p * ... * a^(p^(d-1)))^((p - 1)/2)
            norm = list(a)
            t = list(a)
            for _ in range(d - 1):
                t = _pcompose_mod(t, xp, f, p)
                norm = _pmod(_pmul(norm, t, p), f, p)
            b = _psub(_ppowmod(norm, (p - 1) // 2, f, p), [1], p)
        h = _pgcd(b, f, p)
        if 0 < len(h) - 1 < n:
            rest = _pdivmod(f, h, p)[0]
            return _equal_degree(h, d, p, rng) + _equal_degree(_pmonic(rest, p), d, p, rng)


def factor_mod_p(f: ModPoly, seed: int = DEFAULT_SEED) -> list[tuple[ModPoly, int]]:
    """Factor ``f`` into monic irreducibles over F_p.

    Returns ``[(factor, multiplicity), ...]`` sorted by degree and then by
    coefficient tuple.  The leading coefficient of ``f`` is dropped; the
    product of the factors times ``f``'s leading coefficient is ``f``.
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    p = f.p
    rng = random.Random(seed)
    monic = _pmonic(list(f.coeffs), p)
    found: dict[tuple, int] = {}
    for sq, mult in _squarefree(monic, p):
        for g, d in _distinct_degree(sq, p):
            for h in _equal_degree(g, d, p, rng):
                key = tuple(h)
                found[key] = found.get(key, 0) + mult
    items = sorted(found.items(), key=lambda kv: (len(kv[0]), kv[0]))
    return [(ModPoly(p, k), m) for k, m in items]


# ---------------------------------------------------------------------------
# Integers
# ---------------------------------------------------------------------------

def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a | n), extended to all integers a, n."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    s = 1
    if n < 0:
        n = -n
        if a < 0:
            s = -1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            s = -s
    # Jacobi symbol (a | n), n odd positive
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                s = -s
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            s = -s
        a %= n
    return s if n == 1 else 0


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(n**0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve).tolist()


def smallest_prime_factors(n: int) -> np.ndarray:
    """``spf[k]`` is the least prime dividing k, for 2 <= k <= n."""
    spf = np.zeros(n + 1, dtype=np.int32)
    for q in range(2, int(n**0.5) + 1):
        if spf[q] == 0:
            block = spf[q * q :: q]
            block[block == 0] = q
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    return spf


def factor_with_spf(m: int, spf: np.ndarray) -> list[tuple[int, int]]:
    out = []
    while m > 1:
        q = int(spf[m])
        e = 0
        while m % q == 0:
            m //= q
            e += 1
        out.append((q, e))
    return out


@lru_cache(maxsize=1 << 16)
def factorint(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of ``|n|`` as sorted ``((p, e), ...)``."""
    return tuple(sorted(sympy.factorint(abs(int(n))).items()))


def prime_divisors(n: int) -> list[int]:
    if n == 0:
        raise ValueError("0 has no finite prime-divisor set")
    return [p for p, _ in factorint(n)]


def divisors_from_factorization(fac: Iterable[tuple[int, int]]) -> list[int]:
    divs = [1]
    for p, e in fac:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return divs


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorint(n))


def is_fundamental_discriminant(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def poly_discriminant(coeffs: Sequence[int]) -> int:
    """Discriminant of an integer polynomial given in ascending order."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed([int(c) for c in coeffs])), x)
    return int(sympy.discriminant(poly))


def integer_sqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = sympy.integer_nthroot(n, 2)
    return int(r[0]) if r[1] else None
