"""How a rational prime decomposes in K, and how conjugation permutes the pieces."""
from __future__ import annotations

import weakref
from dataclasses import dataclass
from typing import Optional, Union

from . import errors
from .cmfield import CMField
from .exactmath import (
    DEFAULT_SEED,
    ModPoly,
    _padd,
    _pcompose_mod,
    _pderiv,
    _pdivmod,
    _pgcd,
    _pmod,
    _pmul,
    _ppowmod,
    _psub,
    factor_mod_p,
)


@dataclass(frozen=True)
class Place:
    f: int  # residue degree
    e: int  # ramification index
    factor: ModPoly
    conj_partner: int  # index of c(place); equal to its own index when fixed

    def triple(self, index: int) -> str:
        return f"{self.e}:{self.f}:{int(self.conj_partner == index)}"


@dataclass(frozen=True)
class PrimeSplitting:
    p: int
    places: tuple

    @property
    def fixed(self) -> list[int]:
        return [i for i, pl in enumerate(self.places) if pl.conj_partner == i]

    @property
    def swapped_pairs(self) -> list[tuple[int, int]]:
        return [(i, pl.conj_partner) for i, pl in enumerate(self.places) if pl.conj_partner > i]

    @property
    def unramified(self) -> bool:
        return all(pl.e == 1 for pl in self.places)

    def describe(self) -> str:
        return ";".join(pl.triple(i) for i, pl in enumerate(self.places))


@dataclass(frozen=True)
class NoneFixed:
    r: int

    tag = "NoneFixed"


@dataclass(frozen=True)
class SomeFixed:
    r_prime: int

    tag = "SomeFixed"


@dataclass(frozen=True)
class Ramified:
    """Ramified prime whose Dedekind factorization is certified by field_disc."""

    splitting: PrimeSplitting

    tag = "Ramified"


@dataclass(frozen=True)
class Bad:
    tag = "Bad"


PrimeClass = Union[NoneFixed, SomeFixed, Ramified, Bad]


def _compose_mod(outer, inner, mod, p):
    """outer(inner(x)) reduced modulo ``mod`` over F_p (Horner)."""
    acc = []
    for c in reversed(outer):
        acc = _padd(_pmod(_pmul(acc, inner, p), mod, p), [c], p)
    return _pmod(acc, mod, p)


def splitting_type(field: CMField, p: int, seed: int = DEFAULT_SEED) -> PrimeSplitting:
    if any(c.denominator % p == 0 for c in field.spec.conj_theta):
        raise errors.DenominatorCollision(f"conj_theta has a denominator divisible by {p}")
    if p in field.bad_primes:
        raise errors.BadPrime(f"{p} may divide the index of Z[theta]; Dedekind's criterion does not apply")
    f = ModPoly.from_ratpoly(field.minpoly, p)
    cbar = ModPoly.from_ratpoly(field.conj_poly, p).coeffs
    factors = factor_mod_p(f, seed)
    partners = []
    for i, (gi, _) in enumerate(factors):
        hits = [
            j
            for j, (gj, _) in enumerate(factors)
            if not _compose_mod(gi.coeffs, cbar, gj.coeffs, p)
        ]
        if len(hits) != 1:
            raise errors.BadPrime(f"conjugation partner of factor {i} mod {p} is not unique: {hits}")
        partners.append(hits[0])
    places = tuple(
        Place(f=g.degree, e=m, factor=g, conj_partner=partners[i])
        for i, (g, m) in enumerate(factors)
    )
    for i, pl in enumerate(places):
        other = places[pl.conj_partner]
        if other.conj_partner != i or (other.e, other.f) != (pl.e, pl.f):
            raise errors.BadPrime(f"conjugation action mod {p} is inconsistent")
    if sum(pl.e * pl.f for pl in places) != field.degree:
        raise errors.BadPrime(f"sum of e*f at {p} differs from the degree")
    return PrimeSplitting(p, places)


def classify_splitting(sp: PrimeSplitting) -> PrimeClass:
    if not sp.unramified:
        return Ramified(sp)
    if sp.fixed:
        return SomeFixed(len(sp.swapped_pairs))
    return NoneFixed(len(sp.places) // 2)


def unramified_shape(field: CMField, p: int) -> Optional[tuple[int, int]]:
    """(number of places, number of c-fixed places) without full factorization.

    Returns None when minpoly is not square-free mod p (p ramified or an index
    prime).  Distinct-degree products g_i are split by the action of c on
    their roots: c acts on the residue field of a fixed place of degree i as
    some power Frob^j, so gcd(g_i, c(x) - x^(p^j)) collects those places.
    """
    f = ModPoly.from_ratpoly(field.minpoly, p).coeffs
    if len(_pgcd(f, _pderiv(f, p), p)) > 1:
        return None
    cbar = list(ModPoly.from_ratpoly(field.conj_poly, p).coeffs)
    x = [0, 1]
    xp = _ppowmod(x, p, f, p)
    frob = [x, xp]  # x^(p^j) mod f
    rest = list(f)
    places = fixed = 0
    i = 1
    while len(rest) > 1:
        while len(frob) <= i:
            frob.append(_pcompose_mod(frob[-1], xp, f, p))
        if len(rest) - 1 < 2 * i:
            gi, i = rest, len(rest) - 1
            while len(frob) <= i:
                frob.append(_pcompose_mod(frob[-1], xp, f, p))
        else:
            gi = _pgcd(rest, _psub(frob[i], x, p), p)
        if len(gi) > 1:
            places += (len(gi) - 1) // i
            for j in range(i):
                h = _pgcd(gi, _psub(cbar, frob[j], p), p)
                fixed += (len(h) - 1) // i
            rest = _pdivmod(rest, gi, p)[0]
        i += 1
    return places, fixed


def classify_prime(field: CMField, p: int, seed: int = DEFAULT_SEED) -> PrimeClass:
    cache = _class_cache.setdefault(field, {})
    hit = cache.get(p)
    if hit is not None:
        return hit
    out: PrimeClass
    if p in field.bad_primes or any(c.denominator % p == 0 for c in field.spec.conj_theta):
        out = Bad()
    else:
        shape = unramified_shape(field, p)
        if shape is None:
            try:
                out = classify_splitting(splitting_type(field, p, seed))
            except (errors.BadPrime, errors.DenominatorCollision):
                out = Bad()
        else:
            places, fixed = shape
            out = SomeFixed((places - fixed) // 2) if fixed else NoneFixed(places // 2)
    cache[p] = out
    return out


# CMField hashes by identity, so the memo dies with the field.
_class_cache: "weakref.WeakKeyDictionary[CMField, dict]" = weakref.WeakKeyDictionary()


def class_label(cls: PrimeClass) -> tuple[str, str]:
    """(class name, r or r') as CSV-ready strings."""
    if isinstance(cls, NoneFixed):
        return "NoneFixed", str(cls.r)
    if isinstance(cls, SomeFixed):
        return "SomeFixed", str(cls.r_prime)
    if isinstance(cls, Ramified):
        return "Ramified", str(len(cls.splitting.swapped_pairs))
    return "Bad", ""
