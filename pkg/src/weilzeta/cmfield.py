"""Concrete CM fields: validation and precomputed tables.

A field is given by a primitive element ``theta`` (through its minimal
polynomial), a Q-basis ``omega_1..omega_2g`` written in the power basis of
``theta``, and the image of ``theta`` under complex conjugation.  The basis
must satisfy ``omega_1 = 1`` and ``omega_1..omega_g`` must span the real
subfield; when it is a Z-basis of the ring of integers all derived quadratic
forms have integer coefficients.
"""
from __future__ import annotations

import dataclasses
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import combinations, product
from pathlib import Path
from typing import Optional, Sequence

import mpmath
import numpy as np

from . import errors
from .exactmath import (
    DEFAULT_SEED,
    RatPoly,
    as_fraction,
    integer_sqrt_exact,
    poly_discriminant,
    prime_divisors,
    ratpoly_gcd,
)

NUMERIC_TOL = 1e-9
DEFAULT_PRECISION_BITS = 96


# ---------------------------------------------------------------------------
# Field specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    name: str
    g: int
    minpoly: tuple  # ascending integer coefficients, monic, degree 2g
    basis: tuple  # 2g rows of 2g Fractions, row i = omega_i in the power basis
    conj_theta: tuple  # c(theta) in the power basis
    field_disc: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "minpoly", tuple(int(c) for c in self.minpoly))
        object.__setattr__(
            self, "basis", tuple(tuple(as_fraction(a) for a in row) for row in self.basis)
        )
        object.__setattr__(self, "conj_theta", tuple(as_fraction(a) for a in self.conj_theta))
        if self.field_disc is not None:
            object.__setattr__(self, "field_disc", int(self.field_disc))

    @classmethod
    def from_dict(cls, d: dict) -> "FieldSpec":
        try:
            return cls(
                name=d["name"],
                g=int(d["g"]),
                minpoly=d["minpoly"],
                basis=d["basis"],
                conj_theta=d["conj_theta"],
                field_disc=d.get("field_disc"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise errors.FieldSpecError(f"malformed field spec: {exc}") from exc

    def to_dict(self) -> dict:
        def rat(x: Fraction):
            return [str(x.numerator), str(x.denominator)]

        d = {
            "name": self.name,
            "g": self.g,
            "minpoly": list(self.minpoly),
            "basis": [[rat(a) for a in row] for row in self.basis],
            "conj_theta": [rat(a) for a in self.conj_theta],
        }
        if self.field_disc is not None:
            d["field_disc"] = self.field_disc
        return d


@dataclass(frozen=True)
class Preset:
    spec: FieldSpec
    meta: dict


def _presets_dir():
    return resources.files("weilzeta") / "presets"


def preset_names() -> list[str]:
    return sorted(
        p.name[: -len(".json")] for p in _presets_dir().iterdir() if p.name.endswith(".json")
    )


def read_spec_file(path) -> Preset:
    """Read a JSON field spec (optionally with a ``meta`` block)."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return Preset(FieldSpec.from_dict(data), data.get("meta", {}))


def load_preset(name: str) -> Preset:
    if name.startswith("quad-"):
        d = int(name[len("quad-") :])
        return Preset(quadratic_field_spec(d), {})
    path = _presets_dir() / f"{name}.json"
    if not path.is_file():
        raise errors.FieldSpecError(f"unknown preset {name!r}; known: {preset_names()}")
    with path.open(encoding="utf-8") as fh:
        data = json.load(fh)
    return Preset(FieldSpec.from_dict(data), data.get("meta", {}))


def resolve_spec(ref: str) -> Preset:
    """Accept a path to a JSON spec or a preset name."""
    if Path(ref).is_file():
        return read_spec_file(ref)
    return load_preset(ref)


def quadratic_field_spec(d: int) -> FieldSpec:
    """Spec for Q(sqrt(-d)), d > 0 squarefree, with its integral basis."""
    from .exactmath import is_squarefree

    if d <= 0 or not is_squarefree(d):
        raise errors.FieldSpecError(f"quad-d needs a positive squarefree d, got {d}")
    if (-d) % 4 == 1:
        # theta = (1 + sqrt(-d)) / 2
        return FieldSpec(
            name=f"quad-{d}",
            g=1,
            minpoly=((1 + d) // 4, -1, 1),
            basis=((1, 0), (0, 1)),
            conj_theta=(1, -1),
            field_disc=-d,
        )
    return FieldSpec(
        name=f"quad-{d}",
        g=1,
        minpoly=(d, 0, 1),
        basis=((1, 0), (0, 1)),
        conj_theta=(0, -1),
        field_disc=-4 * d,
    )


# ---------------------------------------------------------------------------
# Quadratic forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadForm:
    """Quadratic form sum_{j<=k} c[j,k] x_j x_k with rational coefficients."""

    dim: int
    coeffs: tuple  # ((j, k, Fraction), ...) with j <= k and c != 0

    def __call__(self, x: Sequence) -> Fraction:
        return sum((c * x[j] * x[k] for j, k, c in self.coeffs), Fraction(0))

    def coefficient(self, j: int, k: int) -> Fraction:
        if j > k:
            j, k = k, j
        for a, b, c in self.coeffs:
            if (a, b) == (j, k):
                return c
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, _, c in self.coeffs)

    def scaled_upper(self) -> tuple[np.ndarray, int]:
        """Integer upper-triangular matrix ``U`` and denominator ``D`` with
        ``D * Q(x) = x @ U @ x``."""
        den = math.lcm(*(c.denominator for _, _, c in self.coeffs)) if self.coeffs else 1
        u = np.zeros((self.dim, self.dim), dtype=np.int64)
        for j, k, c in self.coeffs:
            u[j, k] = int(c * den)
        return u, den

    def symmetric_matrix(self) -> list[list[Fraction]]:
        m = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for j, k, c in self.coeffs:
            if j == k:
                m[j][j] += c
            else:
                m[j][k] += c / 2
                m[k][j] += c / 2
        return m

    def __str__(self):
        out = ""
        for j, k, c in self.coeffs:
            mono = f"x{j + 1}^2" if j == k else f"x{j + 1}*x{k + 1}"
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            term = mono if mag == 1 else f"{mag}*{mono}"
            out += (f"-{term}" if sign == "-" else term) if not out else f" {sign} {term}"
        return out or "0"


# ---------------------------------------------------------------------------
# Exact linear algebra helpers
# ---------------------------------------------------------------------------

def _mat_inverse(m: list[list[Fraction]]) -> Optional[list[list[Fraction]]]:
    n = len(m)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def leading_minors(m: list[list[Fraction]]) -> list[Fraction]:
    """Leading principal minors by exact Gaussian elimination."""
    n = len(m)
    a = [list(row) for row in m]
    minors = []
    det = Fraction(1)
    for k in range(n):
        if a[k][k] == 0:
            # a zero pivot means the k-th leading minor vanishes
            minors.append(Fraction(0))
            minors.extend([Fraction(0)] * (n - k - 1))
            return minors
        det *= a[k][k]
        minors.append(det)
        for r in range(k + 1, n):
            f = a[r][k] / a[k][k]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[k])]
    return minors


def int_det(m: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (Bareiss)."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


# ---------------------------------------------------------------------------
# CM fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CMField:
    spec: FieldSpec
    minpoly: RatPoly
    conj_poly: RatPoly
    omega: tuple  # RatPoly per basis element
    basis_inv: tuple  # inverse of the basis matrix
    mult_table: tuple  # mult_table[i][j] = coordinates of omega_i * omega_j
    conj_matrix: tuple  # conj_matrix[i] = coordinates of c(omega_i)
    quadrics: tuple  # Q_1..Q_g
    gram: tuple  # Tr(omega_i * c(omega_j))
    embeddings: tuple  # ((phi(theta), conj phi(theta)), ...) as mpmath.mpc
    disc_minpoly: int
    bad_primes: frozenset
    ramified_primes: frozenset
    w_K: int = 0

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def g(self) -> int:
        return self.spec.g

    @property
    def degree(self) -> int:
        return 2 * self.spec.g

    # element arithmetic in omega-coordinates -----------------------------
    def to_poly(self, coords: Sequence) -> RatPoly:
        acc = RatPoly()
        for c, w in zip(coords, self.omega):
            if c:
                acc = acc + w * c
        return acc

    def from_poly(self, f: RatPoly) -> tuple:
        f = f % self.minpoly
        n = self.degree
        v = [f.coeff(k) for k in range(n)]
        # coords @ B = v  =>  coords = v @ B^{-1}
        return tuple(sum(v[k] * self.basis_inv[k][i] for k in range(n)) for i in range(n))

    def mul(self, a: Sequence, b: Sequence) -> tuple:
        n = self.degree
        out = [Fraction(0)] * n
        for i in range(n):
            if a[i]:
                for j in range(n):
                    if b[j]:
                        s = a[i] * b[j]
                        for k, t in enumerate(self.mult_table[i][j]):
                            if t:
                                out[k] += s * t
        return tuple(out)

    def conj(self, a: Sequence) -> tuple:
        n = self.degree
        out = [Fraction(0)] * n
        for i in range(n):
            if a[i]:
                for k, t in enumerate(self.conj_matrix[i]):
                    if t:
                        out[k] += a[i] * t
        return tuple(out)

    def trace(self, a: Sequence) -> Fraction:
        return sum(
            (a[i] * self.mult_table[i][j][j] for i in range(self.degree) for j in range(self.degree)),
            Fraction(0),
        )

    def embed(self, coords: Sequence) -> list:
        """Values phi(alpha) for every embedding (both members of each pair)."""
        f = self.to_poly(coords)
        out = []
        for z, zbar in self.embeddings:
            out.append(f(z))
            out.append(f(zbar))
        return out

    def theta_coords(self) -> tuple:
        return self.from_poly(RatPoly.x())


def _validate_shape(spec: FieldSpec):
    n = 2 * spec.g
    if spec.g < 1:
        raise errors.FieldSpecError("g must be >= 1")
    if len(spec.minpoly) != n + 1 or spec.minpoly[-1] != 1:
        raise errors.FieldSpecError(f"minpoly must be monic of degree {n}")
    if len(spec.basis) != n or any(len(r) != n for r in spec.basis):
        raise errors.FieldSpecError(f"basis must be {n}x{n}")
    if len(spec.conj_theta) > n:
        raise errors.FieldSpecError(f"conj_theta must have degree < {n}")
    if tuple(spec.basis[0]) != tuple([Fraction(1)] + [Fraction(0)] * (n - 1)):
        raise errors.FieldSpecError("omega_1 must be 1")


def _compute_embeddings(minpoly: RatPoly, prec_bits: int):
    with mpmath.workprec(prec_bits):
        roots = mpmath.polyroots(
            [int(c) for c in reversed(minpoly.coeffs)], maxsteps=200, extraprec=2 * prec_bits
        )
    for z in roots:
        if abs(mpmath.im(z)) < NUMERIC_TOL:
            raise errors.NotTotallyImaginary(f"field is not totally imaginary: real embedding theta -> {mpmath.nstr(z, 12)}")
    upper = sorted((z for z in roots if mpmath.im(z) > 0), key=lambda z: (float(mpmath.re(z)), float(mpmath.im(z))))
    lower = [z for z in roots if mpmath.im(z) < 0]
    pairs = []
    for z in upper:
        zbar = min(lower, key=lambda w: abs(w - mpmath.conj(z)))
        lower.remove(zbar)
        pairs.append((z, zbar))
    return tuple(pairs)


def load_field(spec: FieldSpec, precision_bits: int = DEFAULT_PRECISION_BITS) -> CMField:
    """Validate ``spec`` and precompute every static table of the field."""
    _validate_shape(spec)
    n = 2 * spec.g
    g = spec.g
    minpoly = RatPoly(spec.minpoly)
    if ratpoly_gcd(minpoly, minpoly.derivative()).degree > 0:
        raise errors.NonSquarefreeMinpoly(f"{spec.name}: minpoly has a repeated factor")

    basis_inv = _mat_inverse([list(r) for r in spec.basis])
    if basis_inv is None:
        raise errors.BasisNotUnimodularOverQ(f"{spec.name}: basis matrix is singular")
    omega = tuple(RatPoly(row) for row in spec.basis)
    conj_poly = RatPoly(spec.conj_theta)

    def coords_of(f: RatPoly):
        f = f % minpoly
        v = [f.coeff(k) for k in range(n)]
        return tuple(sum(v[k] * basis_inv[k][i] for k in range(n)) for i in range(n))

    mult_table = tuple(tuple(coords_of(omega[i] * omega[j]) for j in range(n)) for i in range(n))
    conj_matrix = tuple(coords_of(w.compose(conj_poly)) for w in omega)

    # c o c = id on the basis
    for i in range(n):
        img = [Fraction(0)] * n
        for k in range(n):
            for l in range(n):
                img[l] += conj_matrix[i][k] * conj_matrix[k][l]
        if img != [Fraction(int(i == l)) for l in range(n)]:
            raise errors.ConjugationNotInvolution(f"{spec.name}: c^2 != id on omega_{i + 1}")

    embeddings = _compute_embeddings(minpoly, precision_bits)
    with mpmath.workprec(precision_bits):
        for z, zbar in embeddings:
            for root, other in ((z, zbar), (zbar, z)):
                for i in range(n):
                    lhs = omega[i].compose(conj_poly)(root)
                    rhs = mpmath.conj(omega[i](root))
                    if abs(lhs - rhs) > NUMERIC_TOL:
                        raise errors.ConjugationNotComplexConjugation(
                            f"{spec.name}: phi(c(omega_{i + 1})) != conj(phi(omega_{i + 1}))"
                        )
    for i in range(g):
        if conj_matrix[i] != tuple(Fraction(int(i == l)) for l in range(n)):
            raise errors.RealSubfieldViolation(f"{spec.name}: c moves omega_{i + 1}")

    disc = poly_discriminant(spec.minpoly)
    if spec.field_disc is not None:
        if spec.field_disc == 0 or disc % spec.field_disc:
            raise errors.FieldSpecError(f"{spec.name}: field_disc does not divide disc(minpoly)")
        index = integer_sqrt_exact(disc // spec.field_disc)
        if index is None:
            raise errors.FieldSpecError(f"{spec.name}: disc(minpoly)/field_disc is not a square")
        bad = set(prime_divisors(index)) if index > 1 else set()
        ramified = set(prime_divisors(spec.field_disc))
    else:
        bad = set(prime_divisors(disc))
        ramified = set(bad)
    for c in spec.conj_theta:
        if c.denominator > 1:
            bad.update(prime_divisors(c.denominator))

    proto = CMField(
        spec=spec,
        minpoly=minpoly,
        conj_poly=conj_poly,
        omega=omega,
        basis_inv=tuple(tuple(r) for r in basis_inv),
        mult_table=mult_table,
        conj_matrix=conj_matrix,
        quadrics=(),
        gram=(),
        embeddings=embeddings,
        disc_minpoly=disc,
        bad_primes=frozenset(bad),
        ramified_primes=frozenset(ramified),
    )
    quadrics = compute_quadrics(proto)
    proto = dataclasses.replace(proto, quadrics=tuple(quadrics))
    gram = trace_gram(proto)
    if any(m <= 0 for m in leading_minors([list(r) for r in gram])):
        raise errors.FieldSpecError(f"{spec.name}: trace form is not positive definite")
    proto = dataclasses.replace(proto, gram=tuple(tuple(r) for r in gram))

    from .weilenum import enumerate_weil  # deferred: weilenum depends on this module

    w_K = len(enumerate_weil(proto, 1))
    return dataclasses.replace(proto, w_K=w_K)


@lru_cache(maxsize=None)
def preset_field(name: str) -> CMField:
    return load_field(load_preset(name).spec)


def compute_quadrics(field: CMField) -> list[QuadForm]:
    """Forms Q_1..Q_g with alpha * conj(alpha) = sum_i Q_i(x) omega_i."""
    n, g = field.degree, field.g
    # coordinates of omega_j * c(omega_k)
    prod_jk = [
        [
            [
                sum(
                    (field.conj_matrix[k][l] * field.mult_table[j][l][m] for l in range(n)),
                    Fraction(0),
                )
                for m in range(n)
            ]
            for k in range(n)
        ]
        for j in range(n)
    ]
    forms = [dict() for _ in range(n)]
    for j in range(n):
        for k in range(j, n):
            for m in range(n):
                c = prod_jk[j][k][m] + (prod_jk[k][j][m] if k != j else 0)
                if c:
                    forms[m][(j, k)] = c
    for m in range(g, n):
        if forms[m]:
            raise errors.NonRealRelativeNorm(
                f"{field.name}: coordinate {m + 1} of alpha*conj(alpha) is not identically zero"
            )
    return [
        QuadForm(n, tuple((j, k, c) for (j, k), c in sorted(forms[m].items()))) for m in range(g)
    ]


def trace_gram(field: CMField) -> list[list[Fraction]]:
    """Gram matrix G[i][j] = Tr_{K/Q}(omega_i * c(omega_j))."""
    n = field.degree
    tr = [field.trace(tuple(Fraction(int(i == k)) for k in range(n))) for i in range(n)]
    gram = []
    for i in range(n):
        row = []
        for j in range(n):
            prod = field.mul(
                tuple(Fraction(int(i == k)) for k in range(n)), field.conj_matrix[j]
            )
            row.append(sum((prod[k] * tr[k] for k in range(n)), Fraction(0)))
        gram.append(row)
    return gram


def real_subfield_traces(field: CMField) -> list[Fraction]:
    """Tr_{K0/Q}(omega_i) for i = 1..g (half the absolute trace)."""
    n = field.degree
    return [field.trace(tuple(Fraction(int(i == k)) for k in range(n))) / 2 for i in range(field.g)]


def weil_membership(field: CMField, coords: Sequence[int]) -> Optional[int]:
    """Return n if alpha * conj(alpha) = n is a positive integer, else None."""
    if len(coords) != field.degree:
        raise ValueError(f"expected {field.degree} coordinates")
    if not any(coords):
        return None
    if any(q(coords) != 0 for q in field.quadrics[1:]):
        return None
    n = field.quadrics[0](coords)
    if n <= 0 or n.denominator != 1:
        return None
    return int(n)


# ---------------------------------------------------------------------------
# The fan of the toric compactification
# ---------------------------------------------------------------------------

MAX_FAN_G = 16


@dataclass(frozen=True)
class FanData:
    g: int
    rays: tuple  # sign vectors u in {-1, 1}^g
    ray_vectors: tuple  # e_u in lattice coordinates
    max_cones: tuple  # (apex, neighbour, ...) ray indices, one entry per generating tuple

    def distinct_cones(self) -> list[tuple]:
        return sorted({tuple(sorted(c)) for c in self.max_cones})


def ray_lattice_vector(u: Sequence[int]) -> tuple:
    """Coordinates of e_u in the Z-basis of N dual to (phi - conj(phi_0))_phi.

    e_u evaluated on phi - conj(phi_0) is (u_phi + u_0) / 2, which equals u_0
    for phi = phi_0.
    """
    u0 = u[0]
    return (u0,) + tuple((ui + u0) // 2 for ui in u[1:])


def build_fan(g: int, seed: int = DEFAULT_SEED, samples: int = 10_000, verify: bool = True) -> FanData:
    if not 1 <= g <= MAX_FAN_G:
        raise errors.GTooLarge(f"g must lie in [1, {MAX_FAN_G}], got {g}")
    rays = tuple(product((1, -1), repeat=g))
    index = {u: i for i, u in enumerate(rays)}
    cones = []
    for u in rays:
        neighbours = [u[:i] + (-u[i],) + u[i + 1 :] for i in range(g)]
        for chosen in combinations(neighbours, g - 1):
            cones.append((index[u],) + tuple(index[v] for v in chosen))
    fan = FanData(
        g=g,
        rays=rays,
        ray_vectors=tuple(ray_lattice_vector(u) for u in rays),
        max_cones=tuple(cones),
    )
    if verify:
        bad = [c for c in fan.max_cones if abs(cone_determinant(fan, c)) != 1]
        if bad:
            raise RuntimeError(f"fan for g={g} has non-unimodular cones: {bad[:3]}")
    return fan


def cone_determinant(fan: FanData, cone: Sequence[int]) -> int:
    return int_det([fan.ray_vectors[i] for i in cone])


def _integer_inverse(m: list[list[int]]) -> np.ndarray:
    inv = _mat_inverse([[Fraction(x) for x in row] for row in m])
    return np.array([[int(x) for x in row] for row in inv], dtype=np.int64)


def uncovered_samples(fan: FanData, samples: int = 10_000, seed: int = DEFAULT_SEED,
                      coord_bound: int = 10**6) -> np.ndarray:
    """Seeded random lattice points not contained in any maximal cone.

    Points are drawn as integer vectors (rational points scaled by a common
    denominator; cone membership is scale invariant).  Membership is exact:
    every cone matrix is unimodular, so its inverse is integral and the cone
    coordinates of a point are integers.
    """
    rng = random.Random(seed)
    pts = np.array(
        [[rng.randint(-coord_bound, coord_bound) for _ in range(fan.g)] for _ in range(samples)],
        dtype=np.int64,
    )
    covered = np.zeros(samples, dtype=bool)
    for cone in fan.distinct_cones():
        # lambda @ R = x  =>  lambda = x @ R^{-1}
        inv = _integer_inverse([list(fan.ray_vectors[i]) for i in cone])
        lam = pts @ inv
        covered |= (lam >= 0).all(axis=1)
    return pts[~covered]
