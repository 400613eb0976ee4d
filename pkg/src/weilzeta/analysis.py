"""Frobenius traces, Chebotarev estimates of rho_K, and series-level identities."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import errors
from .cmfield import CMField, FieldSpec, load_field, preset_field
from .dirichlet import (
    DirichletCoeffs,
    dedekind_coeffs,
    quadratic_L_coeffs,
    series_convolve,
    series_dilate,
    series_invert,
    series_restrict_coprime,
    z_coeffs,
    zeta_ones,
)
from .exactmath import prime_divisors, primes_up_to
from .splitting import NoneFixed, Ramified, SomeFixed, classify_prime, unramified_shape
from .weilenum import CountTable, height_class_counts, norm_histogram, support_primes


@dataclass(frozen=True)
class RhoEstimate:
    prime_bound: int
    sample_size: int
    mean: Fraction
    rounded: int
    max_dev_window: Fraction

    @property
    def deviation(self) -> Fraction:
        return abs(self.mean - self.rounded)


@dataclass
class VerificationReport:
    name: str
    checked_range: str
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.passed else f"FAIL ({len(self.failures)} mismatches)"
        lines = [f"{self.name} [{self.checked_range}]: {status}"]
        for idx, want, got in self.failures[:10]:
            lines.append(f"  n={idx}: expected {want}, got {got}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Frobenius trace and rho_K
# ---------------------------------------------------------------------------

def theta_frob(field: CMField, p: int) -> int:
    """Trace of Frob_p on the permutation representation on CM types."""
    cls = classify_prime(field, p)
    if isinstance(cls, NoneFixed):
        return 2**cls.r
    if isinstance(cls, SomeFixed):
        return 0
    kind = "ramified" if isinstance(cls, Ramified) else "bad"
    raise errors.BadPrime(f"theta is only defined at good unramified primes; {p} is {kind}")


def good_unramified_primes(field: CMField, bound: int) -> list[int]:
    return [
        p for p in primes_up_to(bound)
        if isinstance(classify_prime(field, p), (NoneFixed, SomeFixed))
    ]


def _round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def rho_estimate(field: CMField, prime_bound: int) -> RhoEstimate:
    if prime_bound < 1000:
        raise ValueError("prime_bound must be at least 1000")
    thetas = [theta_frob(field, p) for p in good_unramified_primes(field, prime_bound)]
    total = sum(thetas)
    mean = Fraction(total, len(thetas))
    rounded = _round_half_up(mean)
    running = np.cumsum(thetas)
    start = max(1, int(len(thetas) * 0.8))
    dev = max(abs(Fraction(int(running[i - 1]), i) - rounded) for i in range(start, len(thetas) + 1))
    return RhoEstimate(prime_bound, len(thetas), mean, rounded, dev)


def theta_density(field: CMField, prime_bound: int, value: int) -> Fraction:
    ps = good_unramified_primes(field, prime_bound)
    return Fraction(sum(theta_frob(field, p) == value for p in ps), len(ps))


# ---------------------------------------------------------------------------
# Verifications
# ---------------------------------------------------------------------------

def _compare(name: str, rng: str, want: Sequence, got: Sequence, indices: Iterable[int]) -> VerificationReport:
    rep = VerificationReport(name, rng)
    for n in indices:
        if want[n] != got[n]:
            rep.failures.append((n, want[n], got[n]))
    return rep


def verify_prime_coefficient(field: CMField, prime_bound: int) -> VerificationReport:
    """b_K(p) = theta(F_p) at every good unramified prime p <= bound."""
    rng = f"good primes p <= {prime_bound}"
    ps = good_unramified_primes(field, prime_bound) if prime_bound >= 2 else []
    if not ps:
        return VerificationReport(f"prime-coeff {field.name}", rng)
    b = z_coeffs(field, prime_bound, omit=field.bad_primes)
    want = {p: theta_frob(field, p) for p in ps}
    got = {p: int(b[p]) for p in ps}
    return _compare(f"prime-coeff {field.name}", rng, want, got, ps)


def verify_weil_ideal_bridge(field: CMField, N: int, meta: Optional[dict] = None) -> VerificationReport:
    """a_K(n) = w_K b_K(n) for 1 <= n <= N (fields with trivial C^w_K only)."""
    if not (meta or {}).get("trivial_class_obstruction"):
        raise errors.NotCertifiedTrivialClassGroup(
            f"{field.name} is not flagged as having trivial C^w_K"
        )
    if any(p <= N for p in field.bad_primes):
        raise errors.BadPrimeFactor(f"{field.name} has bad primes below {N}")
    a = norm_histogram(field, N)
    b = z_coeffs(field, N)
    want = {n: field.w_K * int(b[n]) for n in range(1, N + 1)}
    got = {n: int(a[n]) for n in range(1, N + 1)}
    return _compare(f"bridge {field.name}", f"1 <= n <= {N}", want, got, range(1, N + 1))


ReflexRef = Union[FieldSpec, CMField, int]


def _quartic_case_from_splitting(field: CMField, bound: int = 2000) -> str:
    """Galois case of a quartic CM field read off from unramified splitting shapes."""
    counts = set()
    for p in primes_up_to(bound):
        if isinstance(classify_prime(field, p), (NoneFixed, SomeFixed)):
            counts.add(unramified_shape(field, p)[0])
    if 3 in counts:
        return "D4"
    if 1 in counts:
        return "C4"
    return "Klein"


def _reflex_series(ref: ReflexRef, N: int, omit: set) -> DirichletCoeffs:
    if isinstance(ref, int):
        # zeta of Q(sqrt D) = zeta(s) L(eps_D, s)
        return series_convolve(
            series_restrict_coprime(zeta_ones(N), omit),
            series_restrict_coprime(quadratic_L_coeffs(ref, N), omit),
        )
    fld = ref if isinstance(ref, CMField) else load_field(ref)
    return dedekind_coeffs(fld.spec.minpoly, fld.bad_primes, N, omit=omit)


def _reflex_primes(ref: ReflexRef) -> set:
    if isinstance(ref, int):
        return set(prime_divisors(ref))
    fld = ref if isinstance(ref, CMField) else load_field(ref)
    return set(fld.bad_primes | fld.ramified_primes)


def verify_g2_identity(field: CMField, case: str, reflex: Sequence[ReflexRef], N: int,
                       twist_disc: Optional[int] = None) -> VerificationReport:
    """Coefficientwise check of the three quartic factorizations of Z^nr(K, s).

    C4:    Z = zeta_{K^}(s) / L(eps_{K0}, 2s)
    Klein: Z = zeta_{K^1}(s) zeta_{K^2}(s) / zeta(2s)
    D4:    Z = zeta_{K^}(s) / L(eps_{K^0}, 2s)
    all with the Euler factors at bad and ramified primes removed.
    """
    if field.g != 2:
        raise errors.CaseMismatch(f"quartic identities need g = 2, {field.name} has g = {field.g}")
    case = {"c4": "C4", "klein": "Klein", "v4": "Klein", "d4": "D4"}.get(case.lower(), case)
    needs = {"C4": (1, True), "Klein": (2, False), "D4": (1, True)}
    if case not in needs:
        raise errors.CaseMismatch(f"unknown case {case!r}")
    k, twisted = needs[case]
    if len(reflex) != k or twisted != (twist_disc is not None):
        raise errors.CaseMismatch(
            f"case {case} needs {k} reflex field(s)" + (" and a twist discriminant" if twisted else "")
        )
    seen = _quartic_case_from_splitting(field)
    if seen != case:
        raise errors.CaseMismatch(f"{field.name} splits like a {seen} field, not {case}")

    S = set(support_primes(field))
    for ref in reflex:
        S |= _reflex_primes(ref)
    if twist_disc is not None:
        S |= set(prime_divisors(twist_disc))

    lhs = series_restrict_coprime(z_coeffs(field, N, omit=S), S)
    factors = [_reflex_series(ref, N, S) for ref in reflex]
    rhs = factors[0]
    for extra in factors[1:]:
        rhs = series_convolve(rhs, extra)
    if twist_disc is not None:
        denom = series_dilate(series_restrict_coprime(quadratic_L_coeffs(twist_disc, N), S), 2)
    else:
        denom = series_dilate(series_restrict_coprime(zeta_ones(N), S), 2)
    rhs = series_restrict_coprime(series_convolve(rhs, series_invert(denom)), S)
    rng = f"n <= {N} coprime to {sorted(S)}"
    idx = range(1, N + 1)
    want = {n: rhs[n] for n in idx}
    got = {n: lhs[n] for n in idx}
    return _compare(f"g2-{case} {field.name}", rng, want, got, idx)


def verify_height_zeta(field: CMField, N: int, source: str = "ideals") -> VerificationReport:
    """Point counts of bounded height against (1/2) Z~_0(K, s) / zeta(2s).

    ``source="ideals"`` takes Z~_0 = w_K Z(K, s), which is exact only when
    C^w_K is trivial; ``source="weil"`` takes the coefficients a_K(n) from
    lattice enumeration and holds for every field.
    """
    S = set(support_primes(field))
    counts = height_class_counts(field, N)
    if source == "ideals":
        z = z_coeffs(field, N, omit=S).scale(field.w_K)
    elif source == "weil":
        hist = norm_histogram(field, N)
        z = DirichletCoeffs(N, tuple(int(v) for v in hist[1:]))
    else:
        raise ValueError(f"unknown source {source!r}")
    series = series_convolve(z, series_invert(series_dilate(zeta_ones(N), 2))).scale(Fraction(1, 2))
    series = series_restrict_coprime(series, S)
    idx = [n for n in range(1, N + 1) if all(n % p for p in S)]
    want = {n: series[n] for n in idx}
    got = {n: int(counts[n]) for n in idx}
    return _compare(f"height-zeta[{source}] {field.name}", f"n <= {N} coprime to {sorted(S)}",
                    want, got, idx)


# ---------------------------------------------------------------------------
# Asymptotics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    c_estimate: float
    stability: float


def _normalized(n: float, x: float, rho: int) -> float:
    return n / (x * math.log(x) ** (rho - 1))


def fit_asymptotic(table: CountTable, rho: int) -> FitResult:
    """Leading constant of N(x) ~ c x (log x)^(rho - 1) read off at x_max."""
    if rho < 1:
        raise ValueError("rho must be >= 1")
    grid = table.grid
    if len(grid) < 10 or grid[0] <= 0 or grid[-1] / grid[0] < 100:
        raise errors.InsufficientRange("need at least 10 grid points spanning 2 decades")
    x_max = grid[-1]
    if not any(table.counts):
        return FitResult(0.0, 0.0)
    c = _normalized(table.counts[-1], x_max, rho)
    tail = [
        _normalized(n, x, rho) for x, n in zip(grid, table.counts) if x >= x_max / 10 and x > 1
    ]
    stability = (max(tail) - min(tail)) / c if c else 0.0
    return FitResult(c, stability)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

SUITES = ("bridge", "prime-coeff", "g2", "height-zeta", "all")


def run_suite(field: CMField, meta: dict, suite: str, N: int,
              reflex_loader=None) -> list[VerificationReport]:
    """Run a named suite.  Checks whose preconditions the field does not meet
    (no trivial-class flag, no g = 2 metadata) are skipped when running ``all``
    and raise when requested by name."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    reports = []
    wanted = SUITES[:-1] if suite == "all" else (suite,)
    for name in wanted:
        if name == "bridge":
            if suite == "all" and not meta.get("trivial_class_obstruction"):
                continue
            reports.append(verify_weil_ideal_bridge(field, N, meta))
        elif name == "prime-coeff":
            reports.append(verify_prime_coefficient(field, N))
        elif name == "g2":
            if "g2_case" not in meta:
                if suite == "all":
                    continue
                raise errors.CaseMismatch(f"{field.name} carries no g = 2 case metadata")
            loader = reflex_loader or preset_field
            refs = [r if isinstance(r, int) else loader(r) for r in meta.get("reflex", [])]
            reports.append(verify_g2_identity(field, meta["g2_case"], refs, N, meta.get("twist_disc")))
        elif name == "height-zeta":
            source = "ideals" if meta.get("trivial_class_obstruction") else "weil"
            reports.append(verify_height_zeta(field, N, source))
    return reports
