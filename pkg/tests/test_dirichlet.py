from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weilzeta import errors
from weilzeta.cmfield import load_preset, preset_field, preset_names
from weilzeta.exactmath import kronecker_symbol, primes_up_to
from weilzeta.dirichlet import (
    DirichletCoeffs,
    dedekind_coeffs,
    euler_factor_Z,
    identity_series,
    local_ideal_counts,
    pn_poly,
    qn_poly,
    quadratic_L_coeffs,
    ramified_local_count,
    series_convolve,
    series_dilate,
    series_invert,
    series_mismatches,
    series_restrict_coprime,
    z_coeffs,
    zeta_ones,
)
from weilzeta.weilenum import a_count, norm_histogram


def mobius(N):
    mu = [1] * (N + 1)
    for p in primes_up_to(N):
        for m in range(p, N + 1, p):
            mu[m] = -mu[m]
        for m in range(p * p, N + 1, p * p):
            mu[m] = 0
    return DirichletCoeffs(N, tuple(mu[1:]))


# --- P_n and Q_n ------------------------------------------------------------

def test_pn_small_cases():
    assert pn_poly(0).coeffs == (1,)
    assert pn_poly(1).coeffs == (1,)
    assert pn_poly(2).coeffs == (1, 1)
    assert pn_poly(3).coeff(1) == 4


def test_qn_small_cases():
    assert qn_poly(0).coeffs == (1,)
    assert qn_poly(1).coeffs == (1, 0, 1)
    q5 = qn_poly(5)
    assert all(q5.coeff(k) == 0 for k in range(1, q5.degree + 1, 2))


@pytest.mark.parametrize("n", range(0, 13))
def test_pn_is_the_numerator_of_the_power_series(n):
    # sum (k+1)^n t^k = P_n(t) / (1-t)^(n+1): multiply back and compare a long prefix
    K = 3 * n + 5
    num = pn_poly(n)
    series = [sum(num.coeff(j) * comb(k - j + n, n) for j in range(k + 1)) for k in range(K)]
    assert series == [(k + 1) ** n for k in range(K)]


@pytest.mark.parametrize("n", range(0, 13))
def test_qn_is_the_numerator_of_the_even_series(n):
    K = 3 * n + 5
    num = qn_poly(n)
    series = [sum(num.coeff(2 * j) * comb(l - j + n, n) for j in range(l + 1)) for l in range(K)]
    assert series == [(2 * l + 1) ** n for l in range(K)]


def test_pq_index_bounds():
    with pytest.raises(ValueError):
        pn_poly(-1)
    with pytest.raises(ValueError):
        qn_poly(65)


# --- local factors ----------------------------------------------------------

def test_lattice_counts_at_small_prime_powers():
    f = preset_field("zeta5")
    for q in (2, 4, 11, 16, 25, 31, 121):
        assert a_count(f, q) == f.w_K * z_coeffs(f, q)[q]


def test_gauss_euler_factors():
    g = preset_field("gauss")
    e5 = euler_factor_Z(g, 5)
    assert (e5.numerator, e5.denominator) == ((1,), (1, -2, 1))
    e3 = euler_factor_Z(g, 3)
    assert (e3.numerator, e3.denominator) == ((1,), (1, 0, -1))
    e2 = euler_factor_Z(g, 2)
    assert (e2.numerator, e2.denominator) == ((1,), (1, -1))
    assert e2.series(10) == [1] * 11


def test_bad_prime_has_no_euler_factor():
    with pytest.raises(errors.BadPrimeFactor):
        euler_factor_Z(preset_field("quartic_d4_reflex"), 7)


def test_ramified_counts_by_hand():
    # one fixed place with e = 2: 2a = 2k always solvable, exactly one way
    assert [ramified_local_count([], [2], k) for k in range(5)] == [1, 1, 1, 1, 1]
    # one swapped pair with e = 2: a + b = 2k
    assert [ramified_local_count([2], [], k) for k in range(4)] == [1, 3, 5, 7]
    # one fixed place with e = 1: only even k
    assert [ramified_local_count([], [1], k) for k in range(5)] == [1, 0, 1, 0, 1]


TRIVIAL = [n for n in preset_names() if load_preset(n).meta.get("trivial_class_obstruction")]


@pytest.mark.parametrize("name", TRIVIAL)
def test_local_factors_match_combinatorics_and_lattice(name):
    f = preset_field(name)
    hist = norm_histogram(f, 10_000)
    for p in primes_up_to(10_000):
        if p in f.bad_primes:
            continue
        k_max = 0
        while p ** (k_max + 1) <= 10_000:
            k_max += 1
        series = euler_factor_Z(f, p).series(k_max)
        assert series == local_ideal_counts(f, p, k_max)
        for k in range(1, k_max + 1):
            assert int(hist[p**k]) == f.w_K * series[k], (p, k)


# --- global series ----------------------------------------------------------

def test_gauss_ideal_counts():
    b = z_coeffs(preset_field("gauss"), 50)
    assert [b[n] for n in range(1, 6)] == [1, 1, 0, 1, 2]
    assert b[9] == 1
    assert b[45] == b[9] * b[5] == 2
    # ideal counts of Z[i] with a conj(a) = n are r_2(n)/4 = sum of chi_-4 over divisors
    for n in range(1, 51):
        assert b[n] == sum(kronecker_symbol(-4, d) for d in range(1, n + 1) if n % d == 0)


def test_zeta5_prime_values():
    b = z_coeffs(preset_field("zeta5"), 100)
    assert b[11] == 4 and b[2] == 0 and b[4] == 1 and b[19] == 0


def test_omit_sets_local_factor_to_one():
    b = z_coeffs(preset_field("gauss"), 40, omit={2, 5})
    assert b[2] == b[4] == b[5] == b[10] == 0
    assert b[13] == 2


def test_dedekind_coefficients():
    qi = dedekind_coeffs([1, 0, 1], set(), 10)
    assert [qi[n] for n in range(1, 11)] == [1, 1, 0, 1, 2, 0, 0, 1, 1, 2]
    assert dedekind_coeffs([-1, 1], set(), 30) == zeta_ones(30)
    assert dedekind_coeffs([1, 1, 1, 1, 1], set(), 11)[11] == 4
    with pytest.raises(errors.BadPrimeFactor):
        dedekind_coeffs([7, 0, 1], {2}, 10)


def test_dedekind_zeta_of_quadratic_field_factors():
    N = 300
    for D in (-4, -3, 5, 8, -7, 13):
        poly = [(-D) // 4, 0, 1] if D % 4 == 0 else [(1 - D) // 4, -1, 1]
        lhs = dedekind_coeffs(poly, set(), N)
        rhs = series_convolve(zeta_ones(N), quadratic_L_coeffs(D, N))
        assert series_mismatches(lhs, rhs) == []


def test_quadratic_characters():
    L5 = quadratic_L_coeffs(5, 20)
    assert (L5[2], L5[3], L5[4], L5[5], L5[10]) == (-1, -1, 1, 0, 0)
    assert quadratic_L_coeffs(-4, 20)[13] == 1
    with pytest.raises(errors.NotFundamentalDiscriminant):
        quadratic_L_coeffs(12 * 4, 10)
    with pytest.raises(errors.NotFundamentalDiscriminant):
        quadratic_L_coeffs(-1, 10)


# --- series operations ------------------------------------------------------

def test_series_examples():
    N = 60
    assert series_convolve(zeta_ones(N), mobius(N)) == identity_series(N)
    sq = series_dilate(zeta_ones(N), 2)
    assert [n for n in range(1, N + 1) if sq[n]] == [k * k for k in range(1, 8)]
    r = series_restrict_coprime(dedekind_coeffs([1, 0, 1], set(), N), {2})
    assert all(r[n] == 0 for n in range(2, N + 1, 2))
    assert series_invert(zeta_ones(N)) == mobius(N)


def test_series_errors():
    with pytest.raises(errors.TruncationMismatch):
        series_convolve(zeta_ones(5), zeta_ones(6))
    with pytest.raises(errors.NonUnitLeadingCoefficient):
        series_invert(DirichletCoeffs(3, (0, 1, 1)))


def test_inverse_can_be_rational():
    a = DirichletCoeffs(6, (2, 1, 0, 0, 0, 0))
    inv = series_invert(a)
    assert inv[1] == Fraction(1, 2) and inv[2] == Fraction(-1, 4)
    assert series_convolve(a, inv) == identity_series(6)


series_strategy = st.integers(1, 30).flatmap(
    lambda N: st.tuples(*[st.lists(st.integers(-5, 5), min_size=N, max_size=N)] * 3)
)


@settings(max_examples=60, deadline=None)
@given(series_strategy)
def test_convolution_laws(triple):
    a, b, c = (DirichletCoeffs(len(x), tuple(x)) for x in triple)
    assert series_convolve(a, b) == series_convolve(b, a)
    assert series_convolve(series_convolve(a, b), c) == series_convolve(a, series_convolve(b, c))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=6), min_size=1, max_size=40)
       .filter(lambda xs: xs[0] != 0))
def test_inverse_is_an_involution(xs):
    a = DirichletCoeffs(len(xs), tuple(xs))
    assert series_invert(series_invert(a)) == a
