from __future__ import annotations

import pytest

from weilzeta import errors
from weilzeta.cmfield import FieldSpec, load_field, preset_field, preset_names, quadratic_field_spec
from weilzeta.exactmath import primes_up_to
from weilzeta.splitting import (
    Bad,
    NoneFixed,
    Ramified,
    SomeFixed,
    class_label,
    classify_prime,
    classify_splitting,
    splitting_type,
    unramified_shape,
)

PRIMES = primes_up_to(10_000)


def good_primes(field):
    return [p for p in PRIMES if p not in field.bad_primes]


def test_gauss_examples():
    f = preset_field("gauss")
    s5 = splitting_type(f, 5)
    assert [(pl.e, pl.f) for pl in s5.places] == [(1, 1), (1, 1)]
    assert s5.swapped_pairs == [(0, 1)] and s5.fixed == []
    s3 = splitting_type(f, 3)
    assert [(pl.e, pl.f, pl.conj_partner) for pl in s3.places] == [(1, 2, 0)]
    s2 = splitting_type(f, 2)
    assert [(pl.e, pl.f, pl.conj_partner) for pl in s2.places] == [(2, 1, 0)]
    assert s2.describe() == "2:1:1"


def test_zeta5_examples():
    f = preset_field("zeta5")
    assert classify_prime(f, 11) == NoneFixed(2)
    assert classify_prime(f, 2) == SomeFixed(0)
    assert classify_prime(f, 19) == SomeFixed(0)
    assert isinstance(classify_prime(f, 5), Ramified)
    assert class_label(classify_prime(f, 11)) == ("NoneFixed", "2")


def test_unknown_primes_are_bad():
    # without a field discriminant, 2 and 7 may divide the index
    f = preset_field("quartic_d4_reflex")
    assert classify_prime(f, 7) == Bad()
    with pytest.raises(errors.BadPrime):
        splitting_type(f, 2)


def test_other_models_of_the_eisenstein_field():
    base = quadratic_field_spec(3)
    # theta a primitive sixth root of unity, c(theta) = 1 - theta
    six = load_field(FieldSpec.from_dict(dict(base.to_dict(), minpoly=[1, -1, 1], conj_theta=[1, -1])))
    assert six.w_K == 6
    # theta = sqrt(-3): Z[theta] has index 2, so 2 is bad without a field discriminant
    root = load_field(FieldSpec.from_dict(dict(base.to_dict(), minpoly=[3, 0, 1], basis=[[1, 0], [0, 1]],
                                                conj_theta=[0, -1], field_disc=None)))
    assert root.bad_primes == {2, 3}
    for p in PRIMES[2:300]:
        assert classify_prime(six, p) == classify_prime(root, p)


@pytest.mark.parametrize("name", preset_names())
def test_degree_sum_and_partner_involution(name):
    f = preset_field(name)
    for p in good_primes(f):
        sp = splitting_type(f, p)
        assert sum(pl.e * pl.f for pl in sp.places) == f.degree
        for i, pl in enumerate(sp.places):
            other = sp.places[pl.conj_partner]
            assert other.conj_partner == i
            assert (other.e, other.f) == (pl.e, pl.f)


@pytest.mark.parametrize("name", preset_names())
def test_shape_path_agrees_with_full_factorization(name):
    f = preset_field(name)
    for p in good_primes(f):
        full = classify_splitting(splitting_type(f, p))
        shape = unramified_shape(f, p)
        if isinstance(full, Ramified):
            assert shape is None
            continue
        places, fixed = shape
        assert places == len(splitting_type(f, p).places)
        assert (fixed > 0) == isinstance(full, SomeFixed)


def test_zeta5_depends_on_residue_mod_5():
    f = preset_field("zeta5")
    for p in PRIMES:
        if p == 5:
            continue
        want = NoneFixed(2) if p % 5 == 1 else SomeFixed(0)
        assert classify_prime(f, p) == want


def test_gauss_splitting_law():
    f = preset_field("gauss")
    for p in PRIMES[1:]:
        assert classify_prime(f, p) == (NoneFixed(1) if p % 4 == 1 else SomeFixed(0))


def test_zeta12_splitting_law():
    # Frobenius is p mod 12; c = -1 fixes a place exactly when -1 is a power of p mod 12
    f = preset_field("zeta12")
    for p in PRIMES[2:]:
        want = {1: NoneFixed(2), 5: NoneFixed(1), 7: NoneFixed(1), 11: SomeFixed(0)}[p % 12]
        assert classify_prime(f, p) == want


def test_theta_zero_iff_some_place_fixed():
    for name in ("zeta8", "quartic_c4_16", "quartic_d4"):
        f = preset_field(name)
        for p in good_primes(f)[:400]:
            cls = classify_prime(f, p)
            if isinstance(cls, (NoneFixed, SomeFixed)):
                sp = splitting_type(f, p)
                assert isinstance(cls, SomeFixed) == bool(sp.fixed)
