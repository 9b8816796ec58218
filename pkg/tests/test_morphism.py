import random

import pytest

from nilcsp.errors import KernelNotInvariant, NotBijectiveOnAbelianization, RelationViolated
from nilcsp.fixtures import f32, heis, named
from nilcsp.morphism import (CHARACTERISTIC_VERBAL, FiniteQuotient, ab_matrix, ad, as_automorphism,
                             automorphism_from_json, extend_from_top, hom_from_images, identity_aut,
                             induced_on_quotient, is_inner_finite)
from nilcsp.oracle import aut_brute, aut_from_images, enumerate_group
from nilcsp.pcgroup import power_subgroup, subgroup

from helpers import FIXTURES, random_automorphism, random_element


def test_identity_hom():
    p = heis()
    h = hom_from_images(p, p, {"x": [("x", 1)], "y": [("y", 1)], "z": [("z", 1)]})
    assert all(h(g) == g for g in p.gens())


def test_swap_is_valid():
    p = heis()
    h = hom_from_images(p, p, {"x": [("y", 1)], "y": [("x", 1)], "z": [("z", -1)]})
    assert h(p.gen("z")) == p.gen("z") ** -1


def test_bad_image_violates_relation():
    p = heis()
    with pytest.raises(RelationViolated):
        hom_from_images(p, p, {"x": [("x", 1)], "y": [("y", 1)], "z": [("z", 2)]})


def test_omitted_deep_generator_is_derived():
    p = heis()
    h = hom_from_images(p, p, {"x": [("y", 1)], "y": [("x", 1)]})
    assert h(p.gen("z")) == p.gen("z") ** -1


def test_extend_from_top_matches_explicit_images():
    p = named("F23")
    a = random_automorphism(p, random.Random(1))
    top = {k: a(p.gen(k)) for k in p.top_gens()}
    assert extend_from_top(p, p, top) == list(a.images)


def test_central_shear_inverse():
    p = heis()
    a = as_automorphism(hom_from_images(p, p, {"x": [("x", 1), ("z", 1)]}))
    assert a.inverse(p.gen("x")) == p.collect([("x", 1), ("z", -1)])


def test_non_unimodular_rejected():
    p = heis()
    with pytest.raises(NotBijectiveOnAbelianization):
        as_automorphism(hom_from_images(p, p, {"x": [("x", 2)], "z": [("z", 2)]}))


def test_f32_central_correction():
    p = f32()
    a = as_automorphism(hom_from_images(p, p, {"x1": [("x1", 1), ("c23", 1)]}))
    assert a.inverse(p.gen("x1")) == p.collect([("x1", 1), ("c23", -1)])


def test_ad_examples():
    p = heis()
    x, y, z = p.gens()
    a = ad(p, ~y)
    assert a(x) == x * z and a(y) == y and a(z) == z
    assert ad(p, p.identity()).is_identity()
    assert ad(p, z ** 3).is_identity()


def test_automorphism_json_roundtrip():
    p = named("F23")
    a = random_automorphism(p, random.Random(7))
    b = automorphism_from_json(p, a.to_json())
    assert b == a and b.inverse == a.inverse
    with pytest.raises(RelationViolated):
        automorphism_from_json(p, {"images": a.to_json()["images"],
                                   "inverse_images": a.to_json()["images"] if not a.is_identity() else {}})


@pytest.mark.parametrize("name", FIXTURES)
def test_hom_is_multiplicative(name):
    p = named(name)
    rng = random.Random(name)
    a = random_automorphism(p, rng)
    for _ in range(50):
        u, v = random_element(p, rng), random_element(p, rng)
        assert a(u * v) == a(u) * a(v)


@pytest.mark.parametrize("name", FIXTURES)
def test_inverse_roundtrip(name):
    p = named(name)
    rng = random.Random(f"inv-{name}")
    a = random_automorphism(p, rng)
    for _ in range(100):
        g = random_element(p, rng)
        assert a.inverse(a(g)) == g and a(a.inverse(g)) == g


@pytest.mark.parametrize("name", FIXTURES)
def test_ad_is_a_homomorphism(name):
    p = named(name)
    rng = random.Random(f"ad-{name}")
    for _ in range(20):
        x, y = random_element(p, rng), random_element(p, rng)
        assert ad(p, x * y) == ad(p, x) * ad(p, y)


def test_induced_examples():
    p = heis()
    x, y, z = p.gens()
    mod2 = FiniteQuotient(p, power_subgroup(p, 2), CHARACTERISTIC_VERBAL)
    assert induced_on_quotient(identity_aut(p), mod2).is_identity()
    swap = as_automorphism(hom_from_images(p, p, {"x": [("y", 1)], "y": [("x", 1)]}))
    q = mod2.target
    induced = induced_on_quotient(swap, mod2)
    assert induced(mod2(x)) == mod2(y) and induced(mod2(y)) == mod2(x)
    assert q.order() == 4


def test_induced_on_abelian_quotient_is_identity():
    p = heis()
    shear = as_automorphism(hom_from_images(p, p, {"x": [("x", 1), ("z", 1)]}))
    f = FiniteQuotient(p, subgroup(p, [p.gen("z"), p.gen("x") ** 3, p.gen("y") ** 3]))
    assert induced_on_quotient(shear, f).is_identity()


def test_kernel_not_invariant():
    p = heis()
    x, y, z = p.gens()
    swap = as_automorphism(hom_from_images(p, p, {"x": [("y", 1)], "y": [("x", 1)]}))
    f = FiniteQuotient(p, subgroup(p, [x ** 2, y ** 4, z]))
    with pytest.raises(KernelNotInvariant):
        induced_on_quotient(swap, f)


@pytest.mark.parametrize("name", FIXTURES)
def test_induced_commutes_with_projection(name):
    p = named(name)
    rng = random.Random(f"ind-{name}")
    f = FiniteQuotient(p, power_subgroup(p, 2), CHARACTERISTIC_VERBAL)
    a = random_automorphism(p, rng)
    b = induced_on_quotient(a, f)
    for _ in range(20):
        g = random_element(p, rng)
        assert b(f(g)) == f(a(g))


def test_is_inner_finite_examples():
    p = named("HEIS3")
    x = p.gen("x")
    w = is_inner_finite(ad(p, x))
    assert w is not None and ad(p, w) == ad(p, x)
    swap = as_automorphism(hom_from_images(p, p, {"x": [("y", 1)], "y": [("x", 1)]}))
    assert is_inner_finite(swap) is None
    assert is_inner_finite(identity_aut(p)).is_identity()


@pytest.mark.parametrize("name", ("HEIS2", "HEIS3"))
def test_innerness_agrees_with_oracle(name):
    p = named(name)
    t = enumerate_group(p)
    data = aut_brute(t)
    rng = random.Random(name)
    for _ in range(15):
        a = random_automorphism(p, rng)
        perm = aut_from_images(t, [a(g).exps for g in p.gens()])
        assert perm is not None
        assert (perm in data.inner) == (is_inner_finite(a) is not None)


def test_ab_matrix_of_transvection():
    p = heis()
    a = as_automorphism(hom_from_images(p, p, {"y": [("x", 1), ("y", 1)]}))
    assert ab_matrix(a.forward) == [[1, 0], [1, 1]]
