import random

import pytest

from nilcsp.errors import LevelOutOfRange, NotInFiltrationLevel
from nilcsp.fixtures import f32, free_abelian, heis, named
from nilcsp.johnson import (acts_trivially_mod, d_module, delta_bar, johnson_delta, johnson_table, last_level,
                            outer_level)
from nilcsp.morphism import ad, as_automorphism, hom_from_images
from nilcsp.oracle import aut_brute, classify_out, enumerate_group
from nilcsp.pcgroup import H_subgroup

from helpers import FIXTURES, oracle_automorphism, random_element, random_level_automorphism


def shear_heis():
    p = heis()
    return as_automorphism(hom_from_images(p, p, {"x": [("x", 1), ("z", 1)]}))


def test_delta_bar_examples():
    a = shear_heis()
    p = a.pres
    d = delta_bar(a, 1)
    assert d.matrix() == [[1], [0]]
    assert delta_bar(ad(p, p.gen("x")), 1).matrix() == [[0], [1]]
    assert delta_bar(a * a, 1) == d.scale(2)


def test_delta_bar_needs_level():
    p = heis()
    swap = as_automorphism(hom_from_images(p, p, {"x": [("y", 1)], "y": [("x", 1)]}))
    with pytest.raises(NotInFiltrationLevel):
        delta_bar(swap, 1)


def test_d_module_examples():
    assert d_module(heis(), 1).group.describe() == "0"
    m = d_module(f32(), 1)
    assert m.hom.describe() == "Z^9" and m.group.describe() == "Z^6"
    with pytest.raises(LevelOutOfRange):
        d_module(free_abelian(2), 1)
    with pytest.raises(LevelOutOfRange):
        d_module(heis(), 2)


def test_johnson_delta_examples():
    assert johnson_delta(shear_heis(), 1) == ()
    p = f32()
    a = as_automorphism(hom_from_images(p, p, {"x1": [("x1", 1), ("c23", 1)]}))
    assert any(johnson_delta(a, 1))
    assert not any(johnson_delta(ad(p, p.gen("x2")), 1))


def test_outer_level_examples():
    p = heis()
    lv = outer_level(ad(p, p.gen("x") * p.gen("y") ** 2))
    assert lv.trivial and lv.level == 2
    lv = outer_level(shear_heis())
    assert lv.trivial and lv.witnesses[0].exps == (0, -1, 0)
    q = f32()
    a = as_automorphism(hom_from_images(q, q, {"x1": [("x1", 1), ("c23", 1)]}))
    lv = outer_level(a)
    assert lv.level == 1 and not lv.trivial and lv.in_last


def test_outer_level_zero_for_non_ia():
    p = heis()
    swap = as_automorphism(hom_from_images(p, p, {"x": [("y", 1)], "y": [("x", 1)]}))
    assert outer_level(swap).level == 0


def test_johnson_table():
    rows = johnson_table(named("F23"))
    assert [r["D"] for r in rows] == ["0", "Z^3"]
    assert last_level(named("F23")) == 2


@pytest.mark.parametrize("name", FIXTURES)
def test_delta_bar_additive(name):
    p = named(name)
    rng = random.Random(name)
    for i in range(1, p.nilpotency_class):
        for _ in range(10):
            a, b = random_level_automorphism(p, rng, i), random_level_automorphism(p, rng, i)
            assert delta_bar(a * b, i) == delta_bar(a, i) + delta_bar(b, i)


@pytest.mark.parametrize("name", FIXTURES)
def test_delta_bar_vanishes_iff_trivial_one_level_down(name):
    p = named(name)
    rng = random.Random(f"vanish-{name}")
    for i in range(1, p.nilpotency_class):
        for _ in range(10):
            a = random_level_automorphism(p, rng, i)
            assert delta_bar(a, i).is_zero() == acts_trivially_mod(a, i + 2)


@pytest.mark.parametrize("name", FIXTURES)
def test_johnson_delta_ignores_inner_twist(name):
    p = named(name)
    rng = random.Random(f"inner-{name}")
    for i in range(1, p.nilpotency_class):
        H = H_subgroup(p, i).gens
        for _ in range(5):
            a = random_level_automorphism(p, rng, i)
            x = p.identity()
            for h in H:
                x = x * h ** rng.randint(-2, 2)
            assert johnson_delta(a * ad(p, x), i) == johnson_delta(a, i)


@pytest.mark.parametrize("name", FIXTURES)
def test_inner_automorphisms_are_trivial(name):
    p = named(name)
    rng = random.Random(f"ad-{name}")
    for _ in range(5):
        lv = outer_level(ad(p, random_element(p, rng)))
        assert lv.trivial and lv.representative.is_identity()


@pytest.mark.parametrize("name", ("HEIS2", "HEIS3"))
def test_outer_level_matches_oracle(name):
    p = named(name)
    t = enumerate_group(p)
    data = aut_brute(t)
    levels = classify_out(t, data)
    for perm, lv in levels.items():
        ours = outer_level(oracle_automorphism(p, t, perm))
        assert ours.level == lv
        assert ours.trivial == (perm in data.inner)
