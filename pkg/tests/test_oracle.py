import random

import pytest

from nilcsp.errors import EnumerationBudgetExceeded
from nilcsp.fixtures import cyclic, named
from nilcsp.oracle import (aut_brute, compose_perm, coset_enumeration, enumerate_group, lower_central_series,
                           out_report, relators)
from nilcsp.pcgroup import PcPresentation, centre


def klein():
    return PcPresentation([("a", 1, 2), ("b", 1, 2)])


@pytest.mark.parametrize("name,order", [("HEIS2", 8), ("HEIS3", 27), ("C6", 6)])
def test_enumeration_orders(name, order):
    assert enumerate_group(named(name)).order == order


def test_enumeration_budget():
    with pytest.raises(EnumerationBudgetExceeded):
        enumerate_group(named("HEIS3"), budget=10)


def test_enumeration_rejects_infinite():
    with pytest.raises(ValueError):
        enumerate_group(named("HEIS"))


@pytest.mark.parametrize("name", ("HEIS2", "HEIS3", "C6"))
def test_table_is_a_group(name):
    t = enumerate_group(named(name))
    n = t.order
    for a in range(n):
        assert t.mul(a, t.inverse[a]) == 0 and t.mul(0, a) == a
        for b in range(n):
            ab = t.mul(a, b)
            for c in range(n):
                assert t.mul(ab, c) == t.mul(a, t.mul(b, c))


def test_table_matches_collection():
    p = named("HEIS3")
    t = enumerate_group(p)
    rng = random.Random(3)
    elems = p.all_elements()
    for _ in range(100):
        a, b = rng.choice(elems), rng.choice(elems)
        assert t.elements[t.mul(t.of_vector(a.exps), t.of_vector(b.exps))] == (a * b).exps


def test_coset_enumeration_of_dihedral_group():
    # <r, s | r^4, s^2, (rs)^2> has order 8
    rels = [[(0, 1)] * 4, [(1, 1)] * 2, [(0, 1), (1, 1), (0, 1), (1, 1)]]
    table = coset_enumeration(2, rels, 1000)
    assert len(table) == 8


@pytest.mark.parametrize("pres,aut,out", [
    (cyclic(3), 2, 2),
    (klein(), 6, 6),
])
def test_aut_counts_small(pres, aut, out):
    data = aut_brute(enumerate_group(pres))
    assert data.counts == {"aut": aut, "inn": 1, "out": out}


def test_heis3_counts():
    data = aut_brute(enumerate_group(named("HEIS3")))
    assert data.counts == {"aut": 432, "inn": 9, "out": 48}


def test_heis2_counts():
    assert aut_brute(enumerate_group(named("HEIS2"))).counts == {"aut": 8, "inn": 4, "out": 2}


@pytest.mark.parametrize("name", ("HEIS2", "HEIS3"))
def test_aut_closed_under_composition(name):
    data = aut_brute(enumerate_group(named(name)))
    found = set(data.auts)
    rng = random.Random(name)
    for _ in range(200):
        f, g = rng.choice(data.auts), rng.choice(data.auts)
        assert compose_perm(f, g) in found
    assert data.auts == sorted(data.auts)


@pytest.mark.parametrize("name", ("HEIS2", "HEIS3"))
def test_inner_count_is_index_of_centre(name):
    p = named(name)
    data = aut_brute(enumerate_group(p))
    assert len(data.inner) == centre(p).index()


def test_lower_central_series_sizes():
    t = enumerate_group(named("HEIS3"))
    assert [len(s) for s in lower_central_series(t)] == [27, 3, 1]


def test_relators_cover_all_relations():
    p = named("HEIS3")
    # 3 power relators and 3 commutator relators
    assert len(relators(p)) == 6


def test_out_report():
    rep = out_report(named("HEIS3"))
    assert rep == {"order": 27, "aut": 432, "inn": 9, "out": 48, "levels": {"0": 47, "2": 1}}


def test_aut_budget():
    with pytest.raises(EnumerationBudgetExceeded):
        aut_brute(enumerate_group(named("HEIS3")), budget=5)
