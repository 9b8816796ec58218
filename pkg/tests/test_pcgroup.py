import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilcsp.errors import EnumerationBudgetExceeded, NotNormal, PresentationError
from nilcsp.fixtures import FIXTURE_NAMES, cyclic, free_abelian, heis, named
from nilcsp.oracle import enumerate_group
from nilcsp.pcgroup import (H_series, H_subgroup, PcPresentation, centre, collect, commutator, consistency_check,
                            lcs_layers, lower_central_series, meet, normal_closure, normal_core, power_subgroup,
                            quotient, subgroup, trivial_subgroup, weight_segment, whole_group)

from helpers import FIXTURES, heis_matrix, mat_mul, random_element

exps3 = st.tuples(*[st.integers(-5, 5)] * 3)


def heis_with(z_weight=2, z_order=None, x_order=None):
    return PcPresentation([("x", 1, x_order), ("y", 1, None), ("z", z_weight, z_order)],
                          {}, [("x", "y", [("z", 1)])])


# --- presentations ------------------------------------------------------------


def test_heis_is_consistent():
    assert consistency_check(heis()) == []


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixtures_are_consistent(name):
    assert consistency_check(named(name)) == []


def test_weight_order_violation_reported():
    p = PcPresentation([("x", 1, None), ("z", 2, None), ("y", 1, None)], {}, [("x", "y", [("z", 1)])])
    assert any("weight" in s for s in p.structural_problems())


def test_torsion_incompatible_with_commutator_tail_is_inconsistent():
    problems = consistency_check(heis_with(x_order=2))
    assert problems and "yx^2" in problems[0]


def test_unknown_generator_in_relation():
    with pytest.raises(PresentationError) as err:
        PcPresentation([("x", 1, None)], {}, [("x", "w", [])])
    assert "'w'" in str(err.value)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_json_roundtrip_is_exact(name):
    p = named(name)
    data = p.to_json()
    assert PcPresentation.from_json(data).to_json() == data
    assert PcPresentation.from_json(data).dumps() == p.dumps()


# --- collection ---------------------------------------------------------------


def test_collect_examples():
    p = heis()
    assert collect(p, [("y", 1), ("x", 1)]).exps == (1, 1, -1)
    assert collect(p, [("x", 1), ("y", 1)]).exps == (1, 1, 0)
    assert collect(p, [("x", 1), ("y", 1)] * 2).exps == (2, 2, -1)


def test_commutator_examples():
    p = heis()
    x, y, z = p.gens()
    assert commutator(x, y) == z
    assert commutator(x, x).is_identity()
    assert commutator(x ** 2, y) == z ** 2


@given(exps3, exps3)
def test_heis_product_matches_matrix_model(a, b):
    p = heis()
    prod = p.element(a) * p.element(b)
    assert heis_matrix(prod.exps) == mat_mul(heis_matrix(a), heis_matrix(b))


@pytest.mark.parametrize("name", FIXTURES + ("HEIS3",))
def test_group_axioms_on_random_triples(name):
    p = named(name)
    rng = random.Random(name)
    e = p.identity()
    for _ in range(200):
        a, b, c = (random_element(p, rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * ~a == e and ~a * a == e
        assert a * e == a


@given(st.lists(st.tuples(st.sampled_from("xyz"), st.integers(-3, 3)), max_size=8),
       st.lists(st.tuples(st.sampled_from("xyz"), st.integers(-3, 3)), max_size=8))
def test_collect_is_a_homomorphism_from_words(u, v):
    p = heis()
    assert collect(p, u + v) == collect(p, u) * collect(p, v)


# --- lower central series -----------------------------------------------------


@pytest.mark.parametrize("name,layers", [
    ("HEIS", ["Z^2", "Z"]),
    ("F23", ["Z^2", "Z", "Z^2"]),
    ("F32", ["Z^3", "Z^3"]),
    ("HEIS2", ["Z/2 + Z/2", "Z/2"]),
])
def test_lcs_layers(name, layers):
    assert [lay.group.describe() for lay in lcs_layers(named(name))] == layers


def test_lcs_of_abelian_group():
    assert [lay.group.describe() for lay in lcs_layers(free_abelian(2))] == ["Z^2"]


@pytest.mark.parametrize("name", FIXTURES)
def test_layer_projection_inverts_lift(name):
    p = named(name)
    for lay in lcs_layers(p):
        for k in range(lay.group.ncanon):
            c = tuple(int(i == k) for i in range(lay.group.ncanon))
            assert lay.project(lay.lift(c)) == lay.group.reduce(c)


@pytest.mark.parametrize("name", FIXTURES)
def test_lcs_matches_weight_segments(name):
    p = named(name)
    for w, g in enumerate(lower_central_series(p), start=1):
        assert g == weight_segment(p, w)


# --- subgroups and quotients --------------------------------------------------


def test_subgroup_examples():
    p = heis()
    x, y, z = p.gens()
    assert subgroup(p, [x, y]).index() == 1
    a = free_abelian(2)
    assert subgroup(a, [a.element((2, 0)), a.element((1, 1))]).index() == 2
    assert normal_closure(p, [x ** 2, y ** 2]).index() == 8


def test_normal_closure_examples():
    p = heis()
    x, y, z = p.gens()
    assert normal_closure(p, [x ** 2]) == subgroup(p, [x ** 2, z ** 2])
    assert normal_closure(p, [p.identity()]).is_trivial()
    assert normal_closure(p, [z ** 3]) == subgroup(p, [z ** 3])


def test_quotient_examples():
    p = heis()
    x, y, z = p.gens()
    q, proj = quotient(p, subgroup(p, [z]))
    assert [lay.group.describe() for lay in lcs_layers(q)] == ["Z^2"]
    q, proj = quotient(p, normal_closure(p, [x ** 2, y ** 2]))
    assert q.order() == 8
    assert proj(z) ** 2 == q.identity() and not proj(z).is_identity()
    q, proj = quotient(p, trivial_subgroup(p))
    rng = random.Random("trivial-quotient")
    for _ in range(30):
        a, b = random_element(p, rng), random_element(p, rng)
        assert proj(a).exps == a.exps
        assert proj(a * b) == proj(a) * proj(b)


def test_quotient_rejects_non_normal():
    p = heis()
    with pytest.raises(NotNormal):
        quotient(p, subgroup(p, [p.gen("x")]))


@pytest.mark.parametrize("name", FIXTURES)
def test_quotient_kernel_is_exactly_N(name):
    p = named(name)
    rng = random.Random(f"ker-{name}")
    N = normal_closure(p, [g ** 2 for g in p.gens()] + [random_element(p, rng)])
    q, proj = quotient(p, N)
    for k in N.gens:
        assert proj(k).is_identity()
    for _ in range(50):
        g = random_element(p, rng)
        assert proj(g).is_identity() == (g in N)
        assert proj(proj.lift(proj(g))) == proj(g)


def test_power_subgroup_examples():
    p = heis()
    G2 = power_subgroup(p, 2)
    assert G2.index() == 4 and p.gen("z") in G2
    a = free_abelian(2)
    assert power_subgroup(a, 3) == subgroup(a, [a.element((3, 0)), a.element((0, 3))])
    assert power_subgroup(p, 1) == whole_group(p)


def test_power_subgroup_budget():
    with pytest.raises(EnumerationBudgetExceeded) as err:
        power_subgroup(named("F23"), 4, budget=100)
    assert err.value.attempted > 100


@pytest.mark.parametrize("name", ("HEIS", "F32", "NG2"))
@pytest.mark.parametrize("e", (2, 3))
def test_power_subgroup_contains_powers(name, e):
    p = named(name)
    Ge = power_subgroup(p, e)
    rng = random.Random(f"pow-{name}-{e}")
    for _ in range(20):
        assert random_element(p, rng) ** e in Ge
    assert Ge.is_normal()


def test_H_series_examples():
    p = heis()
    assert H_subgroup(p, 1) == whole_group(p)
    assert H_subgroup(p, 2) == subgroup(p, [p.gen("z")]) == centre(p)
    f = named("F23")
    assert H_subgroup(f, 3) == centre(f) == weight_segment(f, 3)


@pytest.mark.parametrize("name", FIXTURES)
def test_lcs_terms_inside_H(name):
    p = named(name)
    for g, h in zip(lower_central_series(p), H_series(p)):
        assert g.issubset(h)


# --- finite fixtures against exhaustive enumeration ---------------------------


@pytest.mark.parametrize("name", ("HEIS2", "HEIS3"))
def test_finite_subgroups_match_enumeration(name):
    p = named(name)
    t = enumerate_group(p)
    elements = p.all_elements()
    assert len(elements) == t.order == p.order()
    rng = random.Random(name)
    for _ in range(5):
        seeds = [random_element(p, rng) for _ in range(2)]
        S = subgroup(p, seeds)
        closure = t.closure([t.of_vector(s.exps) for s in seeds])
        assert S.order() == len(closure)
        assert {t.of_vector(g.exps) for g in elements if g in S} == set(closure)
        N = normal_closure(p, seeds)
        assert N.order() == len(t.normal_closure([t.of_vector(s.exps) for s in seeds]))
        q, _ = quotient(p, N)
        assert q.order() * N.order() == t.order


def test_meet_and_core():
    p = heis()
    x, y, z = p.gens()
    A = subgroup(p, [x ** 2, y, z])
    B = subgroup(p, [x, y ** 2, z])
    assert meet(A, B) == subgroup(p, [x ** 2, y ** 2, z])
    with pytest.raises(ValueError):
        meet(subgroup(p, [x]), subgroup(p, [y]))
    L = subgroup(p, [x ** 2, y, z ** 2])
    core = normal_core(p, L)
    assert core.is_normal() and core.issubset(L)
    for g in p.gens():
        conj = [g * k * ~g for k in L.gens]
        assert core.issubset(subgroup(p, conj))


def test_cyclic_fixture():
    c = cyclic(6)
    assert c.order() == 6 and power_subgroup(c, 2).index() == 2
