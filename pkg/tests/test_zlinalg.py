import itertools
from math import gcd

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from nilcsp.zlinalg import (AbelianGroup, AmbientMismatch, IntMatrix, Submodule, check_M2, choose_M2, hnf,
                            hom_group, invariant_factors, inverse_unimodular, kernel_rows, lattice_meet,
                            lcm, snf, solve_rows, submodule_meet, xgcd)

small = st.integers(-6, 6)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def det_divisors(rows):
    """gcd of all k x k minors, k = 1..rank."""
    m = sympy.Matrix(rows)
    out = []
    for k in range(1, min(m.shape) + 1):
        g = 0
        for ri in itertools.combinations(range(m.rows), k):
            for ci in itertools.combinations(range(m.cols), k):
                g = gcd(g, int(m.extract(list(ri), list(ci)).det()))
        if g == 0:
            break
        out.append(g)
    return out


def oracle_factors(rows):
    d = det_divisors(rows)
    return [d[0]] + [d[i] // d[i - 1] for i in range(1, len(d))] if d else []


def is_hnf(h: IntMatrix) -> bool:
    last = -1
    zero_seen = False
    for i in range(h.rows):
        row = h.row(i)
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            zero_seen = True
            continue
        if zero_seen:
            return False
        p = nz[0]
        if p <= last or row[p] <= 0:
            return False
        for k in range(i):
            if not 0 <= h[k, p] < row[p]:
                return False
        last = p
    return True


# --- examples ---------------------------------------------------------------


def test_xgcd_and_lcm():
    g, s, t = xgcd(240, 46)
    assert g == 2 and 240 * s + 46 * t == 2
    assert lcm(4, 6) == 12


def test_hnf_identity():
    h, u = hnf([[1, 0], [0, 1]])
    assert h == IntMatrix.identity(2) and u == IntMatrix.identity(2)


def test_hnf_column_of_coprimes():
    h, u = hnf([[2], [3]])
    assert h.tolist() == [[1], [0]]
    assert u @ IntMatrix([[2], [3]]) == h


def test_hnf_small_example():
    h, _ = hnf([[2, 0], [1, 1]])
    assert h.tolist() == [[1, 1], [0, 2]]


@pytest.mark.parametrize("rows,diag", [
    ([[4, 0], [0, 6]], [2, 12]),
    ([[0, 0], [0, 0]], [0, 0]),
    ([[2, 4], [6, 8]], [2, 4]),
])
def test_snf_examples(rows, diag):
    s, u, v = snf(rows)
    assert [s[i, i] for i in range(2)] == diag
    assert u @ IntMatrix(rows) @ v == s


def test_hom_group_examples():
    assert hom_group(AbelianGroup.free(2), AbelianGroup.free(1)).describe() == "Z^2"
    assert hom_group(AbelianGroup.from_orders([2]), AbelianGroup.free(1)).describe() == "0"
    assert hom_group(AbelianGroup.from_orders([4]), AbelianGroup.from_orders([6])).describe() == "Z/2"


def test_meet_examples():
    Z = AbelianGroup.free(1)
    assert submodule_meet(Submodule(Z, [[2]]), Submodule(Z, [[3]])) == Submodule(Z, [[6]])
    X = Submodule(Z, [[4]])
    assert submodule_meet(X, X) == X
    Z2 = AbelianGroup.free(2)
    assert submodule_meet(Submodule(Z2, [[2, 0]]), Submodule(Z2, [[0, 3]])).basis == ()


def test_meet_rejects_mixed_ambients():
    with pytest.raises(AmbientMismatch):
        submodule_meet(Submodule(AbelianGroup.free(1), [[1]]), Submodule(AbelianGroup.free(2), [[1, 0]]))


@pytest.mark.parametrize("ambient,gens,m1,m2", [
    (1, [[2]], 3, 6),
    (2, [[1, 0]], 3, 3),
    (2, [[2, 0]], 3, 6),
])
def test_choose_M2_examples(ambient, gens, m1, m2):
    H = AbelianGroup.free(ambient)
    W = Submodule(H, gens)
    assert choose_M2(H, W, m1) == m2
    assert check_M2(H, W, m1, m2)


def test_abelian_group_describe():
    assert AbelianGroup(2, [[2, 0], [0, 4]]).torsion == (2, 4)
    g = AbelianGroup(3, [[2, 4, 0], [6, 8, 0]])
    assert g.rank == 1 and g.torsion == (2, 4)
    assert g.order() is None and AbelianGroup.from_orders([2, 4]).order() == 8


def test_solve_and_kernel():
    assert solve_rows([[1, 0], [0, 2]], [3, 4]) == [3, 2]
    assert solve_rows([[2, 0]], [1, 0]) is None
    assert kernel_rows([[1, 2], [2, 4]]) == [(2, -1)]
    assert lattice_meet([[2, 0]], [[1, 0], [0, 1]], 2) == [(2, 0)]


# --- properties -------------------------------------------------------------


@given(matrices())
def test_hnf_reconstructs(rows):
    a = IntMatrix(rows)
    h, u = hnf(a)
    assert abs(u.det()) == 1
    assert u @ a == h
    assert is_hnf(h)
    assert inverse_unimodular(u) @ h == a


@given(matrices())
def test_snf_matches_determinantal_divisors(rows):
    s, u, v = snf(rows)
    assert u @ IntMatrix(rows) @ v == s
    diag = [s[i, i] for i in range(min(s.rows, s.cols))]
    assert all(s[i, j] == 0 for i in range(s.rows) for j in range(s.cols) if i != j)
    nz = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert nz == oracle_factors(rows)


@given(matrices(3, 3), st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_invariant_factors_unimodular_invariant(rows, mix):
    a = IntMatrix(rows)
    u = IntMatrix.identity(a.rows)
    # build a unimodular left multiplier from elementary operations
    for i, j in itertools.permutations(range(a.rows), 2):
        e = [[int(r == c) for c in range(a.rows)] for r in range(a.rows)]
        e[i][j] = mix[i % 3][j % 3]
        u = IntMatrix(e) @ u
    assert invariant_factors(u @ a) == invariant_factors(a)


@given(st.lists(st.integers(0, 6), min_size=1, max_size=3), st.data())
def test_hom_evaluation_additive(orders, data):
    src = AbelianGroup.from_orders([o if o != 1 else 0 for o in orders])
    tgt = AbelianGroup.from_orders([3, 0])
    h = hom_group(src, tgt)
    coord = st.lists(small, min_size=h.ncanon, max_size=h.ncanon)
    f, g = h.reduce(data.draw(coord)), h.reduce(data.draw(coord))
    x = src.reduce(data.draw(st.lists(small, min_size=src.ncanon, max_size=src.ncanon)))
    assert h.evaluate(h.add(f, g), x) == tgt.add(h.evaluate(f, x), h.evaluate(g, x))


@given(st.lists(st.lists(small, min_size=2, max_size=2), min_size=1, max_size=3), st.integers(1, 6))
def test_choose_M2_postcondition(gens, m1):
    H = AbelianGroup.free(2)
    W = Submodule(H, gens)
    m2 = choose_M2(H, W, m1)
    assert m2 % m1 == 0
    assert check_M2(H, W, m1, m2)
    # independent lattice check: W ∩ m2 Z^2 ⊆ m1 W
    meet = lattice_meet(list(W.basis) or [[0, 0]], [[m2, 0], [0, m2]], 2)
    m1W = Submodule(H, [[m1 * x for x in b] for b in W.basis])
    assert all(tuple(r) in m1W for r in meet)


@given(st.lists(st.lists(st.integers(0, 5), min_size=2, max_size=2), max_size=3),
       st.lists(st.lists(st.integers(0, 5), min_size=2, max_size=2), max_size=3))
def test_submodules_match_enumeration_on_finite_ambient(xs, ys):
    A = AbelianGroup.from_orders([6, 4])
    elems = [(a, b) for a in range(6) for b in range(4)]

    def span(gens):
        seen = {(0, 0)}
        frontier = [(0, 0)]
        while frontier:
            nxt = []
            for e in frontier:
                for g in gens:
                    f = ((e[0] + g[0]) % 6, (e[1] + g[1]) % 4)
                    if f not in seen:
                        seen.add(f)
                        nxt.append(f)
            frontier = nxt
        return seen

    X, Y = Submodule(A, [A.encode(g) for g in xs]), Submodule(A, [A.encode(g) for g in ys])
    sx, sy = span(xs), span(ys)
    meet = submodule_meet(X, Y)
    for e in elems:
        c = A.encode(e)
        assert (c in X) == (e in sx)
        assert (c in meet) == (e in sx and e in sy)
    assert X.index() == 24 // len(sx)


@given(st.lists(st.lists(small, min_size=3, max_size=3), max_size=4), st.lists(small, min_size=3, max_size=3))
def test_encode_decode_roundtrip(rels, x):
    g = AbelianGroup(3, rels)
    c = g.encode(x)
    assert g.encode(g.decode(c)) == c
