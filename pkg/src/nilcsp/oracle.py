"""Brute-force ground truth for finite presentations.

Nothing here uses the collector or the subgroup machinery: the group is
rebuilt by coset enumeration from the defining relations, and every
automorphism and filtration question is answered by exhaustive search over
the resulting permutation tables.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import EnumerationBudgetExceeded
from .pcgroup import PcPresentation

DEFAULT_ORDER_BUDGET = 10**5
DEFAULT_AUT_BUDGET = 10**7


def relators(pres: PcPresentation) -> list[list[tuple[int, int]]]:
    """Defining relators as letter lists ``(generator, +1 or -1)``.

    Read straight from the stated relations: ``g^o w^-1`` for every finite
    generator and ``[g_j, g_i] w^-1`` for every pair (trivial ``w`` if absent).
    """
    def letters(word):
        out = []
        for g, e in word:
            out.extend([(g, 1 if e > 0 else -1)] * abs(e))
        return out

    def inverse(ls):
        return [(g, -s) for g, s in reversed(ls)]

    rels = []
    for k, o in enumerate(pres.orders):
        if o:
            rels.append([(k, 1)] * o + inverse(letters(pres.power_words.get(k, []))))
    stated = {(a, b): w for a, b, w in pres.comm_words}
    for j in range(pres.n):
        for i in range(j):
            comm = [(j, 1), (i, 1), (j, -1), (i, -1)]
            if (j, i) in stated:
                rhs = letters(stated[(j, i)])
            elif (i, j) in stated:
                rhs = inverse(letters(stated[(i, j)]))
            else:
                rhs = []
            rels.append(comm + inverse(rhs))
    return rels


def coset_enumeration(ngens: int, rels, max_cosets: int) -> list[list[int]]:
    """Todd-Coxeter (HLT) enumeration of cosets of the trivial subgroup.

    Returns the action table ``t[c][col]`` with column ``2k`` for generator k
    and ``2k+1`` for its inverse; coset 0 is the identity.
    """
    ncols = 2 * ngens
    inv = [c ^ 1 for c in range(ncols)]
    table = [[-1] * ncols]
    parent = [0]
    rels = [[2 * g + (0 if s > 0 else 1) for g, s in r] for r in rels if r]

    def rep(c):
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def merge(k, l, queue):
        k, l = rep(k), rep(l)
        if k == l:
            return
        if l < k:
            k, l = l, k
        parent[l] = k
        queue.append(l)

    def coincidence(a, b):
        queue = []
        merge(a, b, queue)
        i = 0
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(ncols):
                f = table[e][x]
                if f < 0:
                    continue
                table[f][inv[x]] = -1
                e1, f1 = rep(e), rep(f)
                if table[e1][x] >= 0:
                    merge(f1, table[e1][x], queue)
                elif table[f1][inv[x]] >= 0:
                    merge(e1, table[f1][inv[x]], queue)
                else:
                    table[e1][x] = f1
                    table[f1][inv[x]] = e1

    def define(c, x):
        if len(table) >= max_cosets:
            raise EnumerationBudgetExceeded("coset enumeration", len(table) + 1, max_cosets)
        d = len(table)
        table.append([-1] * ncols)
        parent.append(d)
        table[c][x] = d
        table[d][inv[x]] = c

    def scan_and_fill(c, r):
        f, b = c, c
        i, j = 0, len(r) - 1
        while True:
            while i <= j and table[f][r[i]] >= 0:
                f = table[f][r[i]]
                i += 1
            if i > j:
                if f != c:
                    coincidence(f, c)
                return
            while j >= i and table[b][inv[r[j]]] >= 0:
                b = table[b][inv[r[j]]]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][r[i]] = b
                table[b][inv[r[i]]] = f
                return
            define(f, r[i])

    c = 0
    while c < len(table):
        if parent[c] == c:
            for r in rels:
                if parent[c] != c:
                    break
                scan_and_fill(c, r)
            if parent[c] == c:
                for x in range(ncols):
                    if table[c][x] < 0:
                        define(c, x)
        c += 1
    live = [c for c in range(len(table)) if parent[c] == c]
    renum = {c: i for i, c in enumerate(live)}
    return [[renum[rep(table[c][x])] for x in range(ncols)] for c in live]


FULL_TABLE_LIMIT = 1024


@dataclass
class FiniteGroupTable:
    """Finite group given by right multiplication by each generator.

    ``elements[i]`` is the normal-form exponent vector of element ``i``;
    element 0 is the identity. Small groups also carry a full product table;
    larger ones multiply by walking the normal form of the right factor.
    """

    pres: PcPresentation
    elements: list
    index: dict
    gen_action: list  # gen_action[k][i] = element i times generator k
    inverse: list
    table: list | None = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, a: int, b: int) -> int:
        if self.table is not None:
            return self.table[a][b]
        for k, e in enumerate(self.elements[b]):
            act = self.gen_action[k]
            for _ in range(e):
                a = act[a]
        return a

    def conj(self, g: int, x: int) -> int:
        """``g x g^-1``."""
        return self.mul(self.mul(g, x), self.inverse[g])

    def power(self, a: int, m: int) -> int:
        r = 0
        if m < 0:
            a, m = self.inverse[a], -m
        for _ in range(m):
            r = self.mul(r, a)
        return r

    def element_order(self, a: int) -> int:
        n, r = 1, a
        while r != 0:
            r = self.mul(r, a)
            n += 1
        return n

    def of_vector(self, exps) -> int:
        return self.index[tuple(exps)]

    def generator(self, k: int) -> int:
        return self.gen_action[k][0]

    def closure(self, seeds) -> frozenset:
        """Subgroup generated by ``seeds``."""
        seeds = [s for s in seeds if s != 0]
        out = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for s in seeds:
                    b = self.mul(a, s)
                    if b not in out:
                        out.add(b)
                        nxt.append(b)
            frontier = nxt
        return frozenset(out)

    def normal_closure(self, seeds) -> frozenset:
        seeds = set(seeds)
        while True:
            sub = self.closure(seeds)
            more = {self.conj(g, s) for g in range(self.order) for s in seeds} - sub
            if not more:
                return sub
            seeds |= more


def enumerate_group(pres: PcPresentation, budget: int = DEFAULT_ORDER_BUDGET) -> FiniteGroupTable:
    """Enumerate a finite presentation into a :class:`FiniteGroupTable`."""
    if not pres.is_finite:
        raise ValueError("enumeration needs every relative order finite")
    bound = 1
    for o in pres.orders:
        bound *= o
    if bound > budget:
        raise EnumerationBudgetExceeded("group enumeration", bound, budget)
    table = coset_enumeration(pres.n, relators(pres), 50 * bound + 1000)
    size = len(table)
    gen_action = [[table[c][2 * k] for c in range(size)] for k in range(pres.n)]
    # normal forms: apply g_1^e_1 ... g_n^e_n to the identity coset
    index = {}
    for exps in product(*[range(o) for o in pres.orders]):
        c = 0
        for k, e in enumerate(exps):
            for _ in range(e):
                c = gen_action[k][c]
        index[exps] = c
    if len(set(index.values())) != size or len(index) != size:
        raise ValueError(f"presentation is inconsistent: {size} elements, {bound} normal forms")
    elements = [None] * size
    for v, c in index.items():
        elements[c] = v
    # b^-1 = g_n^-e_n ... g_1^-e_1, walked with the inverse generator moves
    back = []
    for act in gen_action:
        inv = [0] * size
        for c, d in enumerate(act):
            inv[d] = c
        back.append(inv)
    inverse = [0] * size
    for b, v in enumerate(elements):
        c = 0
        for k in range(len(v) - 1, -1, -1):
            for _ in range(v[k]):
                c = back[k][c]
        inverse[b] = c
    t = FiniteGroupTable(pres, elements, index, gen_action, inverse)
    if size <= FULL_TABLE_LIMIT:
        # right multiplication by an element is the composite of generator moves
        mult = [[0] * size for _ in range(size)]
        for b, v in enumerate(elements):
            col = list(range(size))
            for k, e in enumerate(v):
                for _ in range(e):
                    col = [gen_action[k][c] for c in col]
            for a in range(size):
                mult[a][b] = col[a]
        t.table = mult
    return t


# ---------------------------------------------------------------------------
# automorphisms


def generating_indices(pres: PcPresentation) -> list[int]:
    """Weight-one generators; they generate a weighted nilpotent group."""
    return [k for k in range(pres.n) if pres.weights[k] == 1]


def _extend(t: FiniteGroupTable, gens: list[int], images: list[int]) -> tuple | None:
    """Extend generator images to a bijective endomorphism, or None."""
    phi = [-1] * t.order
    phi[0] = 0
    queue = [0]
    gen_elems = [t.generator(k) for k in gens]
    i = 0
    while i < len(queue):
        a = queue[i]
        i += 1
        for s, im in zip(gen_elems, images):
            b = t.mul(a, s)
            v = t.mul(phi[a], im)
            if phi[b] < 0:
                phi[b] = v
                queue.append(b)
            elif phi[b] != v:
                return None
    if len(queue) != t.order or len(set(phi)) != t.order:
        return None
    return tuple(phi)


@dataclass
class AutData:
    auts: list  # permutations, lexicographically sorted
    inner: list
    outer_reps: list  # lexicographically least member of each Inn coset
    outer_of: dict  # permutation -> index in outer_reps

    @property
    def counts(self) -> dict:
        return {"aut": len(self.auts), "inn": len(self.inner), "out": len(self.outer_reps)}


def aut_brute(t: FiniteGroupTable, gens: list[int] | None = None, budget: int = DEFAULT_AUT_BUDGET) -> AutData:
    """All automorphisms by backtracking over images of the generators."""
    gens = generating_indices(t.pres) if gens is None else gens
    orders = [t.element_order(t.generator(k)) for k in gens]
    by_order = {}
    for a in range(t.order):
        by_order.setdefault(t.element_order(a), []).append(a)
    candidates = [by_order.get(o, []) for o in orders]
    space = 1
    for c in candidates:
        space *= len(c)
    if space > budget:
        raise EnumerationBudgetExceeded("automorphism search", space, budget)
    auts = []
    for images in product(*candidates):
        phi = _extend(t, gens, list(images))
        if phi is not None:
            auts.append(phi)
    auts.sort()
    inner = sorted({tuple(t.conj(g, x) for x in range(t.order)) for g in range(t.order)})
    outer_of = {}
    reps = []
    for phi in auts:
        if phi in outer_of:
            continue
        coset = [tuple(phi[c] for c in inn) for inn in inner]
        rep = min(coset)
        idx = len(reps)
        reps.append(rep)
        for psi in coset:
            outer_of[psi] = idx
    return AutData(auts, inner, reps, outer_of)


def aut_images(t: FiniteGroupTable, phi: tuple) -> list:
    """Normal-form vectors of the images of each pc generator."""
    return [t.elements[phi[t.generator(k)]] for k in range(t.pres.n)]


def aut_from_images(t: FiniteGroupTable, images) -> tuple | None:
    """Permutation of the automorphism sending generator k to ``images[k]`` (vectors)."""
    gens = list(range(t.pres.n))
    return _extend(t, gens, [t.of_vector(v) for v in images])


def compose_perm(f: tuple, g: tuple) -> tuple:
    """``f . g`` (apply g first)."""
    return tuple(f[x] for x in g)


# ---------------------------------------------------------------------------
# filtration


def lower_central_series(t: FiniteGroupTable) -> list[frozenset]:
    """``[gamma_1, gamma_2, ..., {1}]`` computed in the table."""
    def comm(a, b):
        return t.mul(t.mul(t.mul(a, b), t.inverse[a]), t.inverse[b])

    series = [frozenset(range(t.order))]
    while len(series[-1]) > 1:
        prev = series[-1]
        nxt = t.normal_closure({comm(a, b) for a in range(t.order) for b in prev})
        if nxt == prev:
            break
        series.append(nxt)
    if len(series[-1]) > 1:
        raise ValueError("group is not nilpotent")
    return series


def _inner_modulo(t: FiniteGroupTable, phi: tuple, normal: frozenset, gens: list[int]) -> bool:
    """Is ``phi`` inner on ``G/normal``?"""
    gen_elems = [t.generator(k) for k in gens]
    for g in range(t.order):
        ok = True
        for s in gen_elems:
            d = t.mul(phi[s], t.inverse[t.conj(g, s)])
            if d not in normal:
                ok = False
                break
        if ok:
            return True
    return False


def filtration_level(t: FiniteGroupTable, phi: tuple, series: list[frozenset] | None = None) -> int:
    """Largest ``i`` with the outer class of ``phi`` in ``ker(Out G -> Out G/gamma_{i+1})``.

    Ranges over ``0..K``; ``K`` means the class is inner.
    """
    series = lower_central_series(t) if series is None else series
    K = len(series) - 1
    gens = generating_indices(t.pres)
    level = 0
    for i in range(1, K + 1):
        if _inner_modulo(t, phi, series[i], gens):
            level = i
        else:
            break
    return level


def classify_out(t: FiniteGroupTable, data: AutData | None = None) -> dict:
    """Map each outer representative to its filtration level."""
    data = aut_brute(t) if data is None else data
    series = lower_central_series(t)
    return {rep: filtration_level(t, rep, series) for rep in data.outer_reps}


def out_report(pres: PcPresentation, budget: int = DEFAULT_ORDER_BUDGET) -> dict:
    t = enumerate_group(pres, budget)
    data = aut_brute(t)
    levels = classify_out(t, data)
    hist = {}
    for lv in levels.values():
        hist[lv] = hist.get(lv, 0) + 1
    return {"order": t.order, **data.counts, "levels": {str(k): hist[k] for k in sorted(hist)}}
