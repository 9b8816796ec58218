"""Weighted polycyclic presentations of finitely generated nilpotent groups.

A presentation lists generators ``g_1, ..., g_n`` with weights and relative
orders, power relations ``g_k^{o_k} = w`` and commutator relations
``[g_j, g_i] = w``. Commutators use ``[a, b] = a b a^-1 b^-1`` throughout.
Weights must be compatible with the lower central series: ``gamma_i G`` is
generated by the generators of weight at least ``i``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Callable, Iterable, Sequence

from . import _kernel
from .errors import EnumerationBudgetExceeded, NotNormal, PresentationError
from .zlinalg import AbelianGroup, kernel_rows, xgcd

DEFAULT_POWER_BUDGET = 50_000

Word = list  # list of (name, exponent) pairs


class PcPresentation:
    """A weighted polycyclic presentation.

    ``generators`` is a sequence of ``(name, weight, order)`` with ``order``
    ``None`` for infinite generators; ``powers`` maps a generator name to a
    word; ``commutators`` is a sequence of ``(left, right, word)`` meaning
    ``[left, right] = word``. Missing relations are trivial.
    """

    def __init__(self, generators, powers=None, commutators=()):
        gens = [tuple(g) for g in generators]
        self.names = tuple(str(g[0]) for g in gens)
        self.weights = tuple(g[1] for g in gens)
        self.rel_orders = tuple(g[2] for g in gens)
        self._raw_powers = dict(powers or {})
        self._raw_comms = [tuple(c) for c in commutators]
        self._validate_syntax()
        self.n = len(self.names)
        self.index = {name: i for i, name in enumerate(self.names)}
        self.orders = tuple(0 if o is None else o for o in self.rel_orders)
        self.power_words = {self.index[k]: self._word_indices(w) for k, w in self._raw_powers.items()}
        self.comm_words = [(self.index[a], self.index[b], self._word_indices(w)) for a, b, w in self._raw_comms]

    # -- construction helpers --------------------------------------------

    def _validate_syntax(self):
        seen = set()
        for i, (name, w, o) in enumerate(zip(self.names, self.weights, self.rel_orders)):
            path = f"generators[{i}]"
            if not name:
                raise PresentationError(path, "empty generator name")
            if name in seen:
                raise PresentationError(path, f"duplicate generator name {name!r}")
            seen.add(name)
            if not isinstance(w, int) or isinstance(w, bool) or w < 1:
                raise PresentationError(path, f"generator {name!r}: weight must be a positive integer")
            if o is not None and (not isinstance(o, int) or isinstance(o, bool) or o < 2):
                raise PresentationError(path, f"generator {name!r}: order must be null or an integer >= 2")
        for name, word in self._raw_powers.items():
            if name not in seen:
                raise PresentationError(f"powers.{name}", f"unknown generator {name!r}")
            if self.rel_orders[self.names.index(name)] is None:
                raise PresentationError(f"powers.{name}", f"generator {name!r} is infinite and cannot have a power relation")
            self._check_word(word, f"powers.{name}", seen)
        pairs = set()
        for i, c in enumerate(self._raw_comms):
            if len(c) != 3:
                raise PresentationError(f"commutators[{i}]", "expected (left, right, word)")
            a, b, word = c
            for side, g in (("left", a), ("right", b)):
                if g not in seen:
                    raise PresentationError(f"commutators[{i}].{side}", f"unknown generator {g!r}")
            if a == b:
                raise PresentationError(f"commutators[{i}]", "commutator of a generator with itself")
            key = frozenset((a, b))
            if key in pairs:
                raise PresentationError(f"commutators[{i}]", f"duplicate relation for [{a},{b}]")
            pairs.add(key)
            self._check_word(word, f"commutators[{i}].word", seen)

    @staticmethod
    def _check_word(word, path, names):
        for j, letter in enumerate(word):
            if len(letter) != 2:
                raise PresentationError(f"{path}[{j}]", "expected [name, exponent]")
            g, e = letter
            if g not in names:
                raise PresentationError(f"{path}[{j}]", f"unknown generator {g!r}")
            if not isinstance(e, int) or isinstance(e, bool):
                raise PresentationError(f"{path}[{j}]", "exponent must be an integer")

    def _word_indices(self, word):
        return [(self.index[g], int(e)) for g, e in word]

    # -- structure -----------------------------------------------------------

    def structural_problems(self) -> list[str]:
        """Violations of the weighted-presentation rules (empty if none)."""
        out = []
        for i in range(1, self.n):
            if self.weights[i] < self.weights[i - 1]:
                out.append(f"weight-monotonicity: {self.names[i]} (weight {self.weights[i]}) follows "
                           f"{self.names[i - 1]} (weight {self.weights[i - 1]})")
        for k, word in self.power_words.items():
            for g, e in word:
                if e and g <= k:
                    out.append(f"power relation of {self.names[k]} uses {self.names[g]}, which is not a later generator")
        for a, b, word in self.comm_words:
            need = self.weights[a] + self.weights[b]
            for g, e in word:
                if not e:
                    continue
                if g <= max(a, b):
                    out.append(f"commutator [{self.names[a]},{self.names[b]}] uses {self.names[g]}, "
                               f"which is not later than both arguments")
                elif self.weights[g] < need:
                    out.append(f"commutator [{self.names[a]},{self.names[b]}] uses {self.names[g]} of weight "
                               f"{self.weights[g]} < {need}")
        return out

    @cached_property
    def collector(self):
        return self.build_collector(_kernel.Collector)

    def build_collector(self, cls):
        """A fresh collector of type ``cls`` (one of the kernel backends)."""
        problems = self.structural_problems()
        if problems:
            raise PresentationError("", "; ".join(problems))
        # Relation words for generator j only involve later generators, so
        # they can be collected by the collector for the relations deeper
        # than j. Build those collectors from the bottom up.
        by_depth = {k: [] for k in range(self.n)}
        for k, word in self.power_words.items():
            by_depth[k].append(("power", k, word))
        for a, b, word in self.comm_words:
            by_depth[min(a, b)].append(("comm", (a, b), word))
        powers, comms = {}, {}
        partial = cls(self.orders, {}, {})
        for j in range(self.n - 1, -1, -1):
            if not by_depth[j]:
                continue
            for kind, key, word in by_depth[j]:
                w = partial.collect(word)
                if kind == "power":
                    powers[key] = w
                else:
                    a, b = key
                    comms[(a, b) if a > b else (b, a)] = w if a > b else partial.inv(w)
            partial = cls(self.orders, powers, comms)
        return partial

    # -- elements ---------------------------------------------------------------

    def element(self, exps: Sequence[int]) -> "Element":
        if len(exps) != self.n:
            raise ValueError(f"expected {self.n} exponents")
        # normalise exponents outside [0, order)
        x = self.collector.identity
        for k, e in enumerate(exps):
            if e:
                x = self.collector.mul_gen(x, k, int(e))
        return Element(self, x)

    def _wrap(self, exps) -> "Element":
        return Element(self, exps)

    def identity(self) -> "Element":
        return Element(self, self.collector.identity)

    def gen(self, k) -> "Element":
        if isinstance(k, str):
            k = self.index[k]
        return Element(self, self.collector._unit[k] if hasattr(self.collector, "_unit")
                       else tuple(int(i == k) for i in range(self.n)))

    def gens(self) -> list["Element"]:
        return [self.gen(k) for k in range(self.n)]

    def collect(self, word) -> "Element":
        """Normal form of a word of ``(name or index, exponent)`` pairs."""
        idx = [(self.index[g] if isinstance(g, str) else g, int(e)) for g, e in word]
        return Element(self, self.collector.collect(idx))

    def weight_gens(self, w: int) -> list[int]:
        return [k for k in range(self.n) if self.weights[k] == w]

    def top_gens(self) -> list[int]:
        """Indices of weight-1 generators (they generate the group)."""
        return self.weight_gens(1)

    @property
    def nilpotency_class(self) -> int:
        return max(self.weights, default=0)

    @property
    def is_finite(self) -> bool:
        return all(self.orders)

    def order(self) -> int | None:
        if not self.is_finite:
            return None
        out = 1
        for o in self.orders:
            out *= o
        return out

    def all_elements(self):
        """Every normal form of a finite presentation, lexicographically."""
        if not self.is_finite:
            raise ValueError("infinite group")
        vecs = [()]
        for o in self.orders:
            vecs = [v + (e,) for v in vecs for e in range(o)]
        return [Element(self, v) for v in vecs]

    # -- JSON -------------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "generators": [{"name": n, "weight": w, "order": o}
                           for n, w, o in zip(self.names, self.weights, self.rel_orders)],
            "powers": {k: [[g, e] for g, e in w] for k, w in self._raw_powers.items()},
            "commutators": [{"left": a, "right": b, "word": [[g, e] for g, e in w]}
                            for a, b, w in self._raw_comms],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PcPresentation":
        gens = [(g["name"], g["weight"], g["order"]) for g in data["generators"]]
        powers = {k: [tuple(l) for l in w] for k, w in data.get("powers", {}).items()}
        comms = [(c["left"], c["right"], [tuple(l) for l in c["word"]]) for c in data.get("commutators", [])]
        return cls(gens, powers, comms)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)

    def __eq__(self, other):
        return isinstance(other, PcPresentation) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(self.dumps())

    def __repr__(self):
        return f"PcPresentation({', '.join(self.names)})"


class Element:
    """An element in normal form ``prod g_k^{e_k}``."""

    __slots__ = ("pres", "exps")

    def __init__(self, pres: PcPresentation, exps: tuple):
        self.pres = pres
        self.exps = exps

    def __mul__(self, other: "Element") -> "Element":
        return Element(self.pres, self.pres.collector.mul(self.exps, other.exps))

    def __invert__(self) -> "Element":
        return Element(self.pres, self.pres.collector.inv(self.exps))

    def inverse(self) -> "Element":
        return ~self

    def __pow__(self, m: int) -> "Element":
        return Element(self.pres, self.pres.collector.pow(self.exps, m))

    def __eq__(self, other):
        return isinstance(other, Element) and self.exps == other.exps and self.pres is other.pres

    def __hash__(self):
        return hash(self.exps)

    def is_identity(self) -> bool:
        return not any(self.exps)

    def depth(self) -> int | None:
        for k, e in enumerate(self.exps):
            if e:
                return k
        return None

    def word(self) -> list:
        return [[self.pres.names[k], e] for k, e in enumerate(self.exps) if e]

    def __repr__(self):
        if not any(self.exps):
            return "1"
        return "*".join(n if e == 1 else f"{n}^{e}" for n, e in self.word())


def commutator(a: Element, b: Element) -> Element:
    """``[a, b] = a b a^-1 b^-1``."""
    return Element(a.pres, a.pres.collector.comm(a.exps, b.exps))


def collect(pres: PcPresentation, word) -> Element:
    return pres.collect(word)


# ---------------------------------------------------------------------------
# consistency


def consistency_check(pres: PcPresentation) -> list[str]:
    """Empty list iff the presentation is consistent.

    Structural problems (weights, generator order in relations) are reported
    first; otherwise the standard overlap test words are collected two ways
    and the first disagreement is reported.
    """
    problems = pres.structural_problems()
    if problems:
        return problems
    c = pres.collector
    n = pres.n
    u = [tuple(int(i == k) for i in range(n)) for k in range(n)]
    o = pres.orders

    def power(k, m):
        return c.collect([(k, m)])

    tests = []
    for k in range(n):
        for j in range(k):
            for i in range(j):
                # (g_k g_j) g_i = g_k (g_j g_i)
                tests.append((f"({pres.names[k]}{pres.names[j]}){pres.names[i]}",
                              c.mul(c.mul(u[k], u[j]), u[i]), c.mul(u[k], c.mul(u[j], u[i]))))
    for j in range(n):
        for i in range(j):
            if o[j]:
                # g_j^o g_i = g_j^(o-1) (g_j g_i)
                tests.append((f"{pres.names[j]}^{o[j]}{pres.names[i]}",
                              c.mul(power(j, o[j]), u[i]), c.mul(power(j, o[j] - 1), c.mul(u[j], u[i]))))
            if o[i]:
                # (g_j g_i) g_i^(o-1) = g_j g_i^o
                tests.append((f"{pres.names[j]}{pres.names[i]}^{o[i]}",
                              c.mul(c.mul(u[j], u[i]), power(i, o[i] - 1)), c.mul(u[j], power(i, o[i]))))
            else:
                # g_j = (g_j g_i^-1) g_i
                tests.append((f"{pres.names[j]}{pres.names[i]}^-1{pres.names[i]}",
                              c.mul(c.mul(u[j], power(i, -1)), u[i]), u[j]))
                if not o[j]:
                    tests.append((f"{pres.names[j]}^-1{pres.names[i]}^-1{pres.names[i]}",
                                  c.mul(c.mul(power(j, -1), power(i, -1)), u[i]), power(j, -1)))
    for k in range(n):
        if o[k]:
            # g_k g_k^o = g_k^o g_k
            tests.append((f"{pres.names[k]}^{o[k] + 1}",
                          c.mul(u[k], power(k, o[k])), c.mul(power(k, o[k]), u[k])))
    # relations must hold as stated
    for k, word in pres.power_words.items():
        lhs = c.pow(u[k], o[k])
        rhs = c.collect(word)
        tests.append((f"{pres.names[k]}^{o[k]} relation", lhs, rhs))
    for a, b, word in pres.comm_words:
        tests.append((f"[{pres.names[a]},{pres.names[b]}] relation", c.comm(u[a], u[b]), c.collect(word)))
    for name, lhs, rhs in tests:
        if lhs != rhs:
            return [f"inconsistent test word {name}: {_fmt(pres, lhs)} != {_fmt(pres, rhs)}"]
    return []


def _fmt(pres, exps):
    return repr(Element(pres, exps))


# ---------------------------------------------------------------------------
# subgroups


class Subgroup:
    """Subgroup stored as a reduced induced polycyclic sequence.

    ``table[d]`` is the unique subgroup element of depth ``d`` with minimal
    positive leading exponent whose coordinates at deeper table depths are
    reduced; ``None`` where no element of that depth exists.
    """

    def __init__(self, pres: PcPresentation, table: list):
        self.pres = pres
        self.table = tuple(table)

    @property
    def gens(self) -> list[Element]:
        return [Element(self.pres, t) for t in self.table if t is not None]

    def leading(self, d: int) -> int | None:
        t = self.table[d]
        return None if t is None else t[d]

    def coset_rep(self, g) -> Element:
        """Canonical representative of the left coset ``g*S``."""
        return Element(self.pres, self._reduce(g.exps if isinstance(g, Element) else g))

    def _reduce(self, x):
        c = self.pres.collector
        for d, b in enumerate(self.table):
            if b is None or not x[d]:
                continue
            q = x[d] // b[d]
            if q:
                x = c.mul(x, c.pow(b, -q))
        return x

    def __contains__(self, g) -> bool:
        return not any(self._reduce(g.exps if isinstance(g, Element) else g))

    def index(self) -> int | None:
        out = 1
        for d, b in enumerate(self.table):
            if b is None:
                if not self.pres.orders[d]:
                    return None
                out *= self.pres.orders[d]
            else:
                out *= b[d]
        return out

    def order(self) -> int | None:
        out = 1
        for d, b in enumerate(self.table):
            if b is None:
                continue
            o = self.pres.orders[d]
            if not o:
                return None
            out *= o // b[d]
        return out

    def is_trivial(self) -> bool:
        return all(b is None for b in self.table)

    def issubset(self, other: "Subgroup") -> bool:
        return all(g in other for g in self.gens)

    def is_normal(self) -> bool:
        c = self.pres.collector
        for b in self.gens:
            for k in range(self.pres.n):
                g = self.pres.gen(k).exps
                if c.mul(c.mul(c.inv(g), b.exps), g) not in self:
                    return False
        return True

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.pres is other.pres and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def __repr__(self):
        return f"Subgroup<{', '.join(map(repr, self.gens)) or '1'}>"

    def to_json(self) -> list:
        return [g.word() for g in self.gens]


def _close(pres: PcPresentation, seeds: Iterable, normal: bool = False) -> Subgroup:
    c = pres.collector
    n = pres.n
    orders = pres.orders
    table: list = [None] * n
    ident = c.identity
    gen_pairs = []
    if normal:
        for k in range(n):
            g = pres.gen(k).exps
            gen_pairs.append((g, c.inv(g)))

    queue = [s.exps if isinstance(s, Element) else tuple(s) for s in seeds]

    def depth(x):
        for k, e in enumerate(x):
            if e:
                return k
        return None

    def consequences(b, d):
        # elements that must lie in the subgroup once b is an entry at depth d
        out = []
        if orders[d]:
            out.append(c.pow(b, orders[d] // b[d]))
        binv = c.inv(b)
        for e in table:
            if e is None or e is b:
                continue
            out.append(c.mul(c.mul(binv, e), b))
            out.append(c.mul(c.mul(b, e), binv))
        for g, ginv in gen_pairs:
            out.append(c.mul(c.mul(ginv, b), g))
        return out

    def install(d, b):
        table[d] = b
        queue.extend(consequences(b, d))

    def sift(h) -> bool:
        """Sift h into the table; True if the table changed."""
        while True:
            d = depth(h)
            if d is None:
                return False
            a = h[d]
            o = orders[d]
            b = table[d]
            if b is None:
                if o:
                    g = gcd(a, o)
                    if g != a:
                        _, s, _ = xgcd(a, o)
                        s %= o
                        h2 = c.pow(h, s)
                        queue.append(c.mul(h, c.pow(h2, -(a // g))))
                        h = h2
                elif a < 0:
                    h = c.inv(h)
                install(d, h)
                return True
            beta = b[d]
            if a % beta == 0:
                h = c.mul(h, c.pow(b, -(a // beta)))
                continue
            g, s, t = xgcd(a, beta)
            nb = c.mul(c.pow(h, s), c.pow(b, t))
            if o:
                # leading coordinate of nb is g mod o; normalise to g
                pass
            queue.append(c.mul(h, c.pow(nb, -(a // g))))
            queue.append(c.mul(b, c.pow(nb, -(beta // g))))
            install(d, nb)
            return True

    while True:
        while queue:
            sift(queue.pop())
        # verification round on the current table
        changed = False
        for d, b in enumerate(table):
            if b is None:
                continue
            for x in consequences(b, d):
                if sift(x):
                    changed = True
        if not changed and not queue:
            break
    # reduce entries
    for d in range(n):
        b = table[d]
        if b is None:
            continue
        for d2 in range(d + 1, n):
            b2 = table[d2]
            if b2 is None or not b[d2]:
                continue
            q = b[d2] // b2[d2]
            if q:
                b = c.mul(b, c.pow(b2, -q))
        table[d] = b
    return Subgroup(pres, table)


def subgroup(pres: PcPresentation, gens: Iterable) -> Subgroup:
    """Subgroup generated by ``gens`` in canonical form."""
    return _close(pres, gens)


def normal_closure(pres: PcPresentation, gens: Iterable) -> Subgroup:
    return _close(pres, gens, normal=True)


def whole_group(pres: PcPresentation) -> Subgroup:
    return subgroup(pres, pres.gens())


def trivial_subgroup(pres: PcPresentation) -> Subgroup:
    return Subgroup(pres, [None] * pres.n)


def join(*subs: Subgroup) -> Subgroup:
    pres = subs[0].pres
    return subgroup(pres, [g for s in subs for g in s.gens])


def weight_segment(pres: PcPresentation, w: int) -> Subgroup:
    """Subgroup generated by the generators of weight >= w."""
    return subgroup(pres, [pres.gen(k) for k in range(pres.n) if pres.weights[k] >= w])


def lower_central_series(pres: PcPresentation) -> list[Subgroup]:
    """``[gamma_1, gamma_2, ...]`` up to the first trivial term (excluded).

    Computed by commutator closure only, never from the declared weights.
    """
    out = []
    cur = whole_group(pres)
    top = [pres.gen(k) for k in range(pres.n)]
    while not cur.is_trivial():
        out.append(cur)
        cur = normal_closure(pres, [commutator(g, h) for g in top for h in cur.gens])
    return out


@dataclass(frozen=True)
class Layer:
    """``gamma_i G / gamma_{i+1} G`` with coordinates."""

    weight: int
    group: AbelianGroup
    indices: tuple  # generator indices of this weight
    pres: PcPresentation

    def project(self, x: Element) -> tuple:
        return self.group.encode([x.exps[k] for k in self.indices])

    def lift(self, c) -> Element:
        user = self.group.decode(c)
        return self.pres.collect([(k, e) for k, e in zip(self.indices, user)])

    def in_next(self, x: Element) -> bool:
        """True if x (assumed in gamma_i) lies in gamma_{i+1}."""
        return not any(x.exps[: self.indices[-1] + 1]) if self.indices else True


def layer(pres: PcPresentation, w: int) -> Layer:
    idx = tuple(pres.weight_gens(w))
    pos = {k: i for i, k in enumerate(idx)}
    rels = []
    for k in idx:
        o = pres.orders[k]
        if not o:
            continue
        row = [0] * len(idx)
        row[pos[k]] += o
        tail = pres.collector.pow(pres.gen(k).exps, o)
        for k2 in idx:
            row[pos[k2]] -= tail[k2]
        rels.append(row)
    return Layer(w, AbelianGroup(len(idx), rels), idx, pres)


def lcs_layers(pres: PcPresentation, verify: bool = True) -> list[Layer]:
    """Layers ``gamma_i/gamma_{i+1}`` for ``i = 1..K``.

    With ``verify`` the series is recomputed by commutator closure and checked
    against the weight segments; a mismatch raises :class:`PresentationError`.
    """
    K = pres.nilpotency_class
    if verify:
        series = lower_central_series(pres)
        expected = [weight_segment(pres, w) for w in range(1, K + 1)]
        expected = [s for s in expected if not s.is_trivial()]
        if series != expected:
            raise PresentationError("", "declared weights do not match the lower central series")
    layers = [layer(pres, w) for w in range(1, K + 1)]
    while layers and layers[-1].group.is_trivial():
        layers.pop()
    return layers


def nilpotency_class(pres: PcPresentation) -> int:
    return len(lower_central_series(pres))


def abelianization(pres: PcPresentation) -> Layer:
    return layer(pres, 1)


# ---------------------------------------------------------------------------
# kernels, meets and quotients


def kernel_to_abelian(pres: PcPresentation, sub: Subgroup, fn: Callable[[Element], Sequence[int]],
                      target: AbelianGroup) -> Subgroup:
    """Kernel of a homomorphism from ``sub`` to an abelian group.

    ``fn`` must be a homomorphism on ``sub`` returning canonical coordinates.
    """
    gens = sub.gens
    if not gens:
        return sub
    vecs = [list(target.reduce(fn(b))) for b in gens]
    rel = target.relation_rows()
    rows = vecs + [list(r) for r in rel]
    ker = kernel_rows(rows, target.ncanon) if target.ncanon else [
        tuple(int(i == j) for j in range(len(rows))) for i in range(len(rows))]
    seeds = []
    for v in ker:
        coeffs = v[: len(gens)]
        x = pres.identity()
        for b, e in zip(gens, coeffs):
            if e:
                x = x * b ** e
        seeds.append(x)
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            seeds.append(commutator(a, b))
    return subgroup(pres, seeds)


def express_in_subgroup(sub: Subgroup, fn, target: AbelianGroup, value) -> Element | None:
    """Some ``x`` in ``sub`` with ``fn(x) == value``, or None.

    The first solution in the canonical order of the HNF solve is returned.
    """
    from .zlinalg import solve_rows
    gens = sub.gens
    vecs = [list(target.reduce(fn(b))) for b in gens]
    rows = vecs + [list(r) for r in target.relation_rows()]
    if not rows:
        return sub.pres.identity() if not any(value) else None
    sol = solve_rows(rows, list(target.reduce(value)), target.ncanon)
    if sol is None:
        return None
    x = sub.pres.identity()
    for b, e in zip(gens, sol[: len(gens)]):
        if e:
            x = x * b ** e
    return x


def schreier_kernel(pres: PcPresentation, act: Callable, start, gens: Sequence[Element], budget: int = 10**6):
    """Stabiliser of ``start`` for a left action with finite orbit.

    ``act(g, point)`` returns the image point (hashable). Returns the
    stabiliser subgroup and the orbit size.
    """
    orbit = {start: pres.identity()}
    order = [start]
    schreier = []
    i = 0
    while i < len(order):
        p = order[i]
        t = orbit[p]
        for g in gens:
            q = act(g, p)
            if q not in orbit:
                if len(orbit) >= budget:
                    raise EnumerationBudgetExceeded("orbit enumeration", len(orbit) + 1, budget)
                orbit[q] = g * t
                order.append(q)
            else:
                s = ~orbit[q] * g * t
                if not s.is_identity():
                    schreier.append(s)
        i += 1
    return subgroup(pres, schreier), len(orbit)


def meet(a: Subgroup, b: Subgroup) -> Subgroup:
    """Intersection of two subgroups, at least one of finite index."""
    if b.index() is None:
        a, b = b, a
    if b.index() is None:
        raise ValueError("meet needs one subgroup of finite index")
    pres = a.pres
    start = b.coset_rep(pres.identity()).exps
    gens = a.gens
    if not gens:
        return a
    sub, _ = schreier_kernel(pres, lambda g, p: b._reduce(pres.collector.mul(g.exps, p)), start, gens)
    return sub


def kernel_of_map(pres: PcPresentation, images: Sequence, mul: Callable, identity, budget: int = 10**6):
    """Kernel of the homomorphism sending generator ``k`` to ``images[k]``.

    The target must be finite; ``mul`` multiplies target elements. Returns the
    kernel and the order of the image.
    """
    gens = pres.gens()
    imgs = list(images)
    idx = {id(g): k for k, g in enumerate(gens)}

    def act(g, p):
        return mul(imgs[idx[id(g)]], p)

    return schreier_kernel(pres, act, identity, gens, budget)


def preimage_subgroup(proj, sub: Subgroup) -> Subgroup:
    """Preimage under a quotient projection of a subgroup of the target."""
    return join(proj.kernel, subgroup(proj.source, [proj.lift(g) for g in sub.gens]))


def quotient(pres: PcPresentation, normal: Subgroup, check: bool = True):
    """``(Q, projection)`` for ``G/N``.

    The projection is a :class:`nilcsp.morphism.Projection` with a kernel,
    a section and fast evaluation through canonical coset representatives.
    """
    from .morphism import Projection

    if check and not normal.is_normal():
        raise NotNormal("subgroup is not normal")
    keep = []
    new_orders = []
    for d in range(pres.n):
        b = normal.table[d]
        if b is None:
            keep.append(d)
            new_orders.append(pres.rel_orders[d])
        elif b[d] != 1:
            keep.append(d)
            new_orders.append(b[d])
    c = pres.collector

    def coords(x):
        r = normal._reduce(x)
        return [(pres.names[d], r[d]) for d in keep if r[d]]

    gens = [(pres.names[d], pres.weights[d], o) for d, o in zip(keep, new_orders)]
    powers = {}
    for d, o in zip(keep, new_orders):
        if o:
            w = coords(c.pow(pres.gen(d).exps, o))
            if w:
                powers[pres.names[d]] = w
    comms = []
    for i, d in enumerate(keep):
        for d2 in keep[i + 1:]:
            w = coords(c.comm(pres.gen(d2).exps, pres.gen(d).exps))
            if w:
                comms.append((pres.names[d2], pres.names[d], w))
    q = PcPresentation(gens, powers, comms)
    return q, Projection(pres, q, normal, tuple(keep))


def power_subgroup(pres: PcPresentation, e: int, budget: int = DEFAULT_POWER_BUDGET) -> Subgroup:
    """The verbal subgroup ``G^e`` generated by all e-th powers."""
    if e == 1:
        return whole_group(pres)
    h = normal_closure(pres, [pres.gen(k) ** e for k in range(pres.n)])
    size = h.index()
    if size is None or size > budget:
        raise EnumerationBudgetExceeded("power_subgroup intermediate quotient", size, budget)
    q, proj = quotient(pres, h, check=False)
    powers = {x ** e for x in q.all_elements()}
    t = subgroup(q, [p for p in powers if not p.is_identity()])
    return preimage_subgroup(proj, t)


def H_subgroup(pres: PcPresentation, i: int, layers: list[Layer] | None = None) -> Subgroup:
    """``H_i = {x : [x, y] in gamma_{i+1} G for all y}``; ``H_K`` is the centre."""
    K = pres.nilpotency_class
    if not 1 <= i <= max(K, 1):
        raise ValueError(f"level {i} out of range 1..{K}")
    return H_series(pres, layers)[i - 1]


def H_series(pres: PcPresentation, layers: list[Layer] | None = None) -> list[Subgroup]:
    """``[H_1, ..., H_K]`` computed by successive kernels.

    ``H_{i+1}`` is the kernel of ``H_i -> Hom(G_ab, gamma_{i+1}/gamma_{i+2})``,
    ``x -> [x, .]``, evaluated on the weight-one generators.
    """
    if layers is None:
        layers = [layer(pres, w) for w in range(1, pres.nilpotency_class + 1)]
    K = len(layers)
    top = [pres.gen(k) for k in pres.top_gens()]
    out = [whole_group(pres)]
    for i in range(1, K):
        lay = layers[i]
        target = AbelianGroup.from_orders([d for _ in top for d in lay.group.factors])

        def fn(x, lay=lay):
            return [c for g in top for c in lay.project(commutator(x, g))]

        out.append(kernel_to_abelian(pres, out[-1], fn, target))
    return out


def centre(pres: PcPresentation) -> Subgroup:
    return H_series(pres)[-1] if pres.nilpotency_class else whole_group(pres)


def normal_core(pres: PcPresentation, sub: Subgroup) -> Subgroup:
    """Largest normal subgroup contained in a finite-index subgroup."""
    reps = [sub.coset_rep(pres.identity())]
    seen = {reps[0].exps}
    i = 0
    gens = pres.gens()
    while i < len(reps):
        for g in gens:
            r = sub.coset_rep(g * reps[i])
            if r.exps not in seen:
                seen.add(r.exps)
                reps.append(r)
        i += 1
    core = sub
    for t in reps[1:]:
        ti = ~t
        conj = subgroup(pres, [t * b * ti for b in sub.gens])
        core = meet(core, conj)
    return core
