"""Homomorphisms, automorphisms and finite quotients of pc groups."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .errors import (EnumerationBudgetExceeded, KernelNotInvariant, NotBijectiveOnAbelianization,
                     RelationViolated)
from .pcgroup import Element, PcPresentation, Subgroup, layer, quotient
from .zlinalg import solve_rows

DEFAULT_INNER_BUDGET = 10**6

CHARACTERISTIC_VERBAL = "verbal"
CHARACTERISTIC_VERIFIED = "verified"
CHARACTERISTIC_UNVERIFIED = "unverified"


class GroupHom:
    """Homomorphism given by the images of the source generators."""

    def __init__(self, source: PcPresentation, target: PcPresentation, images: Sequence, check: bool = True):
        self.source = source
        self.target = target
        self.images = tuple(im.exps if isinstance(im, Element) else tuple(im) for im in images)
        if len(self.images) != source.n:
            raise ValueError(f"expected {source.n} images, got {len(self.images)}")
        if check:
            self.check_relations()

    def _apply(self, x: tuple) -> tuple:
        c = self.target.collector
        res = c.identity
        for k, e in enumerate(x):
            if e:
                res = c.mul(res, c.pow(self.images[k], e))
        return res

    def __call__(self, x: Element) -> Element:
        return Element(self.target, self._apply(x.exps))

    def _apply_word(self, word) -> tuple:
        c = self.target.collector
        res = c.identity
        for k, e in word:
            res = c.mul(res, c.pow(self.images[k], e))
        return res

    def check_relations(self):
        """Raise :class:`RelationViolated` naming the first broken relation."""
        src, c = self.source, self.target.collector
        names = src.names
        for k in range(src.n):
            o = src.orders[k]
            if o:
                lhs = c.pow(self.images[k], o)
                rhs = self._apply_word(src.power_words.get(k, []))
                if lhs != rhs:
                    raise RelationViolated(f"power relation {names[k]}^{o} is not preserved")
        stated = {}
        for a, b, word in src.comm_words:
            stated[(a, b)] = word
        for j in range(src.n):
            for i in range(j):
                lhs = c.comm(self.images[j], self.images[i])
                if (j, i) in stated:
                    rhs = self._apply_word(stated[(j, i)])
                elif (i, j) in stated:
                    rhs = c.inv(self._apply_word(stated[(i, j)]))
                else:
                    rhs = c.identity
                if lhs != rhs:
                    raise RelationViolated(f"commutator relation [{names[j]},{names[i]}] is not preserved")

    def image_words(self) -> dict:
        return {name: Element(self.target, im).word() for name, im in zip(self.source.names, self.images)}

    def __eq__(self, other):
        return (isinstance(other, GroupHom) and self.source is other.source
                and self.target is other.target and self.images == other.images)

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        parts = [f"{n}->{Element(self.target, im)!r}" for n, im in zip(self.source.names, self.images)]
        return f"GroupHom({', '.join(parts)})"


def hom_from_images(source: PcPresentation, target: PcPresentation, images) -> GroupHom:
    """Images may be Elements, exponent tuples, or words keyed by generator name.

    In the keyed form an omitted top generator is fixed (endomorphisms only)
    and an omitted deeper generator gets the image forced by the top ones.
    """
    if isinstance(images, dict):
        out = {}
        for k, name in enumerate(source.names):
            if name in images:
                out[k] = target.collect(images[name])
            elif source.weights[k] == 1:
                if source != target:
                    raise ValueError(f"no image given for {name!r}")
                out[k] = target.collect([(name, 1)])
        if len(out) < source.n:
            derived = extend_from_top(source, target, {k: out[k] for k in source.top_gens()})
            for k in range(source.n):
                out.setdefault(k, Element(target, derived[k]))
        images = [out[k] for k in range(source.n)]
    return GroupHom(source, target, images)


def _layer_spanners(pres: PcPresentation) -> dict:
    """Left-normed commutators of top generators spanning each LCS layer.

    A program is ``("gen", k)`` or ``("comm", k, program)`` for ``[g_k, program]``.
    """
    top = pres.top_gens()
    out = {1: [("gen", k) for k in top]}
    for w in range(2, pres.nilpotency_class + 1):
        out[w] = [("comm", t, p) for t in top for p in out[w - 1]]
    return out


def _run(prog, top_image, target: PcPresentation):
    if prog[0] == "gen":
        return top_image[prog[1]]
    a, b = top_image[prog[1]], _run(prog[2], top_image, target)
    return a * b * ~a * ~b


def extend_from_top(source: PcPresentation, target: PcPresentation, top_images: dict) -> list[tuple]:
    """Images of all generators of ``source`` determined by the top generators' images.

    Each generator is written as a product of iterated commutators of top
    generators (one layer at a time), and that product is evaluated on the
    given images. The result is not checked against the relations.
    """
    spanners = _layer_spanners(source)
    ident = {k: source.gen(k) for k in source.top_gens()}
    layers = {w: layer(source, w) for w in spanners}
    values = {w: [_run(p, ident, source) for p in progs] for w, progs in spanners.items()}
    rows = {w: [list(layers[w].project(v)) for v in values[w]] for w in spanners}
    imgs = {k: (v if isinstance(v, Element) else Element(target, tuple(v))) for k, v in top_images.items()}
    out = []
    for k in range(source.n):
        x, res = source.gen(k), target.identity()
        for w in range(source.weights[k], source.nilpotency_class + 1):
            lay = layers[w]
            if lay.group.ncanon == 0:
                continue
            c = _solve_layer(rows[w], lay, lay.project(x))
            if c is None:
                raise ValueError(f"{source.names[k]} is not generated by the top generators")
            for prog, v, e in zip(spanners[w], values[w], c):
                if e:
                    x = ~(v ** e) * x
                    res = res * _run(prog, imgs, target) ** e
        if not x.is_identity():
            raise ValueError(f"{source.names[k]} is not generated by the top generators")
        out.append(res.exps)
    return out


def compose(f: GroupHom, g: GroupHom) -> GroupHom:
    """``f . g`` (apply g first)."""
    return GroupHom(g.source, f.target, [f._apply(im) for im in g.images], check=False)


def identity_hom(pres: PcPresentation) -> GroupHom:
    return GroupHom(pres, pres, [pres.gen(k) for k in range(pres.n)], check=False)


class Projection(GroupHom):
    """Quotient map ``G -> G/N`` through canonical coset representatives."""

    def __init__(self, source: PcPresentation, target: PcPresentation, kernel: Subgroup, keep: tuple):
        self.kernel = kernel
        self.keep = keep
        self.source = source
        self.target = target
        self.images = tuple(self._apply(g.exps) for g in source.gens())

    def _apply(self, x: tuple) -> tuple:
        r = self.kernel._reduce(x)
        return tuple(r[d] for d in self.keep)

    def lift(self, y: Element) -> Element:
        """Section: the source element with the same normal-form exponents."""
        exps = [0] * self.source.n
        for d, e in zip(self.keep, y.exps):
            exps[d] = e
        return Element(self.source, tuple(exps))


class Automorphism:
    def __init__(self, forward: GroupHom, inverse: GroupHom):
        self.forward = forward
        self.inverse = inverse
        self.pres = forward.source

    def __call__(self, x: Element) -> Element:
        return self.forward(x)

    def __mul__(self, other: "Automorphism") -> "Automorphism":
        """``self * other`` applies ``other`` first."""
        return Automorphism(compose(self.forward, other.forward), compose(other.inverse, self.inverse))

    def inv(self) -> "Automorphism":
        return Automorphism(self.inverse, self.forward)

    def __pow__(self, m: int) -> "Automorphism":
        base = self if m >= 0 else self.inv()
        out = identity_aut(self.pres)
        for _ in range(abs(m)):
            out = out * base
        return out

    @property
    def images(self):
        return self.forward.images

    def is_identity(self) -> bool:
        return self.forward.images == tuple(g.exps for g in self.pres.gens())

    def __eq__(self, other):
        return isinstance(other, Automorphism) and self.forward == other.forward

    def __hash__(self):
        return hash(self.forward)

    def __repr__(self):
        return f"Automorphism({self.forward!r})"

    def to_json(self) -> dict:
        return {"images": self.forward.image_words(), "inverse_images": self.inverse.image_words()}


def identity_aut(pres: PcPresentation) -> Automorphism:
    h = identity_hom(pres)
    return Automorphism(h, h)


def automorphism_from_json(pres: PcPresentation, data: dict) -> Automorphism:
    fwd = hom_from_images(pres, pres, data["images"])
    if data.get("inverse_images") is not None:
        inv = hom_from_images(pres, pres, data["inverse_images"])
        a = Automorphism(fwd, inv)
        for g in pres.gens():
            if a.inverse(a.forward(g)) != g or a.forward(a.inverse(g)) != g:
                raise RelationViolated("inverse_images is not inverse to images")
        return a
    return as_automorphism(fwd)


def _layer_matrix(h: GroupHom, lay) -> list[list[int]]:
    """Matrix of the map induced by ``h`` on one LCS layer (canonical coordinates)."""
    rows = []
    for i in range(lay.group.ncanon):
        unit = [int(j == i) for j in range(lay.group.ncanon)]
        rows.append(list(lay.project(h(lay.lift(unit)))))
    return rows


def ab_matrix(h: GroupHom) -> list[list[int]]:
    """Induced map on the abelianization in canonical coordinates (row per basis vector)."""
    return _layer_matrix(h, layer(h.source, 1))


def _solve_layer(rows, lay, value):
    rel = [list(r) for r in lay.group.relation_rows()]
    sol = solve_rows(rows + rel, list(lay.group.reduce(value)), lay.group.ncanon)
    return None if sol is None else sol[: len(rows)]


def as_automorphism(h: GroupHom) -> Automorphism:
    """Promote an endomorphism to an automorphism, computing its inverse.

    Surjectivity on the abelianization is enough (nilpotent groups are
    Hopfian); the inverse image of each generator is built one LCS layer at
    a time.
    """
    pres = h.source
    if h.target is not pres:
        raise ValueError("automorphism needs source == target")
    layers = [layer(pres, w) for w in range(1, pres.nilpotency_class + 1)]
    mats = [_layer_matrix(h, lay) for lay in layers]
    ab = layers[0]
    for i in range(ab.group.ncanon):
        unit = [int(j == i) for j in range(ab.group.ncanon)]
        if _solve_layer(mats[0], ab, unit) is None:
            raise NotBijectiveOnAbelianization("induced map on the abelianization is not surjective")
    inv_images = []
    for g in pres.gens():
        y = pres.identity()
        for lay, mat in zip(layers, mats):
            r = ~h(y) * g
            if lay.group.ncanon == 0:
                continue
            c = _solve_layer(mat, lay, lay.project(r))
            if c is None:
                raise NotBijectiveOnAbelianization(f"no preimage in layer {lay.weight}")
            y = y * lay.lift(c)
        if h(y) != g:
            raise NotBijectiveOnAbelianization("inverse construction failed")
        inv_images.append(y)
    return Automorphism(h, GroupHom(pres, pres, inv_images, check=False))


def ad(pres: PcPresentation, x: Element) -> Automorphism:
    """Inner automorphism ``g -> x g x^-1``."""
    xi = ~x
    fwd = GroupHom(pres, pres, [x * g * xi for g in pres.gens()], check=False)
    inv = GroupHom(pres, pres, [xi * g * x for g in pres.gens()], check=False)
    return Automorphism(fwd, inv)


@dataclass
class FiniteQuotient:
    """A finite quotient ``G -> G/N`` with a characteristic tag."""

    source: PcPresentation
    kernel: Subgroup
    characteristic: str = CHARACTERISTIC_UNVERIFIED
    label: str = ""
    _built: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kernel.index() is None:
            raise ValueError("finite quotient needs a finite-index kernel")

    def _build(self):
        if self._built is None:
            self._built = quotient(self.source, self.kernel, check=False)
        return self._built

    @property
    def target(self) -> PcPresentation:
        return self._build()[0]

    @property
    def projection(self) -> Projection:
        return self._build()[1]

    def __call__(self, x: Element) -> Element:
        return self.projection(x)

    def order(self) -> int:
        return self.kernel.index()

    @cached_property
    def exponent(self) -> int:
        from math import lcm
        q = self.target
        out = 1
        for x in q.all_elements():
            out = lcm(out, element_order(x))
        return out

    def to_json(self) -> dict:
        return {
            "order": self.order(),
            "characteristic": self.characteristic,
            "kernel": self.kernel.to_json(),
            "presentation": self.target.to_json(),
            "map": self.projection.image_words(),
        }


def element_order(x: Element) -> int:
    """Order of an element of a finite pc group."""
    n = 1
    y = x
    while not y.is_identity():
        y = y * x
        n += 1
    return n


def induced_on_quotient(a: Automorphism, f: FiniteQuotient) -> Automorphism:
    """The automorphism of ``G/N`` induced by ``a`` (requires ``a(N) = N``)."""
    for b in f.kernel.gens:
        if a(b) not in f.kernel or a.inverse(b) not in f.kernel:
            raise KernelNotInvariant(f"image of kernel generator {b!r} leaves the kernel")
    q, proj = f.target, f.projection
    fwd = [proj(a(proj.lift(g))) for g in q.gens()]
    inv = [proj(a.inverse(proj.lift(g))) for g in q.gens()]
    return Automorphism(GroupHom(q, q, fwd, check=False), GroupHom(q, q, inv, check=False))


def is_inner_finite(a: Automorphism, budget: int = DEFAULT_INNER_BUDGET) -> Element | None:
    """First conjugator ``g`` (canonical order) with ``a = ad(g)``, else None."""
    pres = a.pres
    size = pres.order()
    if size is None:
        raise ValueError("is_inner_finite needs a finite group")
    if size > budget:
        raise EnumerationBudgetExceeded("innerness search", size, budget)
    gens = pres.gens()
    targets = [a(g) for g in gens]
    for x in pres.all_elements():
        xi = ~x
        if all(x * g * xi == t for g, t in zip(gens, targets)):
            return x
    return None
