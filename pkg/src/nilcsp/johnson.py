"""Johnson filtration machinery: derivations, the modules D_i and outer levels.

Levels follow the lower central series: an automorphism is at level ``i``
when it acts trivially on ``G/gamma_{i+1}``, and its derivation at that level
is ``x -> Phi(x) x^-1`` viewed as a map ``G_ab -> gamma_{i+1}/gamma_{i+2}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import LevelOutOfRange, NotInFiltrationLevel
from .morphism import Automorphism, ad
from .pcgroup import Element, H_series, PcPresentation, layer
from .zlinalg import AbelianGroup, HomGroup, Submodule, hom_group


@dataclass(frozen=True)
class Derivation:
    level: int
    hom: HomGroup
    value: tuple

    def __add__(self, other: "Derivation") -> "Derivation":
        if self.level != other.level:
            raise ValueError("derivations at different levels")
        return Derivation(self.level, self.hom, self.hom.add(self.value, other.value))

    def scale(self, k: int) -> "Derivation":
        return Derivation(self.level, self.hom, self.hom.scale(k, self.value))

    def is_zero(self) -> bool:
        return not any(self.value)

    def evaluate(self, x) -> tuple:
        """Apply to a canonical element of the abelianization."""
        return self.hom.evaluate(self.value, x)

    def matrix(self) -> list[list[int]]:
        return self.hom.matrix_of(self.value)


class _Levels:
    """Per-presentation cache of layers, Hom groups and H_i."""

    def __init__(self, pres: PcPresentation):
        self.pres = pres
        self.K = pres.nilpotency_class
        self.layers = [layer(pres, w) for w in range(1, self.K + 1)]
        self.ab = self.layers[0]
        self._homs = {}
        self._H = None
        self.modules = {}

    def hom(self, i: int) -> HomGroup:
        if i not in self._homs:
            self._homs[i] = hom_group(self.ab.group, self.layers[i].group)
        return self._homs[i]

    @property
    def H(self):
        if self._H is None:
            self._H = H_series(self.pres, self.layers)
        return self._H


def _levels(pres: PcPresentation) -> _Levels:
    lv = pres.__dict__.get("_johnson_levels")
    if lv is None:
        lv = pres.__dict__["_johnson_levels"] = _Levels(pres)
    return lv


def _check_level(lv: _Levels, i: int):
    if lv.K < 2:
        raise LevelOutOfRange("abelian group: no Johnson levels (class must be at least 2)")
    if not 1 <= i <= lv.K - 1:
        raise LevelOutOfRange(f"level {i} outside 1..{lv.K - 1}")


def acts_trivially_mod(a: Automorphism, w: int) -> bool:
    """True if ``a`` is the identity on ``G/gamma_w`` (checked on weight-one generators)."""
    pres = a.pres
    for k in pres.top_gens():
        g = pres.gen(k)
        r = a(g) * ~g
        if any(e for d, e in enumerate(r.exps) if pres.weights[d] < w):
            return False
    return True


def delta_bar(a: Automorphism, i: int) -> Derivation:
    """The derivation ``x -> Phi(x) x^-1`` at level ``i``."""
    lv = _levels(a.pres)
    _check_level(lv, i)
    if not acts_trivially_mod(a, i + 1):
        raise NotInFiltrationLevel(i)
    ab, target = lv.ab, lv.layers[i]
    rows = []
    for c in range(ab.group.ncanon):
        u = ab.lift([int(j == c) for j in range(ab.group.ncanon)])
        rows.append(list(target.project(a(u) * ~u)))
    hom = lv.hom(i)
    return Derivation(i, hom, hom.from_matrix(rows))


@dataclass
class JohnsonModule:
    """``D_i = Hom(G_ab, gamma_{i+1}/gamma_{i+2})`` modulo inner derivations."""

    level: int
    hom: HomGroup
    inner: Submodule
    inner_sources: list  # H_i generators, aligned with inner.generators
    group: AbelianGroup = field(init=False)

    def __post_init__(self):
        self.group = self.inner.quotient()

    def project(self, d: Derivation) -> tuple:
        return self.group.encode(d.value)

    def witness(self, d: Derivation) -> Element | None:
        """Some ``x`` in ``H_i`` with ``delta_bar(ad_x) == d``, or None."""
        coeffs = self.inner.express(d.value)
        if coeffs is None:
            return None
        pres = self.inner_sources[0].pres if self.inner_sources else None
        if pres is None:
            return None
        x = pres.identity()
        for h, e in zip(self.inner_sources, coeffs):
            if e:
                x = x * h ** e
        return x


def d_module(pres: PcPresentation, i: int) -> JohnsonModule:
    lv = _levels(pres)
    _check_level(lv, i)
    if i not in lv.modules:
        hom = lv.hom(i)
        sources = lv.H[i - 1].gens
        inner = Submodule(hom, [delta_bar(ad(pres, h), i).value for h in sources])
        lv.modules[i] = JohnsonModule(i, hom, inner, sources)
    return lv.modules[i]


def johnson_delta(a: Automorphism, i: int) -> tuple:
    """Class of ``delta_bar(a, i)`` in ``D_i`` (canonical coordinates)."""
    return d_module(a.pres, i).project(delta_bar(a, i))


@dataclass
class OuterLevel:
    level: int
    representative: Automorphism
    trivial: bool
    witnesses: list  # conjugators removed at each level, in order

    @property
    def in_last(self) -> bool:
        return self.level >= self.representative.pres.nilpotency_class - 1


def outer_level(a: Automorphism) -> OuterLevel:
    """Deepest filtration term containing the outer class of ``a``.

    ``level == 0`` means the class acts nontrivially on the abelianization.
    Otherwise the representative is adjusted by inner automorphisms one level
    at a time; a trivial outer class reaches ``level == K`` with ``trivial``.
    """
    pres = a.pres
    K = pres.nilpotency_class
    if not acts_trivially_mod(a, 2):
        return OuterLevel(0, a, False, [])
    cur = a
    witnesses = []
    for i in range(1, K):
        d = delta_bar(cur, i)
        if d.is_zero():
            witnesses.append(pres.identity())
            continue
        x = d_module(pres, i).witness(d)
        if x is None:
            return OuterLevel(i, cur, False, witnesses)
        cur = cur * ad(pres, x).inv()
        witnesses.append(x)
    if not cur.is_identity():  # pragma: no cover - guarded by the level argument
        raise AssertionError("adjusted representative is not the identity")
    return OuterLevel(K, cur, True, witnesses)


def last_level(pres: PcPresentation) -> int:
    """Index of the last nontrivial filtration term, ``K - 1``."""
    return pres.nilpotency_class - 1


def johnson_table(pres: PcPresentation) -> list[dict]:
    rows = []
    for i in range(1, pres.nilpotency_class):
        m = d_module(pres, i)
        rows.append({
            "level": i,
            "hom": m.hom.describe(),
            "inner_rank": m.hom.rank - m.group.rank,
            "D": m.group.describe(),
        })
    return rows

