"""Homology-level surface computations: transvections, multitwists, the
class-2 surface group and the intersection-number covering homomorphism.

Conventions: ``H_1`` has basis ``a_1, b_1, ..., a_g, b_g`` with
``<a_i, b_i> = +1``; a twist about a curve in class ``v`` acts by
``T_v(x) = x + <x, v> v``; matrices act on column vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from .errors import NotAbelianImage, NotIsotropic, NotPrimitive, NotSurjective, UnsupportedCurve
from .morphism import Automorphism, as_automorphism, hom_from_images
from .pcgroup import PcPresentation, commutator, lcs_layers, quotient, subgroup
from .zlinalg import (AbelianGroup, IntMatrix, Submodule, choose_M2, inverse_unimodular, kernel_rows,
                      lattice_meet, row_span_basis, solve_rows, xgcd)


@dataclass(frozen=True)
class SurfaceData:
    genus: int
    punctures: int = 0

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus must be at least 1")
        if self.punctures < 0:
            raise ValueError("punctures must be non-negative")

    @property
    def rank(self) -> int:
        return 2 * self.genus + max(self.punctures - 1, 0)

    def basis_names(self) -> list[str]:
        names = []
        for i in range(1, self.genus + 1):
            names += [f"a{i}", f"b{i}"]
        names += [f"p{j}" for j in range(1, self.rank - 2 * self.genus + 1)]
        return names

    def form(self) -> IntMatrix:
        """Intersection form; puncture classes span its radical."""
        n = self.rank
        rows = [[0] * n for _ in range(n)]
        for i in range(self.genus):
            rows[2 * i][2 * i + 1] = 1
            rows[2 * i + 1][2 * i] = -1
        return IntMatrix(rows, n)

    def pair(self, x: Sequence[int], y: Sequence[int]) -> int:
        g = self.genus
        return sum(x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i] for i in range(g))

    def basis_vector(self, name: str) -> tuple:
        return tuple(int(n == name) for n in self.basis_names())

    def require_closed(self):
        if self.punctures:
            raise UnsupportedCurve("only closed surfaces are supported here")


@dataclass(frozen=True)
class CurveClass:
    """A nonseparating class (primitive vector) or a separating curve of genus ``h``."""

    vector: tuple | None = None
    separating_genus: int | None = None

    @classmethod
    def nonseparating(cls, vector) -> "CurveClass":
        v = tuple(int(x) for x in vector)
        if _content(v) != 1:
            raise NotPrimitive(f"class {list(v)} is not primitive")
        return cls(vector=v)

    @classmethod
    def separating(cls, h: int) -> "CurveClass":
        return cls(separating_genus=h)

    @property
    def is_separating(self) -> bool:
        return self.vector is None

    def homology(self, s: SurfaceData) -> tuple:
        return (0,) * s.rank if self.is_separating else self.vector

    def to_json(self) -> dict:
        if self.is_separating:
            return {"type": "separating", "genus": self.separating_genus}
        return {"type": "nonseparating", "vector": list(self.vector)}

    @classmethod
    def from_json(cls, data: dict) -> "CurveClass":
        if data["type"] == "separating":
            return cls.separating(data["genus"])
        return cls.nonseparating(data["vector"])


def _content(v) -> int:
    out = 0
    for x in v:
        out = gcd(out, x)
    return out


def _mat_mul(a, b):
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)] for i in range(n)]


def transvection(s: SurfaceData, v: CurveClass | Sequence[int], power: int = 1) -> IntMatrix:
    """Matrix of ``x -> x + power*<x, v> v``; separating classes act trivially."""
    if not isinstance(v, CurveClass):
        v = CurveClass.nonseparating(v)
    n = s.rank
    vec = v.homology(s)
    cols = []
    for k in range(n):
        e = [int(i == k) for i in range(n)]
        c = s.pair(e, vec) * power
        cols.append([e[i] + c * vec[i] for i in range(n)])
    return IntMatrix([[cols[j][i] for j in range(n)] for i in range(n)], n)


def is_symplectic(s: SurfaceData, t: IntMatrix) -> bool:
    j = s.form()
    return t.transpose() @ j @ t == j


@dataclass
class MultitwistGroup:
    surface: SurfaceData
    generators: list  # (CurveClass, multiplicity)
    basis: IntMatrix | None = field(default=None)

    def matrices(self) -> list[IntMatrix]:
        return [transvection(self.surface, c, k) for c, k in self.generators]

    def check_disjoint(self):
        vecs = [c.homology(self.surface) for c, _ in self.generators]
        for i, v in enumerate(vecs):
            for j in range(i + 1, len(vecs)):
                p = self.surface.pair(v, vecs[j])
                if p:
                    raise NotIsotropic(f"generators {i} and {j} have pairing {p}")


def _saturate(rows, n):
    """Basis of ``(span rows ⊗ Q) ∩ Z^n``, the annihilator of the annihilator."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    ann = _annihilator(rows, n)
    if not ann:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    return [list(x) for x in row_span_basis(_annihilator(ann, n), n)]


def _annihilator(rows, n):
    """Integer basis of ``{x : r . x = 0 for all rows r}``."""
    cols = [[rows[i][j] for i in range(len(rows))] for j in range(n)]
    return [list(k) for k in kernel_rows(cols, len(rows))]


def _symplectic_reduce(s: SurfaceData, vecs):
    """Rearrange a basis of a unimodular sublattice into hyperbolic pairs."""
    n = s.rank
    vecs = [list(v) for v in vecs]
    out = []
    while vecs:
        c = vecs[0]
        vals = [s.pair(c, w) for w in vecs[1:]]
        coeffs = _unit_combination(vals)
        if coeffs is None:
            raise NotIsotropic("complement is not unimodular")
        d = [sum(k * w[i] for k, w in zip(coeffs, vecs[1:])) for i in range(n)]
        out += [c, d]

        def proj(x):
            xc, xd = s.pair(x, d), s.pair(c, x)
            return [x[i] - xd * d[i] - xc * c[i] for i in range(n)]

        rest = [proj(w) for w in vecs[1:]]
        vecs = [list(r) for r in row_span_basis(rest, n)]
    return out


def _unit_combination(vals):
    """Integers ``k`` with ``sum k_i vals_i == 1``, or None."""
    g, coeffs = 0, []
    for v in vals:
        g2, s, t = xgcd(g, v)
        coeffs = [s * c for c in coeffs] + [t]
        g = g2
    if g == -1:
        return [-c for c in coeffs]
    return coeffs if g == 1 else None


def unitriangular_basis(group: MultitwistGroup) -> IntMatrix:
    """Basis (as matrix columns) in which every generator is upper unitriangular.

    The isotropic span of the twist classes is saturated to ``e_1..e_r``,
    completed by dual classes ``f_1..f_r`` and a symplectic basis of the
    orthogonal complement, in the order ``e, complement, f``.
    """
    s = group.surface
    s.require_closed()
    group.check_disjoint()
    n = s.rank
    vecs = [c.homology(s) for c, _ in group.generators if not c.is_separating]
    es = _saturate(vecs, n)
    # dual vectors: <e_i, f_j> = delta_ij
    jrows = [[s.pair(e, [int(k == i) for k in range(n)]) for i in range(n)] for e in es]
    fs = []
    for j in range(len(es)):
        target = [int(i == j) for i in range(len(es))]
        cols = [[jrows[i][k] for i in range(len(es))] for k in range(n)]
        sol = solve_rows(cols, target, len(es))
        fs.append(list(sol))
    for j in range(len(fs)):
        for i in range(j):
            a = s.pair(fs[i], fs[j])
            fs[j] = [fs[j][k] + a * es[i][k] for k in range(n)]

    def proj(x):
        out = list(x)
        for e, f in zip(es, fs):
            xa, xb = s.pair(x, f), s.pair(e, x)
            out = [out[k] - xa * e[k] - xb * f[k] for k in range(n)]
        return out

    comp = row_span_basis([proj([int(i == k) for k in range(n)]) for i in range(n)], n)
    comp = _symplectic_reduce(s, comp)
    basis = es + comp + fs
    b = IntMatrix([[basis[j][i] for j in range(n)] for i in range(n)], n)
    if abs(b.det()) != 1:  # pragma: no cover - guarded by construction
        raise AssertionError("basis is not unimodular")
    group.basis = b
    return b


def in_basis(b: IntMatrix, t: IntMatrix) -> IntMatrix:
    """``b^-1 t b``."""
    return inverse_unimodular(b) @ t @ b


def is_upper_unitriangular(t: IntMatrix) -> bool:
    return all(t[i, j] == (1 if i == j else 0) for i in range(t.rows) for j in range(t.cols) if i >= j)


@dataclass
class MultitwistWitness:
    modulus: int
    quotient: str
    image_rank: int
    index: int


def _flat(t: IntMatrix) -> list[int]:
    n = t.rows
    return [t[i, j] - int(i == j) for i in range(n) for j in range(n)]


def multitwist_witness(group: MultitwistGroup, gamma: Sequence[Sequence[int]]) -> MultitwistWitness:
    """Modulus ``M*`` whose congruence kernel meets the image inside ``Gamma``.

    ``gamma`` lists exponent vectors over the generators spanning a
    finite-index subgroup of the (abelian) image.
    """
    try:
        group.check_disjoint()
    except NotIsotropic as exc:
        raise NotAbelianImage(str(exc)) from None
    s = group.surface
    n = s.rank
    big = n * n
    # disjoint twists commute and T_1 T_2 - I = (T_1 - I) + (T_2 - I)
    flats = [_flat(t) for t in group.matrices()]

    def image(vec):
        return [sum(k * f[i] for k, f in zip(vec, flats)) for i in range(big)]

    amb = AbelianGroup.free(big)
    img = Submodule(amb, flats)
    gam = Submodule(amb, [image(v) for v in gamma])
    if not gam.issubset(img):
        raise ValueError("Gamma is not inside the image")
    quo = AbelianGroup(len(img.basis), [_coords(img, b) for b in gam.basis])
    if quo.rank:
        raise ValueError("Gamma does not have finite index in the image")
    m1 = quo.exponent()
    m_star = choose_M2(amb, img, m1)
    # independent check: image ∩ M*·Z^big ⊆ Gamma
    meet = lattice_meet(list(img.basis), [[m_star * int(i == j) for j in range(big)] for i in range(big)], big)
    for row in meet:
        if row not in gam:
            raise AssertionError("congruence kernel leaves Gamma")  # pragma: no cover
    return MultitwistWitness(m_star, f"H_1(surface; Z/{m_star})", len(img.basis), quo.order())


def _coords(sub: Submodule, x):
    """Coordinates of ``x`` in the HNF basis of ``sub``."""
    sol = solve_rows(list(sub.basis), list(x), sub.ambient.ncanon)
    return sol


# ---------------------------------------------------------------------------
# class-2 surface group


def _class2_names(g: int) -> list[str]:
    names = []
    for i in range(1, g + 1):
        names += [f"a{i}", f"b{i}"]
    return names


def class2_surface_group(g: int) -> PcPresentation:
    """The genus-g surface group modulo the third term of its lower central series."""
    if g < 1:
        raise ValueError("genus must be at least 1")
    names = _class2_names(g)
    gens = [(nm, 1, None) for nm in names]
    comms = []
    for i, u in enumerate(names):
        for v in names[i + 1:]:
            gens.append((f"c_{u}_{v}", 2, None))
            comms.append((u, v, [(f"c_{u}_{v}", 1)]))
    free = PcPresentation(gens, {}, comms)
    rel = free.identity()
    for i in range(1, g + 1):
        rel = rel * commutator(free.gen(f"a{i}"), free.gen(f"b{i}"))
    q, _ = quotient(free, subgroup(free, [rel]))
    return q


STANDARD_TWISTS = ("a", "b", "sep")


def twist_action_class2(g: int, kind: str, index: int) -> Automorphism:
    """Action of a standard twist on ``NG_g``.

    ``kind`` is ``"a"`` or ``"b"`` (twist about ``a_index`` or ``b_index``)
    or ``"sep"`` (the separating curve cutting off the first ``index``
    handles). Twists about ``a_i`` send ``b_i -> b_i a_i^-1``; twists about
    ``b_i`` send ``a_i -> a_i b_i``. The separating twist conjugates the
    first ``index`` handles by the boundary word, which is central here.
    """
    pres = class2_surface_group(g)
    imgs = {nm: pres.gen(nm) for nm in _class2_names(g)}
    if kind == "a" and 1 <= index <= g:
        imgs[f"b{index}"] = pres.gen(f"b{index}") * ~pres.gen(f"a{index}")
    elif kind == "b" and 1 <= index <= g:
        imgs[f"a{index}"] = pres.gen(f"a{index}") * pres.gen(f"b{index}")
    elif kind == "sep" and 1 <= index < g:
        bd = pres.identity()
        for i in range(1, index + 1):
            bd = bd * commutator(pres.gen(f"a{i}"), pres.gen(f"b{i}"))
        for i in range(1, index + 1):
            for nm in (f"a{i}", f"b{i}"):
                imgs[nm] = bd * pres.gen(nm) * ~bd
    else:
        raise UnsupportedCurve(f"unsupported twist {kind}{index} in genus {g}")
    full = []
    for k in range(pres.n):
        nm = pres.names[k]
        if nm in imgs:
            full.append(imgs[nm])
        else:
            _, u, v = nm.split("_")
            full.append(commutator(imgs[u], imgs[v]))
    return as_automorphism(hom_from_images(pres, pres, full))


def twist_surface_data(g: int, kind: str, index: int) -> CurveClass:
    s = SurfaceData(g)
    if kind == "sep":
        return CurveClass.separating(index)
    return CurveClass.nonseparating(s.basis_vector(f"{kind}{index}"))


def separating_twist_report(g: int, h: int) -> dict:
    """Compare a crossing element before and after the separating twist.

    ``alpha = a_h a_{h+1}`` crosses the separating curve cutting off the first
    ``h`` handles. In the class-2 quotient the twist is conjugation by a
    central element, so ``alpha`` is fixed and the twist is trivial.
    """
    t = twist_action_class2(g, "sep", h)
    pres = t.pres
    alpha = pres.gen(f"a{h}") * pres.gen(f"a{h + 1}")
    image = t(alpha)
    return {
        "genus": g,
        "separating_genus": h,
        "alpha": alpha.word(),
        "image": image.word(),
        "moved": image != alpha,
        "twist_is_identity": t.is_identity(),
        "discrepancy": image == alpha,
    }


def layer_ranks(pres: PcPresentation) -> list[str]:
    return [lay.group.describe() for lay in lcs_layers(pres)]


# ---------------------------------------------------------------------------
# the covering homomorphism


@dataclass
class ThetaHom:
    surface: SurfaceData
    values: tuple  # value on each basis class, mod d
    d: int

    def __call__(self, x: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(self.values, x)) % self.d


def theta_hom(s: SurfaceData, curves: Sequence[CurveClass], d: int) -> ThetaHom:
    """``x -> sum_m <x, beta_m> mod d``; must be onto ``Z/d``."""
    if d < 1:
        raise ValueError("d must be positive")
    n = s.rank
    values = []
    for k in range(n):
        e = [int(i == k) for i in range(n)]
        values.append(sum(s.pair(e, c.homology(s)) for c in curves) % d)
    if gcd(d, *values) != 1 and d > 1:
        raise NotSurjective("intersection functional is not onto Z/d")
    return ThetaHom(s, tuple(values), d)


def surface_relator(g: int) -> list[tuple[int, int]]:
    """``prod [a_i, b_i]`` as letters over the generators ``a_1, b_1, ...``."""
    out = []
    for i in range(g):
        a, b = 2 * i, 2 * i + 1
        out += [(a, 1), (b, 1), (a, -1), (b, -1)]
    return out


@dataclass
class ThetaKernel:
    reps: list  # coset representative words, indexed by residue
    schreier: list  # (residue, generator index) for each Schreier generator
    abelianization: AbelianGroup

    @property
    def rank(self) -> int:
        return self.abelianization.rank


def theta_kernel(s: SurfaceData, theta: ThetaHom) -> ThetaKernel:
    """Reidemeister-Schreier presentation of ``ker theta`` and its abelianization."""
    s.require_closed()
    g, d = s.genus, theta.d
    vals = list(theta.values)
    ngen = 2 * g
    units = [k for k in range(ngen) if gcd(vals[k], d) == 1]
    reps = {0: []}
    tree = set()
    order = [units[0]] if units else list(range(ngen))
    frontier = [0]
    while frontier:
        nxt = []
        for c in frontier:
            for k in order:
                c2 = (c + vals[k]) % d
                if c2 not in reps:
                    reps[c2] = reps[c] + [(k, 1)]
                    tree.add((c, k))
                    nxt.append(c2)
        frontier = nxt
    schreier = [(c, k) for c in range(d) for k in range(ngen)]
    idx = {sg: i for i, sg in enumerate(schreier)}
    rows = [[int(i == idx[e]) for i in range(len(schreier))] for e in sorted(tree)]

    def rewrite(word, start):
        vec = [0] * len(schreier)
        c = start
        for k, e in word:
            if e > 0:
                vec[idx[(c, k)]] += 1
                c = (c + vals[k]) % d
            else:
                c = (c - vals[k]) % d
                vec[idx[(c, k)]] -= 1
        return vec, c

    rel = surface_relator(g)
    for c in range(d):
        vec, end = rewrite(rel, c)
        if end != c:  # pragma: no cover - the relator has value zero
            raise AssertionError("relator does not close up")
        rows.append(vec)
    ab = AbelianGroup(len(schreier), rows)
    return ThetaKernel([reps[c] for c in range(d)], schreier, ab)


def expected_cover_rank(g: int, d: int) -> int:
    return 2 * (d * (g - 1) + 1)
