"""Finite quotient constructions and congruence certificates.

The builders here turn the existence arguments for congruence quotients
into computations: each returns a :class:`FiniteQuotient` whose defining
property is checked before it is handed back.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import factorial, lcm

from .errors import (BaseStrategyFailed, BudgetExceeded, SearchCapExceeded, SizeBudgetExceeded, VerificationFailed)
from .johnson import d_module
from .morphism import (CHARACTERISTIC_UNVERIFIED, CHARACTERISTIC_VERBAL, Automorphism, FiniteQuotient,
                       ab_matrix, automorphism_from_json)
from .pcgroup import (PcPresentation, Subgroup, centre, join, kernel_of_map, meet, normal_closure,
                      normal_core, power_subgroup, quotient, subgroup, weight_segment, whole_group)
from .zlinalg import choose_M2
from .check import CheckOutcome, check_certificate, check_certificate_data  # noqa: F401

DEFAULT_SEARCH_CAP = 10**4
DEFAULT_SIZE_BUDGET = 10**6


def trivial_quotient(pres: PcPresentation) -> FiniteQuotient:
    return FiniteQuotient(pres, whole_group(pres), CHARACTERISTIC_VERBAL, "trivial")


def lift_kernel(pres: PcPresentation, proj, sub: Subgroup) -> Subgroup:
    """Preimage in ``pres`` of a subgroup of ``proj.target``."""
    return join(proj.kernel, subgroup(pres, [proj.lift(g) for g in sub.gens]))


# ---------------------------------------------------------------------------
# seeing the bottom of the lower central series


@dataclass
class SeeingBottom:
    pres: PcPresentation
    modulus: int
    L: Subgroup
    steps: list  # (generator name, m) for each generator added

    @cached_property
    def cored(self) -> FiniteQuotient:
        return FiniteQuotient(self.pres, normal_core(self.pres, self.L), CHARACTERISTIC_UNVERIFIED,
                              f"core of L for modulus {self.modulus}")

    def bottom_meet(self) -> Subgroup:
        K = self.pres.nilpotency_class
        return meet(self.L, weight_segment(self.pres, K))

    def expected_bottom(self) -> Subgroup:
        pres = self.pres
        K = pres.nilpotency_class
        return subgroup(pres, [pres.gen(k) ** self.modulus for k in range(pres.n) if pres.weights[k] == K])


def seeing_bottom(pres: PcPresentation, modulus: int, cap: int = DEFAULT_SEARCH_CAP) -> SeeingBottom:
    """A finite-index ``L`` with ``L ∩ gamma_K = M*gamma_K``.

    Start from the M-th powers of the bottom layer and climb the generators;
    an infinite generator ``t`` contributes ``t^m`` for the least ``m`` whose
    conjugation preserves the current subgroup.
    """
    if modulus < 1:
        raise ValueError("modulus must be positive")
    K = pres.nilpotency_class
    if K == 0:
        return SeeingBottom(pres, modulus, whole_group(pres), [])
    c = pres.collector
    bottom = [k for k in range(pres.n) if pres.weights[k] == K]
    L = subgroup(pres, [pres.gen(k) ** modulus for k in bottom])
    steps = []
    for d in range(pres.n - 1, -1, -1):
        if pres.weights[d] == K or pres.orders[d]:
            continue
        t = pres.gen(d).exps
        gens = [b.exps for b in L.gens]
        for m in range(1, cap + 1):
            tm, tmi = c.pow(t, m), c.pow(t, -m)
            if all(c.mul(c.mul(tm, b), tmi) in L and c.mul(c.mul(tmi, b), tm) in L for b in gens):
                break
        else:
            raise SearchCapExceeded(f"normalising power of {pres.names[d]}", cap + 1, cap)
        L = subgroup(pres, L.gens + [pres.gen(d) ** m])
        steps.append((pres.names[d], m))
    sb = SeeingBottom(pres, modulus, L, steps)
    if sb.bottom_meet() != sb.expected_bottom():
        raise VerificationFailed("L does not meet the bottom layer in its M-th powers")
    return sb


# ---------------------------------------------------------------------------
# fibre products and refinements


def fibre_product(q: FiniteQuotient, r: FiniteQuotient, verify: bool = True) -> FiniteQuotient:
    """Image of the source in ``Q x R``; its kernel is ``ker q ∩ ker r``."""
    if q.source is not r.source:
        raise ValueError("fibre product needs a common source")
    pres = q.source
    kernel = meet(q.kernel, r.kernel)
    if verify:
        pair_kernel = pair_map_kernel(q, r)
        if pair_kernel != kernel:
            raise VerificationFailed("fibre product kernel differs from the meet of the kernels")
    tag = CHARACTERISTIC_UNVERIFIED
    return FiniteQuotient(pres, kernel, tag, f"fibre({q.label}, {r.label})")


def pair_map_kernel(q: FiniteQuotient, r: FiniteQuotient) -> Subgroup:
    """Kernel of ``g -> (q(g), r(g))`` from the closure of generator image pairs."""
    pres = q.source
    pq, pr = q.projection, r.projection
    cq, cr = q.target.collector, r.target.collector
    images = [(pq._apply(g.exps), pr._apply(g.exps)) for g in pres.gens()]

    def mul(a, b):
        return (cq.mul(a[0], b[0]), cr.mul(a[1], b[1]))

    ker, _ = kernel_of_map(pres, images, mul, (cq.identity, cr.identity))
    return ker


def characteristic_refinement(q: FiniteQuotient, budget: int | None = None) -> FiniteQuotient:
    """``G -> G/G^e`` with ``e`` the exponent of ``Q``; refines ``q``."""
    e = q.exponent
    kw = {} if budget is None else {"budget": budget}
    kernel = power_subgroup(q.source, e, **kw)
    if not kernel.issubset(q.kernel):
        raise VerificationFailed("verbal kernel is not contained in the kernel of q")
    return FiniteQuotient(q.source, kernel, CHARACTERISTIC_VERBAL, f"G/G^{e}")


# ---------------------------------------------------------------------------
# carving out the centre


def _check_size(fq: FiniteQuotient, budget: int):
    size = fq.order()
    if size > budget:
        raise SizeBudgetExceeded("carve_centre quotient", size, budget)


def carve_centre(pres: PcPresentation, L: Subgroup, factorial_exact: bool = False,
                 size_budget: int = DEFAULT_SIZE_BUDGET, transcript: list | None = None) -> FiniteQuotient:
    """A finite quotient ``r: G -> R`` with ``r^-1(Z(R)) ⊆ Z(G)·L``."""
    index = L.index()
    if index is None:
        raise ValueError("carve_centre needs a finite-index subgroup")
    K = pres.nilpotency_class
    out = trivial_quotient(pres)
    if K <= 1 or index == 1:
        _verify_centre(pres, L, out)
        return out
    if factorial_exact:
        tau = factorial(index)
    else:
        tau = FiniteQuotient(pres, normal_core(pres, L)).exponent
    for i in range(K - 1, 0, -1):
        m1 = out.order() * tau
        mod = d_module(pres, i)
        m2 = choose_M2(mod.hom, mod.inner, m1)
        top, proj = quotient(pres, weight_segment(pres, i + 2), check=False)
        sb = seeing_bottom(top, m2)
        lifted = FiniteQuotient(pres, lift_kernel(pres, proj, sb.cored.kernel))
        out = fibre_product(out, lifted, verify=False)
        _check_size(out, size_budget)
        if transcript is not None:
            transcript.append({"step": "carve_centre_level", "level": i, "M1": m1, "M2": m2,
                               "order": out.order()})
    _verify_centre(pres, L, out)
    return out


def centre_preimage(fq: FiniteQuotient) -> Subgroup:
    """``r^-1(Z(R))``."""
    R, proj = fq.target, fq.projection
    return lift_kernel(fq.source, proj, centre(R))


def _verify_centre(pres: PcPresentation, L: Subgroup, fq: FiniteQuotient):
    allowed = join(centre(pres), L)
    if not centre_preimage(fq).issubset(allowed):
        raise VerificationFailed("preimage of the centre of R is not inside Z(G)L")


# ---------------------------------------------------------------------------
# last-term certificate


def lastterm_certificate(pres: PcPresentation, modulus: int, factorial_exact: bool = False,
                         size_budget: int = DEFAULT_SIZE_BUDGET,
                         transcript: list | None = None) -> FiniteQuotient:
    """Characteristic quotient separating the last filtration term modulo ``M``.

    An automorphism trivial on ``G/gamma_K`` that becomes inner on the result
    has Johnson class in ``M*D_{K-1}``.
    """
    K = pres.nilpotency_class
    if K < 2:
        raise ValueError("last-term certificate needs class at least 2")
    if modulus == 1:
        return trivial_quotient(pres)
    p = seeing_bottom(pres, modulus).cored
    top, proj = quotient(pres, weight_segment(pres, K), check=False)
    image = subgroup(top, [proj(g) for g in p.kernel.gens])
    rq = carve_centre(top, image, factorial_exact, size_budget, transcript)
    q = FiniteQuotient(pres, lift_kernel(pres, proj, rq.kernel))
    r = characteristic_refinement(fibre_product(p, q, verify=False))
    if transcript is not None:
        transcript.append({"step": "lastterm", "modulus": modulus, "p_order": p.order(),
                           "q_order": q.order(), "order": r.order()})
    return r


# ---------------------------------------------------------------------------
# certification pipeline


@dataclass
class Labeling:
    """Finite labelling of the outer group: matrices modulo ``modulus``.

    ``images[j]`` is the label of the j-th outer generator, and ``subgroup``
    lists generators of the designated subgroup ``S`` of the label image;
    the claimed subgroup is the preimage of ``S``.
    """

    modulus: int
    images: list
    subgroup: list = field(default_factory=list)
    kind: str = "matrix"

    def to_json(self) -> dict:
        return {"kind": self.kind, "modulus": self.modulus, "images": self.images, "subgroup": self.subgroup}


def _mat_mul(a, b, m):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) % m for j in range(n)) for i in range(n))


def _mat_key(a, m):
    return tuple(tuple(x % m for x in row) for row in a)


def label_closure(gens, m) -> set:
    gens = [_mat_key(g, m) for g in gens]
    if not gens:
        return set()
    n = len(gens[0])
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = _mat_mul(a, g, m)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen


def ab_label(a: Automorphism) -> list[list[int]]:
    """Action on the weight-one generators, column k = image of generator k."""
    pres = a.pres
    top = pres.top_gens()
    cols = [[a(pres.gen(k)).exps[j] for j in top] for k in top]
    return [[cols[c][r] for c in range(len(top))] for r in range(len(top))]


@dataclass
class OuterSubgroupSpec:
    pres: PcPresentation
    generators: list  # Automorphism
    labeling: Labeling

    @cached_property
    def label_image(self) -> set:
        return label_closure(self.labeling.images, self.labeling.modulus)

    def label_exponent(self) -> int:
        m = self.labeling.modulus
        out = 1
        for a in self.label_image:
            n, b = 1, a
            while any(b[i][j] != int(i == j) for i in range(len(b)) for j in range(len(b))):
                b = _mat_mul(b, a, m)
                n += 1
            out = lcm(out, n)
        return out

    def to_json(self) -> dict:
        return {
            "presentation": self.pres.to_json(),
            "generators": [a.to_json() for a in self.generators],
            "labeling": self.labeling.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "OuterSubgroupSpec":
        pres = PcPresentation.from_json(data["presentation"])
        gens = [automorphism_from_json(pres, g) for g in data.get("generators", [])]
        lab = data["labeling"]
        if lab.get("kind") == "ab-matrix" and "images" not in lab:
            images = [ab_label(a) for a in gens]
        else:
            images = lab["images"]
        return cls(pres, gens, Labeling(lab["modulus"], images, lab.get("subgroup", []), lab.get("kind", "matrix")))


@dataclass
class CongruenceCertificate:
    quotient: FiniteQuotient
    claim: OuterSubgroupSpec
    transcript: list
    exponent: int

    def to_json(self) -> dict:
        return {
            "quotient": {
                "exponent": self.exponent,
                "order": self.quotient.order(),
                "presentation": self.quotient.target.to_json(),
                "map": self.quotient.projection.image_words(),
            },
            "claim": self.claim.to_json(),
            "transcript": self.transcript,
        }


def _base_quotient(pres: PcPresentation, spec: OuterSubgroupSpec, modulus: int, strategy: str,
                   provided: FiniteQuotient | None):
    mats = [ab_matrix(a.forward) for a in spec.generators]
    if strategy == "auto":
        strategy = "unipotent" if all(_unipotent(m) for m in mats) else "finite-image"
    if strategy == "provided":
        if provided is None:
            raise BaseStrategyFailed("base strategy 'provided' needs a quotient")
        return provided, strategy, None
    if strategy == "unipotent":
        if not all(_unipotent(m) for m in mats):
            raise BaseStrategyFailed("outer generators do not act unipotently on the abelianization")
        m = modulus
    elif strategy == "finite-image":
        m = lcm(modulus, 3)
        if not _finite_integer_image(mats):
            raise BaseStrategyFailed("action on the abelianization has infinite image")
    else:
        raise BaseStrategyFailed(f"unknown base strategy {strategy!r}")
    kernel = normal_closure(pres, weight_segment(pres, 2).gens + [g ** m for g in pres.gens()])
    return FiniteQuotient(pres, kernel, CHARACTERISTIC_VERBAL, f"abelianization mod {m}"), strategy, m


def _finite_integer_image(mats, cap: int = 10**4) -> bool:
    """Brute-force closure of integer matrices; False once it exceeds ``cap``."""
    if not mats:
        return True
    n = len(mats[0])
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    gens = [tuple(tuple(r) for r in g) for g in mats]
    seen, frontier = {ident}, [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = tuple(tuple(sum(a[i][k] * g[k][j] for k in range(n)) for j in range(n)) for i in range(n))
                if b not in seen:
                    if len(seen) >= cap:
                        return False
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return True


def _unipotent(mat) -> bool:
    n = len(mat)
    if n == 0:
        return True
    a = [[mat[i][j] - int(i == j) for j in range(n)] for i in range(n)]
    p = a
    for _ in range(n - 1):
        p = [[sum(p[i][k] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return not any(any(r) for r in p)


def _attempt(pres, spec, M, base_strategy, provided, factorial_exact, size_budget, steps):
    base, strategy, bm = _base_quotient(pres, spec, M, base_strategy, provided)
    steps.append({"step": "base", "strategy": strategy, "modulus": bm, "order": base.order()})
    acc = base
    for level in range(pres.nilpotency_class - 1, 0, -1):
        # level quotient of G/gamma_{level+2}, whose last term is layer level+1
        top, proj = quotient(pres, weight_segment(pres, level + 2), check=False)
        r = lastterm_certificate(top, M, factorial_exact, size_budget, steps)
        lifted = FiniteQuotient(pres, lift_kernel(pres, proj, r.kernel))
        steps.append({"step": "level", "level": level, "order": lifted.order()})
        acc = fibre_product(acc, lifted, verify=False)
    final = characteristic_refinement(acc)
    e = final.exponent
    steps.append({"step": "refine", "e": e, "order": final.order()})
    return CongruenceCertificate(final, spec, steps, e)


def certify(spec: OuterSubgroupSpec, base_strategy: str = "auto", provided: FiniteQuotient | None = None,
            modulus: int | None = None, factorial_exact: bool = False, attempts: int = 4,
            size_budget: int = DEFAULT_SIZE_BUDGET) -> CongruenceCertificate:
    """Build and verify a congruence certificate for ``spec``.

    Level quotients for every filtration level and a base quotient for the
    abelianization are fibred together and refined to ``G/G^e``; the claim
    is then checked on the finite data. On failure the modulus is doubled.
    """

    pres = spec.pres
    M = modulus or spec.label_exponent()
    transcript = [{"step": "modulus", "M": M, "source": "given" if modulus else "label exponent"}]
    if not spec.generators:
        cert = CongruenceCertificate(trivial_quotient(pres), spec, transcript + [{"step": "trivial"}], 1)
        return cert
    last_error = None
    for attempt in range(attempts):
        steps = [{"step": "attempt", "index": attempt, "M": M}]
        try:
            cert = _attempt(pres, spec, M, base_strategy, provided, factorial_exact, size_budget,
                            transcript + steps)
        except BudgetExceeded:
            if last_error is None:
                raise
            break  # a larger modulus is out of reach; report the last refutation
        outcome = check_certificate_data(cert.to_json())
        if outcome.verified:
            return cert
        last_error = outcome
        M *= 2
    if pres.is_finite:
        final = characteristic_refinement(FiniteQuotient(pres, subgroup(pres, [])))
        e = final.exponent
        cert = CongruenceCertificate(final, spec, transcript + [{"step": "identity-quotient", "e": e}], e)
        outcome = check_certificate_data(cert.to_json())
        if outcome.verified:
            return cert
        last_error = outcome
    raise VerificationFailed(f"no certificate found; counterexample word {last_error.word}")
