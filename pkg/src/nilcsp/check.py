"""Independent checker for congruence certificates.

Works from the certificate JSON alone. The quotient is rebuilt by coset
enumeration, the outer generators are pushed through the stated map, and the
finite closure of (outer class, label) pairs is searched for a word whose
outer class is trivial but whose label lies outside the designated subgroup.
Only presentation parsing and the verbal-subgroup replay are shared with the
constructors.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import EnumerationBudgetExceeded, TranscriptMismatch, VerificationFailed
from .oracle import _extend, enumerate_group, relators
from .pcgroup import PcPresentation, power_subgroup, quotient

DEFAULT_CLOSURE_BUDGET = 10**6


@dataclass
class CheckOutcome:
    verified: bool
    word: list | None = None  # outer-generator indices, applied right to left
    explored: int = 0

    def to_json(self) -> dict:
        if self.verified:
            return {"result": "verified", "explored": self.explored}
        return {"result": "counterexample", "word": self.word, "explored": self.explored}


def _mat_mul(a, b, m):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) % m for j in range(n)) for i in range(n))


def _closure(gens, ident, m):
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


def replay(data: dict):
    """Recompute ``G -> G/G^e`` and compare it with the recorded quotient."""
    pres = PcPresentation.from_json(data["claim"]["presentation"])
    e = data["quotient"]["exponent"]
    q, proj = quotient(pres, power_subgroup(pres, e), check=False)
    if q.to_json() != data["quotient"]["presentation"]:
        raise TranscriptMismatch("replayed quotient presentation differs from the recorded one")
    if proj.image_words() != data["quotient"]["map"]:
        raise TranscriptMismatch("replayed quotient map differs from the recorded one")


def check_certificate_data(data: dict, replay_transcript: bool = True,
                           budget: int = DEFAULT_CLOSURE_BUDGET) -> CheckOutcome:
    if replay_transcript:
        replay(data)
    claim = data["claim"]
    pres = PcPresentation.from_json(claim["presentation"])
    qpres = PcPresentation.from_json(data["quotient"]["presentation"])
    t = enumerate_group(qpres)

    def eval_q(word):
        c = 0
        for name, e in word:
            g = t.generator(qpres.index[name])
            c = t.mul(c, t.power(g, e))
        return c

    gmap = [eval_q(data["quotient"]["map"].get(name, [])) for name in pres.names]

    def eval_g(word):
        c = 0
        for name, e in word:
            c = t.mul(c, t.power(gmap[pres.index[name]], e))
        return c

    for rel in relators(pres):
        c = 0
        for g, s in rel:
            c = t.mul(c, gmap[g] if s > 0 else t.inverse[gmap[g]])
        if c != 0:
            raise VerificationFailed("quotient map does not respect a defining relation")

    # a word in the source generators for every quotient element
    section = {0: []}
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for k, im in enumerate(gmap):
                b = t.mul(a, im)
                if b not in section:
                    section[b] = section[a] + [(pres.names[k], 1)]
                    nxt.append(b)
        frontier = nxt
    if len(section) != t.order:
        raise VerificationFailed("quotient map is not surjective")

    perms = []
    for j, aut in enumerate(claim["generators"]):
        images = aut["images"]

        def phi_word(word, images=images):
            c = 0
            for name, e in word:
                img = eval_g(images.get(name, [[name, 1]]))
                c = t.mul(c, t.power(img, e))
            return c

        qimages = [phi_word(section[t.generator(k)]) for k in range(qpres.n)]
        perm = _extend(t, list(range(qpres.n)), qimages)
        if perm is None:
            raise VerificationFailed(f"outer generator {j} does not induce an automorphism of the quotient")
        for k, name in enumerate(pres.names):
            if perm[gmap[k]] != eval_g(images.get(name, [[name, 1]])):
                raise VerificationFailed(f"outer generator {j} is not compatible with the quotient map")
        perms.append(perm)

    # an outer class is keyed by the least conjugate of its images of the
    # source generators, which generate the quotient
    spots = sorted(set(gmap))

    def canon(perm):
        imgs = [perm[x] for x in spots]
        return min(tuple(t.conj(g, y) for y in imgs) for g in range(t.order))

    lab = claim["labeling"]
    m = lab["modulus"]
    labels = [tuple(tuple(x % m for x in row) for row in img) for img in lab["images"]]
    n = len(labels[0]) if labels else 0
    ident_label = tuple(tuple(int(i == j) % m for j in range(n)) for i in range(n))
    allowed = _closure([tuple(tuple(x % m for x in row) for row in s) for s in lab.get("subgroup", [])],
                       ident_label, m)
    ident_perm = tuple(range(t.order))
    ident_key = canon(ident_perm)
    start = (ident_key, ident_label)
    words = {start: []}
    reps = {start: ident_perm}
    frontier = [start]
    while frontier:
        nxt = []
        for state in frontier:
            perm, label = reps[state], state[1]
            for j, (g, lg) in enumerate(zip(perms, labels)):
                composed = tuple(perm[x] for x in g)
                new = (canon(composed), _mat_mul(label, lg, m))
                if new in words:
                    continue
                words[new] = words[state] + [j]
                reps[new] = composed
                if new[0] == ident_key and new[1] not in allowed:
                    return CheckOutcome(False, words[new], len(words))
                if len(words) > budget:
                    raise EnumerationBudgetExceeded("certificate closure", len(words), budget)
                nxt.append(new)
        frontier = nxt
    return CheckOutcome(True, None, len(words))


def check_certificate(cert) -> CheckOutcome:
    """Check a :class:`CongruenceCertificate` or its JSON form."""
    data = cert if isinstance(cert, dict) else cert.to_json()
    return check_certificate_data(data)
