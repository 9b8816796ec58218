"""Shared test utilities: random elements and reference models."""
import random

from nilcsp.fixtures import named

FIXTURES = ("HEIS", "F32", "F23", "NG2")


def random_element(pres, rng: random.Random, bound: int = 4):
    exps = [rng.randint(-bound, bound) if not o else rng.randrange(o) for o in pres.orders]
    return pres.element(exps)


def heis_matrix(exps):
    """x^a y^b z^c as an upper unitriangular 3x3 matrix with [x, y] = z."""
    a, b, c = exps
    # x = I + E12, y = I + E23, z = [x, y] = I + E13
    return ((1, a, c + a * b), (0, 1, b), (0, 0, 1))


def mat_mul(p, q):
    n = len(p)
    return tuple(tuple(sum(p[i][k] * q[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def fixture(name):
    return named(name)


def random_deep_element(pres, rng, bound: int = 3):
    """Random element of gamma_2."""
    exps = [0 if pres.weights[k] == 1 else (rng.randrange(o) if o else rng.randint(-bound, bound))
            for k, o in enumerate(pres.orders)]
    return pres.element(exps)


def elementary_automorphisms(pres):
    """Top-generator transvections and their inverses."""
    from nilcsp.errors import NotBijectiveOnAbelianization, RelationViolated
    from nilcsp.morphism import as_automorphism, hom_from_images

    cache = pres.__dict__.setdefault("_test_elementary", [])
    if not cache:
        top = [pres.names[k] for k in pres.top_gens()]
        for a in top:
            for b in top:
                if a != b:
                    for s in (1, -1):
                        # not every transvection respects the relations (e.g. surface groups)
                        try:
                            h = hom_from_images(pres, pres, {a: [(a, 1), (b, s)]})
                            cache.append(as_automorphism(h))
                        except (RelationViolated, NotBijectiveOnAbelianization):
                            pass
    return cache


def random_automorphism(pres, rng, steps: int = 3):
    """Product of transvections, inner automorphisms and central shears."""
    from nilcsp.morphism import ad, as_automorphism, hom_from_images, identity_aut

    out = identity_aut(pres)
    elem = elementary_automorphisms(pres)
    for _ in range(steps):
        kind = rng.randrange(3)
        if kind == 0 and elem:
            step = rng.choice(elem)
        elif kind == 1:
            step = ad(pres, random_element(pres, rng, 2))
        else:
            k = rng.choice(pres.top_gens())
            img = pres.gen(k) * random_deep_element(pres, rng)
            try:
                step = as_automorphism(hom_from_images(pres, pres, {pres.names[k]: img.word()}))
            except RelationViolated:
                continue
        out = out * step
    return out


def random_level_automorphism(pres, rng, level: int, steps: int = 3):
    """Random automorphism acting trivially on G/gamma_{level+1}."""
    from nilcsp.errors import RelationViolated
    from nilcsp.morphism import ad, as_automorphism, hom_from_images, identity_aut
    from nilcsp.pcgroup import H_subgroup

    H = H_subgroup(pres, level).gens
    out = identity_aut(pres)
    for _ in range(steps):
        if rng.randrange(2) and H:
            x = pres.identity()
            for h in H:
                x = x * h ** rng.randint(-2, 2)
            step = ad(pres, x)
        else:
            k = rng.choice(pres.top_gens())
            deep = [rng.randint(-2, 2) if pres.weights[d] > level and not o else
                    (rng.randrange(o) if pres.weights[d] > level else 0) for d, o in enumerate(pres.orders)]
            img = pres.gen(k) * pres.element(deep)
            try:
                step = as_automorphism(hom_from_images(pres, pres, {pres.names[k]: img.word()}))
            except RelationViolated:
                continue
        out = out * step
    return out


def oracle_automorphism(pres, table, perm):
    """Turn an oracle permutation into an Automorphism of ``pres``."""
    from nilcsp.morphism import as_automorphism, hom_from_images
    from nilcsp.oracle import aut_images

    return as_automorphism(hom_from_images(pres, pres, aut_images(table, perm)))


ACCEPTANCE_RESULTS = {}


class criterion:
    """Time a block against its limit and record the outcome for the summary."""

    def __init__(self, number: int, title: str, limit: float):
        self.number, self.title, self.limit = number, title, limit

    def __enter__(self):
        import time

        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        import time

        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.limit
        ACCEPTANCE_RESULTS[self.number] = (ok, self.title, elapsed, self.limit)
        if exc_type is None:
            assert elapsed < self.limit, f"took {elapsed:.2f}s, limit {self.limit}s"
        return False
