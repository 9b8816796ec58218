"""Exact integer linear algebra and finitely generated abelian groups.

Everything here works over Python ints; no floating point anywhere.
Vectors are row vectors and matrices act on the right (``v @ A``) unless a
function says otherwise.
"""
from __future__ import annotations

from functools import reduce
from math import gcd
from typing import Iterable, Sequence

Vector = tuple


class AmbientMismatch(ValueError):
    pass


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def lcm(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // gcd(a, b)


class IntMatrix:
    """Immutable integer matrix stored row-major."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Sequence[int]], cols: int | None = None):
        rows = tuple(tuple(int(x) for x in r) for r in data)
        if cols is None:
            if not rows:
                raise ValueError("empty matrix needs an explicit column count")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_data", rows)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], cols)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def __iter__(self):
        return iter(self._data)

    def __eq__(self, other):
        if isinstance(other, IntMatrix):
            return self.cols == other.cols and self._data == other._data
        return NotImplemented

    def __hash__(self):
        return hash((self.cols, self._data))

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r})"

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        cols = list(zip(*other._data)) if other.rows else [()] * other.cols
        return IntMatrix(
            [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._data], other.cols
        )

    def transpose(self) -> "IntMatrix":
        return IntMatrix([list(c) for c in zip(*self._data)] if self.rows else [], self.rows)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("det of non-square matrix")
        h, u = hnf(self)
        # det(U) = +-1; recover the sign from the transform
        d = 1
        for i in range(self.rows):
            d *= h[i, i]
        return d * _unimodular_sign(u)


def _unimodular_sign(u: IntMatrix) -> int:
    # Bareiss elimination; exact for small unimodular matrices.
    a = u.tolist()
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def _as_rows(a) -> tuple[list[list[int]], int]:
    if isinstance(a, IntMatrix):
        return a.tolist(), a.cols
    rows = [list(map(int, r)) for r in a]
    return rows, (len(rows[0]) if rows else 0)


def hnf(a, cols: int | None = None) -> tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U @ A == H``. Pivots are
    positive, entries above a pivot lie in ``[0, pivot)`` and zero rows sit at
    the bottom.
    """
    rows, ncols = _as_rows(a)
    if cols is not None:
        ncols = cols
    m = len(rows)
    h = [r[:] for r in rows]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= m:
            break
        # gcd-combine everything below into row r
        for i in range(r + 1, m):
            if h[i][c] == 0:
                continue
            if h[r][c] == 0:
                h[r], h[i] = h[i], h[r]
                u[r], u[i] = u[i], u[r]
                continue
            a0, b0 = h[r][c], h[i][c]
            g, s, t = xgcd(a0, b0)
            p, q = a0 // g, b0 // g
            hr, hi = h[r], h[i]
            h[r] = [s * x + t * y for x, y in zip(hr, hi)]
            h[i] = [-q * x + p * y for x, y in zip(hr, hi)]
            ur, ui = u[r], u[i]
            u[r] = [s * x + t * y for x, y in zip(ur, ui)]
            u[i] = [-q * x + p * y for x, y in zip(ur, ui)]
        if h[r][c] == 0:
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        piv = h[r][c]
        for i in range(r):
            f = h[i][c] // piv
            if f:
                h[i] = [x - f * y for x, y in zip(h[i], h[r])]
                u[i] = [x - f * y for x, y in zip(u[i], u[r])]
        pivots.append(c)
        r += 1
    return IntMatrix(h, ncols), IntMatrix(u, m)


def snf(a, cols: int | None = None) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: ``(S, U, V)`` with ``U @ A @ V == S``.

    The diagonal of ``S`` is nonnegative and each entry divides the next
    (zeros last).
    """
    rows, n = _as_rows(a)
    if cols is not None:
        n = cols
    m = len(rows)
    s = [r[:] for r in rows]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in s:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, f):  # row dst += f*row src
        s[dst] = [x + f * y for x, y in zip(s[dst], s[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        for r in s:
            r[dst] += f * r[src]
        for r in v:
            r[dst] += f * r[src]

    t = 0
    while t < min(m, n):
        # smallest nonzero entry in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = s[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            piv = s[t][t]
            for i in range(t + 1, m):
                if s[i][t]:
                    add_row(i, t, -(s[i][t] // piv))
                    if s[i][t]:
                        done = False
            for j in range(t + 1, n):
                if s[t][j]:
                    add_col(j, t, -(s[t][j] // piv))
                    if s[t][j]:
                        done = False
            if done:
                # enforce divisibility on the trailing block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if s[i][j] % piv:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(t, bad, 1)
                continue
            # a smaller remainder appeared; move it to the pivot
            best = None
            for i in range(t, m):
                if s[i][t] and (best is None or abs(s[i][t]) < best[0]):
                    best = (abs(s[i][t]), i, t)
            for j in range(t, n):
                if s[t][j] and (best is None or abs(s[t][j]) < best[0]):
                    best = (abs(s[t][j]), t, j)
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return IntMatrix(s, n), IntMatrix(u, m), IntMatrix(v, n)


def invariant_factors(a, cols: int | None = None) -> list[int]:
    sm, _, _ = snf(a, cols)
    return [sm[i, i] for i in range(min(sm.rows, sm.cols))]


def inverse_unimodular(a: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular matrix."""
    h, u = hnf(a)
    if h != IntMatrix.identity(a.rows):
        raise ValueError("matrix is not unimodular")
    return u


def solve_rows(basis, target: Sequence[int], cols: int | None = None) -> list[int] | None:
    """Integer ``x`` with ``x @ basis == target``, or ``None``."""
    rows, n = _as_rows(basis)
    if cols is not None:
        n = cols
    if not rows:
        return [] if not any(target) else None
    h, u = hnf(rows, n)
    rem = list(target)
    y = [0] * h.rows
    for r in range(h.rows):
        hr = h.row(r)
        c = next((k for k, x in enumerate(hr) if x), None)
        if c is None:
            break
        if any(rem[:c]):
            return None
        q, m = divmod(rem[c], hr[c])
        if m:
            return None
        y[r] = q
        if q:
            rem = [a - q * b for a, b in zip(rem, hr)]
    if any(rem):
        return None
    return [sum(y[r] * u[r, k] for r in range(h.rows)) for k in range(h.rows)]


def row_span_basis(rows, cols: int) -> list[tuple[int, ...]]:
    """Nonzero rows of the HNF: a canonical basis of the row lattice."""
    if not rows:
        return []
    h, _ = hnf(rows, cols)
    return [r for r in h if any(r)]


def lattice_meet(a_rows, b_rows, cols: int) -> list[tuple[int, ...]]:
    """Canonical basis of the intersection of two row lattices in Z^cols."""
    if not a_rows or not b_rows:
        return []
    stacked = [list(r) + list(r) for r in a_rows] + [list(r) + [0] * cols for r in b_rows]
    h, _ = hnf(stacked, 2 * cols)
    meet = [r[cols:] for r in h if not any(r[:cols]) and any(r[cols:])]
    return row_span_basis(meet, cols)


def kernel_rows(a, cols: int | None = None) -> list[tuple[int, ...]]:
    """Basis of the integer left kernel {x : x @ A == 0}."""
    rows, n = _as_rows(a)
    if cols is not None:
        n = cols
    if not rows:
        return []
    h, u = hnf(rows, n)
    return row_span_basis([u.row(i) for i in range(h.rows) if not any(h.row(i))], len(rows))


# ---------------------------------------------------------------------------
# finitely generated abelian groups


class AbelianGroup:
    """``Z^n / (row lattice of relations)`` with canonical coordinates.

    Canonical coordinates come from the Smith form ``U R V = S``: a user
    vector ``x`` has canonical vector ``x @ V`` restricted to the columns whose
    invariant factor is not 1, reduced modulo the factor where it is nonzero.
    The canonical factors are ``torsion`` (each >= 2, dividing the next)
    followed by ``rank`` free coordinates.
    """

    def __init__(self, ngens: int, relations: Sequence[Sequence[int]] = ()):
        self.ngens = ngens
        rels = [tuple(int(x) for x in r) for r in relations if any(r)]
        self.relations = tuple(rels)
        if rels:
            s, _, v = snf(rels, ngens)
            diag = [s[i, i] for i in range(min(s.rows, s.cols))]
        else:
            v = IntMatrix.identity(ngens)
            diag = []
        diag = diag + [0] * (ngens - len(diag))
        self._v = v
        self._vinv = inverse_unimodular(v) if ngens else IntMatrix.identity(0)
        self._keep = [j for j, d in enumerate(diag) if d != 1]
        self.factors = tuple(diag[j] for j in self._keep)
        self.torsion = tuple(d for d in self.factors if d)
        self.rank = sum(1 for d in self.factors if d == 0)

    @classmethod
    def from_orders(cls, orders: Sequence[int]) -> "AbelianGroup":
        """Direct sum of cyclic groups, 0 meaning infinite cyclic."""
        n = len(orders)
        return cls(n, [[o if i == j else 0 for j in range(n)] for i, o in enumerate(orders) if o])

    @classmethod
    def free(cls, n: int) -> "AbelianGroup":
        return cls(n)

    @property
    def ncanon(self) -> int:
        return len(self.factors)

    def order(self) -> int | None:
        if self.rank:
            return None
        return reduce(lambda a, b: a * b, self.torsion, 1)

    def is_trivial(self) -> bool:
        return not self.factors

    def reduce(self, c: Sequence[int]) -> tuple[int, ...]:
        return tuple(x % d if d else x for x, d in zip(c, self.factors))

    def encode(self, x: Sequence[int]) -> tuple[int, ...]:
        """User coordinates -> canonical coordinates."""
        if len(x) != self.ngens:
            raise ValueError(f"expected {self.ngens} coordinates, got {len(x)}")
        v = self._v
        full = [sum(x[i] * v[i, j] for i in range(self.ngens)) for j in self._keep]
        return self.reduce(full)

    def decode(self, c: Sequence[int]) -> tuple[int, ...]:
        """Canonical coordinates -> a user-coordinate representative."""
        full = [0] * self.ngens
        for j, x in zip(self._keep, c):
            full[j] = x
        vi = self._vinv
        return tuple(sum(full[k] * vi[k, i] for k in range(self.ngens)) for i in range(self.ngens))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.ncanon

    def add(self, a, b) -> tuple[int, ...]:
        return self.reduce([x + y for x, y in zip(a, b)])

    def neg(self, a) -> tuple[int, ...]:
        return self.reduce([-x for x in a])

    def scale(self, k: int, a) -> tuple[int, ...]:
        return self.reduce([k * x for x in a])

    def relation_rows(self) -> list[tuple[int, ...]]:
        """Relations in canonical coordinates (one row per torsion factor)."""
        n = self.ncanon
        return [tuple(d if i == j else 0 for j in range(n)) for i, d in enumerate(self.factors) if d]

    def exponent(self) -> int:
        """Exponent of the torsion subgroup (1 if torsion-free)."""
        return reduce(lcm, self.torsion, 1)

    def __eq__(self, other):
        return isinstance(other, AbelianGroup) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def describe(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"AbelianGroup({self.describe()})"

    def elements(self):
        """All elements in canonical coordinates (finite groups only)."""
        if self.rank:
            raise ValueError("infinite group")
        out = [()]
        for d in self.factors:
            out = [c + (k,) for c in out for k in range(d)]
        return out


class Submodule:
    """Subgroup of an :class:`AbelianGroup` given by generators.

    Stored as the HNF basis of the lattice in canonical coordinates spanned by
    the generators together with the torsion relations of the ambient group.
    """

    def __init__(self, ambient: AbelianGroup, generators: Iterable[Sequence[int]] = ()):
        self.ambient = ambient
        self.generators = tuple(ambient.reduce(g) for g in generators)
        n = ambient.ncanon
        self.basis = tuple(row_span_basis(list(self.generators) + ambient.relation_rows(), n))

    def __contains__(self, x) -> bool:
        return solve_rows(self.basis, list(x), self.ambient.ncanon) is not None

    def express(self, x) -> list[int] | None:
        """Coefficients ``c`` with ``sum c_i * generators[i] == x`` in the ambient."""
        rows = list(self.generators) + self.ambient.relation_rows()
        sol = solve_rows(rows, list(x), self.ambient.ncanon)
        if sol is None:
            return None
        return sol[: len(self.generators)]

    def lattice(self) -> list[tuple[int, ...]]:
        return list(self.basis)

    def _check(self, other: "Submodule"):
        if self.ambient != other.ambient:
            raise AmbientMismatch(f"{self.ambient!r} vs {other.ambient!r}")

    def issubset(self, other: "Submodule") -> bool:
        self._check(other)
        return all(b in other for b in self.basis)

    def __eq__(self, other):
        return isinstance(other, Submodule) and self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        return f"Submodule({list(self.basis)} in {self.ambient.describe()})"

    def quotient(self) -> AbelianGroup:
        """The ambient group modulo this submodule, in ambient canonical coordinates."""
        return AbelianGroup(self.ambient.ncanon, list(self.basis))

    def index(self) -> int | None:
        q = self.quotient()
        return q.order()

    def scaled(self, k: int) -> "Submodule":
        return Submodule(self.ambient, [self.ambient.scale(k, g) for g in self.basis])


def submodule_meet(x: Submodule, y: Submodule) -> Submodule:
    x._check(y)
    meet = lattice_meet(list(x.basis), list(y.basis), x.ambient.ncanon)
    return Submodule(x.ambient, meet)


def whole(a: AbelianGroup) -> Submodule:
    n = a.ncanon
    return Submodule(a, [tuple(int(i == j) for j in range(n)) for i in range(n)])


def choose_M2(h: AbelianGroup, w: Submodule, m1: int) -> int:
    """A modulus ``M2`` with ``W ∩ M2·H ⊆ M1·W``; always a multiple of ``m1``.

    ``M2 = M1 * t`` where ``t`` is the exponent of the torsion of ``H/W``:
    if ``M2*h`` lies in ``W`` then ``h + W`` is torsion, so ``t*h`` lies in
    ``W`` and ``M2*h = M1 * (t*h)``.
    """
    if w.ambient != h:
        raise AmbientMismatch("W is not a submodule of H")
    t = w.quotient().exponent()
    m2 = m1 * t
    if not _m2_holds(h, w, m1, m2):  # pragma: no cover - guarded by the argument above
        raise AssertionError("choose_M2 postcondition failed")
    return m2


def _m2_holds(h: AbelianGroup, w: Submodule, m1: int, m2: int) -> bool:
    lhs = submodule_meet(w, whole(h).scaled(m2))
    rhs = w.scaled(m1)
    return all(b in rhs for b in lhs.basis)


def check_M2(h: AbelianGroup, w: Submodule, m1: int, m2: int) -> bool:
    """Independent check of ``W ∩ M2·H ⊆ M1·W`` via meet and membership."""
    return _m2_holds(h, w, m1, m2)


# ---------------------------------------------------------------------------
# Hom groups


class HomGroup(AbelianGroup):
    """``Hom(A, B)`` as an abelian group whose elements evaluate as maps.

    A homomorphism is described by the images of the canonical basis of ``A``
    in canonical coordinates of ``B`` (a matrix ``F`` with one row per
    canonical generator of ``A``). User coordinates of the Hom group are one
    integer per pair ``(i, j)`` of canonical factors with a nonzero Hom.
    """

    def __init__(self, source: AbelianGroup, target: AbelianGroup):
        self.source = source
        self.target = target
        slots, orders, steps = [], [], []
        for i, a in enumerate(source.factors):
            for j, b in enumerate(target.factors):
                if a == 0:
                    order, step = b, 1
                elif b == 0:
                    continue  # torsion into Z
                else:
                    g = gcd(a, b)
                    order, step = g, b // g
                slots.append((i, j))
                orders.append(order)
                steps.append(step)
        self.slots = tuple(slots)
        self.steps = tuple(steps)
        super().__init__(len(slots), [[o if k == l else 0 for l in range(len(slots))] for k, o in enumerate(orders) if o])

    def matrix_of(self, c) -> list[list[int]]:
        """Canonical element -> matrix of images of the source basis."""
        user = self.decode(c)
        f = [[0] * self.target.ncanon for _ in range(self.source.ncanon)]
        for (i, j), step, x in zip(self.slots, self.steps, user):
            f[i][j] += step * x
        return [list(self.target.reduce(r)) for r in f]

    def from_matrix(self, f: Sequence[Sequence[int]]) -> tuple[int, ...]:
        """Images of the canonical source basis -> canonical Hom element."""
        user = []
        f = [self.target.reduce(r) for r in f]
        for (i, j), step in zip(self.slots, self.steps):
            x = f[i][j]
            if x % step:
                raise ValueError("not a homomorphism: torsion image of wrong order")
            user.append(x // step)
        for i, a in enumerate(self.source.factors):
            for j, b in enumerate(self.target.factors):
                if a and not b and f[i][j]:
                    raise ValueError("not a homomorphism: torsion mapped to a free coordinate")
        return self.encode(user)

    def evaluate(self, c, x) -> tuple[int, ...]:
        """Apply the homomorphism ``c`` to the canonical source element ``x``."""
        f = self.matrix_of(c)
        out = [0] * self.target.ncanon
        for xi, row in zip(x, f):
            for j, v in enumerate(row):
                out[j] += xi * v
        return self.target.reduce(out)


def hom_group(a: AbelianGroup, b: AbelianGroup) -> HomGroup:
    return HomGroup(a, b)
