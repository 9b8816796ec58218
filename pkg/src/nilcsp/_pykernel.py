"""Pure-Python collector for weighted nilpotent pc presentations.

Elements are exponent tuples. ``orders[k] == 0`` marks an infinite
generator. The subgroups ``N_k = <g_{k+1}, ..., g_n>`` must be normal, which
holds for presentations whose relations only involve strictly later
generators.

Multiplying a normal word by ``g_k^a`` from the right splits the word as
``prefix * g_k^{e_k} * tail`` and rewrites ``tail * g_k^a`` as
``g_k^a * (g_k^{-a} tail g_k^a)``; conjugation by ``g_k^a`` is an automorphism
of ``N_k`` computed by repeated squaring on generator images.
"""

BACKEND = "python"


class Collector:
    def __init__(self, orders, powers, commutators):
        """
        orders: list of relative orders (0 = infinite)
        powers: dict k -> exponent tuple of g_k^{orders[k]} (gens > k only)
        commutators: dict (j, k), j > k -> exponent tuple of [g_j, g_k]
            with the convention [a, b] = a b a^-1 b^-1 (gens > j only)
        """
        n = len(orders)
        self.n = n
        self.orders = tuple(orders)
        self.identity = (0,) * n
        self.powers = [powers.get(k) for k in range(n)]
        self._unit = [tuple(int(i == k) for i in range(n)) for k in range(n)]
        # conj[k][l] = g_k^-1 g_l g_k and iconj[k][l] = g_k g_l g_k^-1, for l > k
        self.conj = [dict() for _ in range(n)]
        self.iconj = [dict() for _ in range(n)]
        self._cache = {}
        self._trivial_conj = [True] * n
        for j in range(n - 1, -1, -1):
            for k in range(j - 1, -1, -1):
                c = commutators.get((j, k))
                if c is None or not any(c):
                    # g_k commutes with g_j
                    self.conj[k][j] = self._unit[j]
                    self.iconj[k][j] = self._unit[j]
                    continue
                self._trivial_conj[k] = False
                # g_k^-1 g_j g_k = phi_k(c) g_j = g_j * phi_j(phi_k(c))
                pc = self._apply(k, 1, c)
                tail = self._apply(j, 1, pc)
                img = list(tail)
                img[j] = 1
                self.conj[k][j] = tuple(img)
                # g_k g_j g_k^-1: phi_k(g_j) = g_j t, so phi_k^-1(g_j) = g_j phi_k^-1(t)^-1
                t = list(img)
                t[j] = 0
                inv_t = self.inv(self._apply(k, -1, tuple(t)))
                img2 = list(inv_t)
                img2[j] = 1
                self.iconj[k][j] = tuple(img2)

    # -- conjugation automorphisms -------------------------------------

    def _gen_image(self, k, a, l):
        """g_k^-a g_l g_k^a for l > k."""
        if a == 1:
            return self.conj[k][l]
        if a == -1:
            return self.iconj[k][l]
        key = (k, a, l)
        r = self._cache.get(key)
        if r is not None:
            return r
        half = a // 2 if a > 0 else -((-a) // 2)
        rest = a - 2 * half
        r = self._apply(k, half, self._apply(k, half, self._unit[l]))
        if rest:
            r = self._apply(k, rest, r)
        self._cache[key] = r
        return r

    def _apply(self, k, a, x):
        """g_k^-a x g_k^a for x in N_k."""
        if a == 0 or self._trivial_conj[k]:
            return x
        res = self.identity
        for l in range(k + 1, self.n):
            e = x[l]
            if e:
                img = self._gen_image(k, a, l)
                if img == self._unit[l]:
                    res = self.mul_gen(res, l, e)
                else:
                    res = self.mul(res, self.pow(img, e))
        return res

    # -- arithmetic -----------------------------------------------------

    def mul_gen(self, x, k, a):
        """Normal form of x * g_k^a."""
        if a == 0:
            return x
        n = self.n
        tail = None
        for l in range(k + 1, n):
            if x[l]:
                tail = (0,) * (k + 1) + x[k + 1:]
                break
        s = x[k] + a
        o = self.orders[k]
        q = 0
        if o:
            q, s = divmod(s, o)
        z = self.identity
        if q and self.powers[k] is not None:
            z = self.pow(self.powers[k], q)
        if tail is not None:
            y = self._apply(k, a, tail)
            z = y if z == self.identity else self.mul(z, y)
        return x[:k] + (s,) + z[k + 1:]

    def mul(self, x, y):
        for k in range(self.n):
            e = y[k]
            if e:
                x = self.mul_gen(x, k, e)
        return x

    def inv(self, x):
        res = self.identity
        for k in range(self.n - 1, -1, -1):
            e = x[k]
            if e:
                res = self.mul_gen(res, k, -e)
        return res

    def pow(self, x, m):
        if m < 0:
            x = self.inv(x)
            m = -m
        res = self.identity
        while m:
            if m & 1:
                res = self.mul(res, x)
            m >>= 1
            if m:
                x = self.mul(x, x)
        return res

    def collect(self, word):
        """Normal form of a word given as (generator index, exponent) pairs."""
        x = self.identity
        for k, a in word:
            x = self.mul_gen(x, k, a)
        return x

    def comm(self, x, y):
        """[x, y] = x y x^-1 y^-1."""
        return self.mul(self.mul(x, y), self.inv(self.mul(y, x)))
