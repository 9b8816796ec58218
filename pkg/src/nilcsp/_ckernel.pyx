# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled collector; same algorithm and interface as ``_pykernel``.

Exponents stay Python ints (arbitrary precision); only loop indices and
bookkeeping are typed.
"""

BACKEND = "cython"


cdef class Collector:
    cdef public Py_ssize_t n
    cdef public tuple orders
    cdef public tuple identity
    cdef public list powers
    cdef list _unit
    cdef public list conj
    cdef public list iconj
    cdef dict _cache
    cdef list _trivial_conj

    def __init__(self, orders, powers, commutators):
        cdef Py_ssize_t n = len(orders)
        cdef Py_ssize_t j, k, i
        self.n = n
        self.orders = tuple(orders)
        self.identity = (0,) * n
        self.powers = [powers.get(k) for k in range(n)]
        self._unit = [tuple([int(i == k) for i in range(n)]) for k in range(n)]
        self.conj = [dict() for _ in range(n)]
        self.iconj = [dict() for _ in range(n)]
        self._cache = {}
        self._trivial_conj = [True] * n
        for j in range(n - 1, -1, -1):
            for k in range(j - 1, -1, -1):
                c = commutators.get((j, k))
                if c is None or not any(c):
                    self.conj[k][j] = self._unit[j]
                    self.iconj[k][j] = self._unit[j]
                    continue
                self._trivial_conj[k] = False
                pc = self._apply(k, 1, c)
                tail = self._apply(j, 1, pc)
                img = list(tail)
                img[j] = 1
                self.conj[k][j] = tuple(img)
                t = list(img)
                t[j] = 0
                inv_t = self.inv(self._apply(k, -1, tuple(t)))
                img2 = list(inv_t)
                img2[j] = 1
                self.iconj[k][j] = tuple(img2)

    cdef tuple _gen_image(self, Py_ssize_t k, object a, Py_ssize_t l):
        if a == 1:
            return <tuple>(<dict>self.conj[k])[l]
        if a == -1:
            return <tuple>(<dict>self.iconj[k])[l]
        key = (k, a, l)
        r = self._cache.get(key)
        if r is not None:
            return <tuple>r
        if a > 0:
            half = a // 2
        else:
            half = -((-a) // 2)
        rest = a - 2 * half
        r = self._apply(k, half, self._apply(k, half, self._unit[l]))
        if rest:
            r = self._apply(k, rest, r)
        self._cache[key] = r
        return <tuple>r

    cpdef tuple _apply(self, Py_ssize_t k, object a, tuple x):
        cdef Py_ssize_t l
        cdef tuple res, img
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

    cpdef tuple mul_gen(self, tuple x, Py_ssize_t k, object a):
        cdef Py_ssize_t l, n = self.n
        cdef tuple tail = None
        cdef tuple z, y
        if a == 0:
            return x
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

    cpdef tuple mul(self, tuple x, tuple y):
        cdef Py_ssize_t k
        for k in range(self.n):
            e = y[k]
            if e:
                x = self.mul_gen(x, k, e)
        return x

    cpdef tuple inv(self, tuple x):
        cdef Py_ssize_t k
        cdef tuple res = self.identity
        for k in range(self.n - 1, -1, -1):
            e = x[k]
            if e:
                res = self.mul_gen(res, k, -e)
        return res

    cpdef tuple pow(self, tuple x, object m):
        cdef tuple res
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
        cdef tuple x = self.identity
        for k, a in word:
            x = self.mul_gen(x, k, a)
        return x

    def comm(self, x, y):
        return self.mul(self.mul(x, y), self.inv(self.mul(y, x)))
