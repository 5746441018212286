# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels; mirror of ``_kernels_py``.  Keep the two in sync."""

from fractions import Fraction
from heapq import heappop, heappush
from math import gcd

BACKEND = "cython"


cdef class GaussianRational:
    """Exact complex rational ``(re_num + im_num*i) / den`` in lowest terms."""

    cdef readonly object num_re
    cdef readonly object num_im
    cdef readonly object den

    def __init__(self, re=0, im=0):
        re = Fraction(re)
        im = Fraction(im)
        den = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        a = re.numerator * (den // re.denominator)
        b = im.numerator * (den // im.denominator)
        g = gcd(gcd(a, b), den)
        self.num_re = a // g
        self.num_im = b // g
        self.den = den // g

    @property
    def re(self):
        return Fraction(self.num_re, self.den)

    @property
    def im(self):
        return Fraction(self.num_im, self.den)

    def abs2(self):
        return Fraction(self.num_re * self.num_re + self.num_im * self.num_im,
                        self.den * self.den)

    def conjugate(self):
        return _make(self.num_re, -self.num_im, self.den)

    def is_real(self):
        return self.num_im == 0

    def __bool__(self):
        return self.num_re != 0 or self.num_im != 0

    def __neg__(self):
        return _make(-self.num_re, -self.num_im, self.den)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _add(self, o)

    def __radd__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _add(o, self)

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _add(self, _make(-o.num_re, -o.num_im, o.den))

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _add(o, _make(-self.num_re, -self.num_im, self.den))

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _mul(self, o)

    def __rmul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _mul(o, self)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _div(self, o)

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return _div(o, self)

    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self.num_re == o.num_re and self.num_im == o.num_im and self.den == o.den

    def __ne__(self, other):
        r = self.__eq__(other)
        if r is NotImplemented:
            return r
        return not r

    def __hash__(self):
        if self.num_im == 0:
            return hash(Fraction(self.num_re, self.den))
        return hash((self.num_re, self.num_im, self.den))

    def __reduce__(self):
        return (GaussianRational, (self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        re = Fraction(self.num_re, self.den)
        if self.num_im == 0:
            return str(re)
        im = Fraction(self.num_im, self.den)
        sign = "-" if im < 0 else "+"
        return f"({re}{sign}{abs(im)}i)"


cdef inline GaussianRational _make(object a, object b, object c):
    cdef GaussianRational z = GaussianRational.__new__(GaussianRational)
    z.num_re = a
    z.num_im = b
    z.den = c
    return z


cdef GaussianRational _norm(object a, object b, object c):
    if c == 1:
        return _make(a, b, 1)
    g = gcd(gcd(a, b), c)
    if g != 1:
        a //= g
        b //= g
        c //= g
    return _make(a, b, c)


cdef GaussianRational _coerce(object x):
    if isinstance(x, GaussianRational):
        return <GaussianRational>x
    if isinstance(x, int):
        return _make(x, 0, 1)
    if isinstance(x, Fraction):
        return _make(x.numerator, 0, x.denominator)
    if hasattr(x, "num_re") and hasattr(x, "den"):
        # instance of the other backend's class
        return _make(x.num_re, x.num_im, x.den)
    return None


cdef GaussianRational _add(GaussianRational x, GaussianRational y):
    c1 = x.den
    c2 = y.den
    if c1 == c2:
        return _norm(x.num_re + y.num_re, x.num_im + y.num_im, c1)
    return _norm(x.num_re * c2 + y.num_re * c1, x.num_im * c2 + y.num_im * c1, c1 * c2)


cdef GaussianRational _mul(GaussianRational x, GaussianRational y):
    a1 = x.num_re
    b1 = x.num_im
    a2 = y.num_re
    b2 = y.num_im
    if b1 == 0 and b2 == 0:
        return _norm(a1 * a2, 0, x.den * y.den)
    return _norm(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, x.den * y.den)


cdef GaussianRational _div(GaussianRational x, GaussianRational y):
    a2 = y.num_re
    b2 = y.num_im
    if a2 == 0 and b2 == 0:
        raise ZeroDivisionError("division by zero Gaussian rational")
    a1 = x.num_re
    b1 = x.num_im
    c2 = y.den
    return _norm((a1 * a2 + b1 * b2) * c2, (b1 * a2 - a1 * b2) * c2,
                 x.den * (a2 * a2 + b2 * b2))


cdef inline bint _nonzero(GaussianRational z):
    return z.num_re != 0 or z.num_im != 0


def add_terms(dict p, dict q, scale=None):
    """Return ``p + scale*q`` as a new dict (``scale`` defaults to 1)."""
    cdef dict out = dict(p)
    cdef GaussianRational c, s
    cdef GaussianRational sc = None if scale is None else _coerce(scale)
    for m, cq in q.items():
        c = <GaussianRational>cq
        if sc is not None:
            c = _mul(c, sc)
            if not _nonzero(c):
                continue
        old = out.get(m)
        if old is None:
            out[m] = c
        else:
            s = _add(<GaussianRational>old, c)
            if _nonzero(s):
                out[m] = s
            else:
                del out[m]
    return out


def mul_terms(dict p, dict q):
    """Product of two term maps over the same exponent length."""
    cdef dict out = {}
    cdef tuple m1, m2
    cdef Py_ssize_t j, n
    cdef GaussianRational c, s
    for k1, c1 in p.items():
        m1 = <tuple>k1
        n = len(m1)
        for k2, c2 in q.items():
            m2 = <tuple>k2
            m = tuple([<long>m1[j] + <long>m2[j] for j in range(n)])
            c = _mul(<GaussianRational>c1, <GaussianRational>c2)
            old = out.get(m)
            if old is None:
                out[m] = c
            else:
                s = _add(<GaussianRational>old, c)
                if _nonzero(s):
                    out[m] = s
                else:
                    del out[m]
    return out


cpdef tuple order_key(tuple m, tuple weights, tuple precedence, int prefix):
    """Sort key of a (possibly component-prefixed) exponent tuple.

    Larger key means larger term: weighted degree first, then exponents in
    precedence order, then (vector mode) the lower component index.
    """
    cdef long deg = 0
    cdef Py_ssize_t j, d = len(weights)
    for j in range(d):
        deg += <long>weights[j] * <long>m[prefix + j]
    key = [deg]
    for j in range(d):
        key.append(m[prefix + <long>precedence[j]])
    if prefix:
        key.append(-<long>m[0])
    return tuple(key)


cdef tuple _neg_key(tuple m, tuple weights, tuple precedence, int prefix):
    cdef long deg = 0
    cdef Py_ssize_t j, d = len(weights)
    for j in range(d):
        deg += <long>weights[j] * <long>m[prefix + j]
    key = [-deg]
    for j in range(d):
        key.append(-<long>m[prefix + <long>precedence[j]])
    if prefix:
        key.append(<long>m[0])
    return tuple(key)


def leading(dict terms, weights, precedence, int prefix):
    cdef tuple w = tuple(weights)
    cdef tuple pr = tuple(precedence)
    best = None
    best_key = None
    for m in terms:
        k = order_key(m, w, pr, prefix)
        if best_key is None or k > best_key:
            best = m
            best_key = k
    return best, terms[best]


def divide_terms(dict h, list gens, weights, precedence, int prefix, bint record_trace=True):
    """Weighted-order division of ``h`` by ``gens`` (in the given order).

    When several leading terms divide the current leading term, the
    generator with the largest position in ``gens`` is used.  Returns
    ``(quotients, remainder, trace)``; quotient maps are keyed by plain
    exponent tuples, remainder and trace terms by full keys.
    """
    cdef tuple w = tuple(weights)
    cdef tuple pr = tuple(precedence)
    cdef Py_ssize_t k = len(gens)
    cdef Py_ssize_t i, j, n, chosen
    cdef bint ok
    cdef tuple m, lm, qm, gm, tm
    cdef GaussianRational c, lc, qc, delta, s
    cdef dict p, quo, remainder = {}
    cdef list heap = [], trace = [], leads = [], quotients
    for g in gens:
        leads.append(leading(g, w, pr, prefix))
    quotients = [{} for _ in range(k)]
    p = dict(h)
    for key in p:
        heappush(heap, (_neg_key(key, w, pr, prefix), key))
    while heap:
        m = heappop(heap)[1]
        cobj = p.get(m)
        if cobj is None:
            continue
        c = <GaussianRational>cobj
        n = len(m)
        chosen = -1
        for i in range(k - 1, -1, -1):
            lm = <tuple>(<tuple>leads[i])[0]
            ok = True
            for j in range(prefix):
                if lm[j] != m[j]:
                    ok = False
                    break
            if ok:
                for j in range(prefix, n):
                    if <long>lm[j] > <long>m[j]:
                        ok = False
                        break
            if ok:
                chosen = i
                break
        del p[m]
        if chosen < 0:
            remainder[m] = c
            if record_trace:
                trace.append(("remainder", m, c, -1))
            continue
        lm = <tuple>(<tuple>leads[chosen])[0]
        lc = <GaussianRational>(<tuple>leads[chosen])[1]
        qc = _div(c, lc)
        qm = tuple([<long>m[j] - <long>lm[j] for j in range(prefix, n)])
        quo = <dict>quotients[chosen]
        old = quo.get(qm)
        if old is None:
            quo[qm] = qc
        else:
            s = _add(<GaussianRational>old, qc)
            if _nonzero(s):
                quo[qm] = s
            else:
                del quo[qm]
        if record_trace:
            trace.append(("divide", m, c, chosen))
        for gk, gc in (<dict>gens[chosen]).items():
            gm = <tuple>gk
            if gm == lm:
                continue
            if prefix:
                tm = gm[:prefix] + tuple([<long>gm[prefix + j] + <long>qm[j] for j in range(n - prefix)])
            else:
                tm = tuple([<long>gm[j] + <long>qm[j] for j in range(n)])
            delta = _mul(qc, <GaussianRational>gc)
            old = p.get(tm)
            if old is None:
                p[tm] = _make(-delta.num_re, -delta.num_im, delta.den)
                heappush(heap, (_neg_key(tm, w, pr, prefix), tm))
            else:
                s = _add(<GaussianRational>old, _make(-delta.num_re, -delta.num_im, delta.den))
                if _nonzero(s):
                    p[tm] = s
                else:
                    del p[tm]
    return quotients, remainder, trace
