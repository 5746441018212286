"""Pure-Python reference kernels.

``_kernels.pyx`` is a line-for-line typed copy of this module; keep the two
in sync.  Term maps are plain dicts keyed by exponent tuples.  In vector
mode a key is ``(component, e_1, ..., e_d)`` and divisibility additionally
requires equal components.
"""

from fractions import Fraction
from heapq import heappop, heappush
from math import gcd

BACKEND = "python"


class GaussianRational:
    """Exact complex rational ``(re_num + im_num*i) / den`` in lowest terms."""

    __slots__ = ("num_re", "num_im", "den")

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
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, -other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return _add(other, -self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return _mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return _div(self, other)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return _div(other, self)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return (self.num_re == other.num_re and self.num_im == other.num_im
                and self.den == other.den)

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


def _make(a, b, c):
    z = GaussianRational.__new__(GaussianRational)
    z.num_re = a
    z.num_im = b
    z.den = c
    return z


def _norm(a, b, c):
    if c == 1:
        return _make(a, b, 1)
    g = gcd(gcd(a, b), c)
    if g != 1:
        a //= g
        b //= g
        c //= g
    return _make(a, b, c)


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, int):
        return _make(x, 0, 1)
    if isinstance(x, Fraction):
        return _make(x.numerator, 0, x.denominator)
    if hasattr(x, "num_re") and hasattr(x, "den"):
        # instance of the other backend's class
        return _make(x.num_re, x.num_im, x.den)
    return NotImplemented


def _add(x, y):
    c1 = x.den
    c2 = y.den
    if c1 == c2:
        return _norm(x.num_re + y.num_re, x.num_im + y.num_im, c1)
    return _norm(x.num_re * c2 + y.num_re * c1, x.num_im * c2 + y.num_im * c1, c1 * c2)


def _mul(x, y):
    a1 = x.num_re
    b1 = x.num_im
    a2 = y.num_re
    b2 = y.num_im
    if b1 == 0 and b2 == 0:
        return _norm(a1 * a2, 0, x.den * y.den)
    return _norm(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, x.den * y.den)


def _div(x, y):
    a2 = y.num_re
    b2 = y.num_im
    if a2 == 0 and b2 == 0:
        raise ZeroDivisionError("division by zero Gaussian rational")
    a1 = x.num_re
    b1 = x.num_im
    c2 = y.den
    return _norm((a1 * a2 + b1 * b2) * c2, (b1 * a2 - a1 * b2) * c2,
                 x.den * (a2 * a2 + b2 * b2))


def add_terms(p, q, scale=None):
    """Return ``p + scale*q`` as a new dict (``scale`` defaults to 1)."""
    out = dict(p)
    for m, c in q.items():
        if scale is not None:
            c = c * scale
            if not c:
                continue
        old = out.get(m)
        if old is None:
            out[m] = c
        else:
            s = old + c
            if s:
                out[m] = s
            else:
                del out[m]
    return out


def mul_terms(p, q):
    """Product of two term maps over the same exponent length."""
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple([u + v for u, v in zip(m1, m2)])
            c = c1 * c2
            old = out.get(m)
            if old is None:
                out[m] = c
            else:
                s = old + c
                if s:
                    out[m] = s
                else:
                    del out[m]
    return out


def order_key(m, weights, precedence, prefix):
    """Sort key of a (possibly component-prefixed) exponent tuple.

    Larger key means larger term: weighted degree first, then exponents in
    precedence order, then (vector mode) the lower component index.
    """
    deg = 0
    for w, e in zip(weights, m[prefix:]):
        deg += w * e
    key = [deg]
    for i in precedence:
        key.append(m[prefix + i])
    if prefix:
        key.append(-m[0])
    return tuple(key)


def leading(terms, weights, precedence, prefix):
    best = None
    best_key = None
    for m in terms:
        k = order_key(m, weights, precedence, prefix)
        if best_key is None or k > best_key:
            best = m
            best_key = k
    return best, terms[best]


def divide_terms(h, gens, weights, precedence, prefix, record_trace=True):
    """Weighted-order division of ``h`` by ``gens`` (in the given order).

    When several leading terms divide the current leading term, the
    generator with the largest position in ``gens`` is used.  Returns
    ``(quotients, remainder, trace)``; quotient maps are keyed by plain
    exponent tuples, remainder and trace terms by full keys.
    """
    k = len(gens)
    leads = []
    for g in gens:
        lm, lc = leading(g, weights, precedence, prefix)
        leads.append((lm, lc))
    quotients = [{} for _ in range(k)]
    remainder = {}
    trace = []
    p = dict(h)
    heap = []
    for m in p:
        heappush(heap, (tuple([-x for x in order_key(m, weights, precedence, prefix)]), m))
    while heap:
        _, m = heappop(heap)
        c = p.get(m)
        if c is None:
            continue
        chosen = -1
        for i in range(k - 1, -1, -1):
            lm = leads[i][0]
            ok = True
            for j in range(prefix):
                if lm[j] != m[j]:
                    ok = False
                    break
            if ok:
                for j in range(prefix, len(m)):
                    if lm[j] > m[j]:
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
        lm, lc = leads[chosen]
        qc = c / lc
        qm = tuple([m[j] - lm[j] for j in range(prefix, len(m))])
        quo = quotients[chosen]
        old = quo.get(qm)
        if old is None:
            quo[qm] = qc
        else:
            s = old + qc
            if s:
                quo[qm] = s
            else:
                del quo[qm]
        if record_trace:
            trace.append(("divide", m, c, chosen))
        for gm, gc in gens[chosen].items():
            if gm == lm:
                continue
            if prefix:
                tm = gm[:prefix] + tuple([gm[prefix + j] + qm[j] for j in range(len(qm))])
            else:
                tm = tuple([gm[j] + qm[j] for j in range(len(qm))])
            delta = qc * gc
            old = p.get(tm)
            if old is None:
                p[tm] = -delta
                heappush(heap, (tuple([-x for x in order_key(tm, weights, precedence, prefix)]), tm))
            else:
                s = old - delta
                if s:
                    p[tm] = s
                else:
                    del p[tm]
    return quotients, remainder, trace
