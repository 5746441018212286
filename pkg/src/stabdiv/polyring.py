"""Sparse multivariate polynomials over the Gaussian rationals.

Polynomials are immutable maps from exponent tuples to nonzero
:class:`GaussianRational` coefficients.  Term order is never stored: it is
derived on demand from a :class:`WeightedOrder`, which compares monomials by
weighted degree and breaks ties lexicographically along a variable
precedence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .kernels import GaussianRational, add_terms, leading, mul_terms, order_key

Rational = Fraction
Monomial = tuple

__all__ = [
    "Rational",
    "GaussianRational",
    "Monomial",
    "WeightedOrder",
    "Polynomial",
    "VectorPolynomial",
    "PolynomialSyntaxError",
    "as_coefficient",
    "add",
    "mul",
    "weighted_degree",
    "quasi_components",
    "is_quasi_homogeneous",
    "compare_monomials",
    "leading_term",
    "leading_monomial",
    "vector_leading_term",
    "term_divides",
    "term_quotient",
    "parse",
    "format_poly",
]


def as_coefficient(c) -> GaussianRational:
    """Coerce ints, Fractions, ``"p/q"`` strings and complex-rational pairs."""
    if isinstance(c, GaussianRational):
        return c
    if hasattr(c, "num_re") and hasattr(c, "den"):
        return GaussianRational(Fraction(c.num_re, c.den), Fraction(c.num_im, c.den))
    if isinstance(c, tuple) and len(c) == 2:
        return GaussianRational(c[0], c[1])
    if isinstance(c, complex):
        raise TypeError("floating-point coefficients are not supported")
    if isinstance(c, float):
        raise TypeError("floating-point coefficients are not supported")
    return GaussianRational(c)


@dataclass(frozen=True)
class WeightedOrder:
    """Weighted-degree order with lexicographic tie-break.

    ``precedence`` lists 0-based variable indices from most to least
    significant; the default is ``(0, 1, ..., d-1)``, i.e. ``z1 > z2 > ...``.
    For two variables this is exactly: ``x^k y^l < x^m y^n`` iff the
    weighted degree is smaller, or equal with ``k < m``.
    """

    weights: tuple
    precedence: tuple = None

    def __post_init__(self):
        w = tuple(int(n) for n in self.weights)
        if not w:
            raise ValueError("weights must be non-empty")
        if any(n <= 0 for n in w):
            raise ValueError(f"weights must be positive integers, got {w}")
        prec = tuple(range(len(w))) if self.precedence is None else tuple(int(i) for i in self.precedence)
        if sorted(prec) != list(range(len(w))):
            raise ValueError(f"precedence {prec} is not a permutation of 0..{len(w) - 1}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "precedence", prec)

    @classmethod
    def graded(cls, d: int) -> "WeightedOrder":
        return cls((1,) * d)

    @property
    def dim(self) -> int:
        return len(self.weights)

    def degree(self, m: Sequence[int]) -> int:
        return sum(w * e for w, e in zip(self.weights, m))

    def key(self, m: Monomial) -> tuple:
        """Sort key; larger key means larger monomial."""
        return order_key(m, self.weights, self.precedence, 0)

    def compare(self, a: Monomial, b: Monomial) -> int:
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)


class Polynomial:
    """Immutable sparse polynomial in ``dim`` variables."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping | None = None):
        if dim < 1:
            raise ValueError("dim must be positive")
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(int(e) for e in m)
            if len(m) != dim:
                raise ValueError(f"monomial {m} does not have length {dim}")
            if any(e < 0 for e in m):
                raise ValueError(f"negative exponent in {m}")
            c = as_coefficient(c)
            if c:
                clean[m] = clean[m] + c if m in clean else c
                if not clean[m]:
                    del clean[m]
        self.dim = dim
        self._terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, dim: int, terms: dict) -> "Polynomial":
        # trusted constructor: keys valid, coefficients nonzero GaussianRational
        p = cls.__new__(cls)
        p.dim = dim
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls._wrap(dim, {})

    @classmethod
    def constant(cls, dim: int, c=1) -> "Polynomial":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Polynomial":
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def variable(cls, i: int, dim: int) -> "Polynomial":
        """The coordinate function ``z_{i+1}`` (``i`` is 0-based)."""
        e = [0] * dim
        e[i] = 1
        return cls._wrap(dim, {tuple(e): GaussianRational(1)})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def monomials(self):
        return self._terms.keys()

    def coefficient(self, m: Monomial) -> GaussianRational:
        return self._terms.get(tuple(m), GaussianRational(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def total_degree(self) -> int:
        if not self._terms:
            raise ValueError("the zero polynomial has no degree")
        return max(sum(m) for m in self._terms)

    def min_total_degree(self) -> int:
        if not self._terms:
            raise ValueError("the zero polynomial has no degree")
        return min(sum(m) for m in self._terms)

    def homogeneous_parts(self) -> dict:
        return quasi_components(self, WeightedOrder.graded(self.dim))

    def sorted_terms(self, order: WeightedOrder) -> list:
        """Terms ``(monomial, coeff)`` from largest to smallest under ``order``."""
        return sorted(self._terms.items(), key=lambda mc: order.key(mc[0]), reverse=True)

    def _check(self, other: "Polynomial"):
        if not isinstance(other, Polynomial):
            raise TypeError(f"expected Polynomial, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        c = as_coefficient(other)
        return Polynomial._wrap(self.dim, {(0,) * self.dim: c} if c else {})

    def __add__(self, other):
        other = self._lift(other)
        return Polynomial._wrap(self.dim, add_terms(self._terms, other._terms))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return Polynomial._wrap(self.dim, add_terms(self._terms, other._terms, GaussianRational(-1)))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return Polynomial._wrap(self.dim, {m: -c for m, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, VectorPolynomial):
            return NotImplemented
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        return Polynomial._wrap(self.dim, mul_terms(self._terms, other._terms))

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "Polynomial":
        c = as_coefficient(c)
        if not c:
            return Polynomial.zero(self.dim)
        return Polynomial._wrap(self.dim, {m: v * c for m, v in self._terms.items()})

    def shift(self, exps: Sequence[int], c=None) -> "Polynomial":
        """Multiply by the term ``c * z^exps`` (``c`` defaults to 1)."""
        exps = tuple(exps)
        if c is None:
            return Polynomial._wrap(
                self.dim, {tuple(a + b for a, b in zip(m, exps)): v for m, v in self._terms.items()}
            )
        c = as_coefficient(c)
        if not c:
            return Polynomial.zero(self.dim)
        return Polynomial._wrap(
            self.dim, {tuple(a + b for a, b in zip(m, exps)): v * c for m, v in self._terms.items()}
        )

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.dim)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.dim == other.dim and self._terms == other._terms
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self == self._lift(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def __reduce__(self):
        return (Polynomial, (self.dim, self._terms))

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Polynomial({self.dim}, {format_poly(self)!r})"


class VectorPolynomial:
    """Immutable element of ``C[z] (x) C^r``, stored componentwise."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a vector polynomial needs at least one component")
        dims = {c.dim for c in comps}
        if len(dims) != 1:
            raise ValueError(f"components have mixed dimensions {sorted(dims)}")
        self.components = comps

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def rank(self) -> int:
        return len(self.components)

    def __len__(self):
        return len(self.components)

    def __iter__(self) -> Iterator[Polynomial]:
        return iter(self.components)

    def __getitem__(self, i) -> Polynomial:
        return self.components[i]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __bool__(self):
        return not self.is_zero()

    def flat_terms(self) -> dict:
        """Terms keyed by ``(component, e_1, ..., e_d)``."""
        out = {}
        for i, comp in enumerate(self.components):
            for m, c in comp.items():
                out[(i,) + m] = c
        return out

    @classmethod
    def from_flat_terms(cls, rank: int, dim: int, terms: Mapping) -> "VectorPolynomial":
        buckets = [dict() for _ in range(rank)]
        for key, c in terms.items():
            buckets[key[0]][tuple(key[1:])] = c
        return cls(Polynomial._wrap(dim, b) for b in buckets)

    def _check(self, other):
        if not isinstance(other, VectorPolynomial):
            raise TypeError(f"expected VectorPolynomial, got {type(other).__name__}")
        if other.rank != self.rank or other.dim != self.dim:
            raise ValueError("vector polynomial shape mismatch")

    def __add__(self, other):
        self._check(other)
        return VectorPolynomial(a + b for a, b in zip(self.components, other.components))

    def __sub__(self, other):
        self._check(other)
        return VectorPolynomial(a - b for a, b in zip(self.components, other.components))

    def __neg__(self):
        return VectorPolynomial(-a for a in self.components)

    def __rmul__(self, other):
        # polynomial or scalar times a vector
        return VectorPolynomial(other * a if isinstance(other, Polynomial) else a.scale(other)
                                for a in self.components)

    __mul__ = __rmul__

    def __eq__(self, other):
        if not isinstance(other, VectorPolynomial):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"VectorPolynomial({format_poly(self)!r})"


# ---------------------------------------------------------------- operations


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    p._check(q)
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    p._check(q)
    return p * q


def _check_order(p: Polynomial, order: WeightedOrder):
    if order.dim != p.dim:
        raise ValueError(f"order has {order.dim} weights but polynomial has {p.dim} variables")


def weighted_degree(p: Union[Polynomial, VectorPolynomial], order: WeightedOrder) -> int:
    """Largest ``alpha . n`` over the support of ``p``."""
    if isinstance(p, VectorPolynomial):
        nonzero = [c for c in p.components if not c.is_zero()]
        if not nonzero:
            raise ValueError("the zero polynomial has no weighted degree")
        return max(weighted_degree(c, order) for c in nonzero)
    _check_order(p, order)
    if p.is_zero():
        raise ValueError("the zero polynomial has no weighted degree")
    return max(order.degree(m) for m in p.monomials())


def quasi_components(p: Polynomial, order: WeightedOrder) -> dict:
    """Split ``p`` into quasi-homogeneous parts keyed by weighted degree."""
    _check_order(p, order)
    buckets: dict = {}
    for m, c in p.items():
        buckets.setdefault(order.degree(m), {})[m] = c
    return {k: Polynomial._wrap(p.dim, buckets[k]) for k in sorted(buckets)}


def is_quasi_homogeneous(p: Union[Polynomial, VectorPolynomial], order: WeightedOrder) -> bool:
    if isinstance(p, VectorPolynomial):
        degs = set()
        for c in p.components:
            degs.update(order.degree(m) for m in c.monomials())
        return len(degs) <= 1
    _check_order(p, order)
    return len({order.degree(m) for m in p.monomials()}) <= 1


def compare_monomials(a: Monomial, b: Monomial, order: WeightedOrder) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    if len(a) != len(b) or len(a) != order.dim:
        raise ValueError("dimension mismatch")
    return order.compare(tuple(a), tuple(b))


def leading_term(p: Polynomial, order: WeightedOrder):
    """``(coefficient, monomial)`` of the greatest term of ``p``."""
    _check_order(p, order)
    if p.is_zero():
        raise ValueError("the zero polynomial has no leading term")
    m, c = leading(p._terms, order.weights, order.precedence, 0)
    return c, m


def leading_monomial(p: Polynomial, order: WeightedOrder) -> Monomial:
    return leading_term(p, order)[1]


def vector_leading_term(v: VectorPolynomial, order: WeightedOrder):
    """``(component, coefficient, monomial)``, term over position.

    Equal monomials in different components resolve to the lowest index.
    """
    if v.is_zero():
        raise ValueError("the zero vector has no leading term")
    key, c = leading(v.flat_terms(), order.weights, order.precedence, 1)
    return key[0], c, tuple(key[1:])


def term_divides(a, b) -> bool:
    """Whether the term ``a = (coeff, monomial)`` divides ``b``."""
    (ca, ma), (cb, mb) = a, b
    if not as_coefficient(ca) or not as_coefficient(cb):
        raise ValueError("terms must have nonzero coefficients")
    if len(ma) != len(mb):
        raise ValueError("dimension mismatch")
    return all(x <= y for x, y in zip(ma, mb))


def term_quotient(b, a):
    """``b / a`` for terms ``(coeff, monomial)``; ``a`` must divide ``b``."""
    if not term_divides(a, b):
        raise ValueError(f"{a[1]} does not divide {b[1]}")
    (ca, ma), (cb, mb) = a, b
    return as_coefficient(cb) / as_coefficient(ca), tuple(y - x for x, y in zip(ma, mb))


# ---------------------------------------------------------------- text format


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


_TOKEN = re.compile(r"\s*(?:(\d+)|(z\d+|x|y|i)|([-+*/^(),]))")


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mo = _TOKEN.match(text, pos)
        if not mo:
            bad = len(text) - len(text[pos:].lstrip())
            raise PolynomialSyntaxError(f"unexpected character {text[bad]!r}", bad, text)
        start = mo.start(mo.lastindex)
        if mo.group(1):
            toks.append(("num", int(mo.group(1)), start))
        elif mo.group(2):
            toks.append(("name", mo.group(2), start))
        else:
            toks.append((mo.group(3), mo.group(3), start))
        pos = mo.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.vars: set = set()

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise PolynomialSyntaxError(msg, tok[2], self.text)

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            self.fail(f"expected {kind!r}, found {tok[1]!r}", tok)
        return tok

    def rational(self) -> Fraction:
        tok = self.expect("num")
        val = Fraction(tok[1])
        if self.peek()[0] == "/":
            self.next()
            den = self.expect("num")
            if den[1] == 0:
                self.fail("zero denominator", den)
            val /= den[1]
        return val

    def complex_coeff(self) -> GaussianRational:
        # '(' [sign] part [sign part] ')' where a part is rational, rational 'i' or 'i'
        self.expect("(")
        re_part = Fraction(0)
        im_part = Fraction(0)
        seen_re = seen_im = False
        first = True
        while True:
            sign = 1
            tok = self.peek()
            if tok[0] in ("+", "-"):
                self.next()
                sign = -1 if tok[0] == "-" else 1
            elif not first:
                break
            tok = self.peek()
            if tok[0] == "num":
                val = self.rational()
                if self.peek()[:2] == ("name", "i"):
                    self.next()
                    if seen_im:
                        self.fail("repeated imaginary part", tok)
                    im_part, seen_im = sign * val, True
                else:
                    if seen_re or seen_im:
                        self.fail("real part must come first", tok)
                    re_part, seen_re = sign * val, True
            elif tok[0] == "name" and tok[1] == "i":
                self.next()
                if seen_im:
                    self.fail("repeated imaginary part", tok)
                im_part, seen_im = Fraction(sign), True
            else:
                self.fail(f"expected a number, found {tok[1]!r}", tok)
            first = False
            if self.peek()[0] == ")":
                break
        self.expect(")")
        return GaussianRational(re_part, im_part)

    def factor(self, exps: dict):
        tok = self.next()
        if tok[0] != "name" or tok[1] == "i":
            self.fail(f"expected a variable, found {tok[1]!r}", tok)
        name = tok[1]
        if name[0] == "z":
            idx = int(name[1:])
            if idx < 1:
                self.fail("variable indices start at 1", tok)
            self.vars.add(("z", idx))
        else:
            idx = 1 if name == "x" else 2
            self.vars.add(("xy", idx))
        power = 1
        if self.peek()[0] == "^":
            self.next()
            power = self.expect("num")[1]
        exps[idx] = exps.get(idx, 0) + power

    def term(self):
        coeff = GaussianRational(1)
        exps: dict = {}
        tok = self.peek()
        if tok[0] == "num":
            coeff = GaussianRational(self.rational())
            if self.peek()[0] != "*":
                return coeff, exps
            self.next()
        elif tok[0] == "(":
            coeff = self.complex_coeff()
            if self.peek()[0] != "*":
                return coeff, exps
            self.next()
        self.factor(exps)
        while self.peek()[0] == "*":
            self.next()
            self.factor(exps)
        return coeff, exps

    def poly(self) -> list:
        terms = []
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.next()[0] == "-" else 1
        while True:
            c, e = self.term()
            terms.append((c if sign > 0 else -c, e))
            if self.peek()[0] in ("+", "-"):
                sign = -1 if self.next()[0] == "-" else 1
                continue
            break
        return terms


def _is_vector_text(text: str) -> bool:
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        return False
    depth = 0
    for k, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0 and k != len(s) - 1:
                return False
        elif ch == "," and depth == 1:
            return True
    return False


def parse(text: str, dim: int | None = None) -> Union[Polynomial, VectorPolynomial]:
    """Parse a polynomial or a parenthesised, comma-separated vector of them.

    Variables are ``x, y`` (two variables) or ``z1 .. zd``.  When ``dim`` is
    omitted it is inferred: 2 for ``x/y`` or constants, else the largest
    ``z`` index.
    """
    parser = _Parser(text)
    if _is_vector_text(text):
        parser.expect("(")
        comps = []
        while True:
            if parser.peek()[0] in (",", ")"):
                parser.fail("empty component")
            comps.append(parser.poly())
            tok = parser.next()
            if tok[0] == ")":
                break
            if tok[0] != ",":
                parser.fail(f"expected ',' or ')', found {tok[1]!r}", tok)
            if parser.peek()[0] == ")":  # trailing comma: "(p,)"
                parser.next()
                break
        parser.expect("end")
    else:
        if parser.peek()[0] == "end":
            parser.fail("empty polynomial")
        comps = [parser.poly()]
        if parser.peek()[0] != "end":
            parser.fail(f"unexpected {parser.peek()[1]!r}")
    kinds = {k for k, _ in parser.vars}
    if len(kinds) > 1:
        raise PolynomialSyntaxError("cannot mix x/y with z1..zd", 0, text)
    if "xy" in kinds:
        d = 2
        if dim is not None and dim != 2:
            raise PolynomialSyntaxError(f"x/y variables require dim 2, got {dim}", 0, text)
    else:
        top = max((i for _, i in parser.vars), default=0)
        d = dim if dim is not None else max(top, 2)
        if top > d:
            raise PolynomialSyntaxError(f"variable z{top} exceeds dim {d}", 0, text)

    def build(terms):
        out = {}
        for c, e in terms:
            m = tuple(e.get(k + 1, 0) for k in range(d))
            out[m] = out[m] + c if m in out else c
        return Polynomial(d, out)

    polys = [build(t) for t in comps]
    if _is_vector_text(text):
        return VectorPolynomial(polys)
    return polys[0]


def _format_monomial(m: Monomial) -> str:
    names = ["x", "y"] if len(m) == 2 else [f"z{i + 1}" for i in range(len(m))]
    parts = []
    for name, e in zip(names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(p: Union[Polynomial, VectorPolynomial], order: WeightedOrder | None = None) -> str:
    """Compact text form accepted by :func:`parse`; terms in descending order."""
    if isinstance(p, VectorPolynomial):
        body = ",".join(format_poly(c, order) for c in p.components)
        return f"({body},)" if p.rank == 1 else f"({body})"
    if p.is_zero():
        return "0"
    order = order or WeightedOrder.graded(p.dim)
    out = []
    for m, c in p.sorted_terms(order):
        mono = _format_monomial(m)
        if c.is_real():
            r = c.re
            sign = "-" if r < 0 else "+"
            mag = abs(r)
            if mono and mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}" if mono else f"{mag}"
        else:
            sign = "+"
            body = f"{c}*{mono}" if mono else f"{c}"
        if not out:
            out.append(body if sign == "+" else "-" + body)
        else:
            out.append(sign + body)
    return "".join(out)
