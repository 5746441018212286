"""Buchberger's algorithm under a weighted order, plus staircase and gcd tools."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

from .division import divide
from .kernels import GaussianRational, divide_terms
from .polyring import (
    Polynomial,
    WeightedOrder,
    format_poly,
    is_quasi_homogeneous,
    leading_term,
    quasi_components,
    weighted_degree,
)

__all__ = [
    "GroebnerBasis",
    "BeurlingForm",
    "UnreachableDegreeError",
    "s_polynomial",
    "normal_form",
    "buchberger",
    "is_member",
    "quasi_homogeneous_basis",
    "equalize_degrees",
    "default_equalization_degree",
    "staircase",
    "staircase_codimension",
    "ideal_gcd",
    "beurling_form",
]


@dataclass(frozen=True)
class GroebnerBasis:
    generators: tuple
    order: WeightedOrder
    reduced: bool = False

    def leading_monomials(self) -> list:
        return [leading_term(g, self.order)[1] for g in self.generators]

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def to_dict(self) -> dict:
        return {
            "weights": list(self.order.weights),
            "reduced": self.reduced,
            "generators": [format_poly(g, self.order) for g in self.generators],
        }


class UnreachableDegreeError(ValueError):
    def __init__(self, index: int, target: int, degree: int):
        super().__init__(
            f"degree {target} is not reachable from generator {index} of degree {degree}; raise m"
        )
        self.index = index
        self.target = target
        self.degree = degree


def _lcm_mono(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def s_polynomial(f: Polynomial, g: Polynomial, order: WeightedOrder) -> Polynomial:
    """``(L/LT(f)) f - (L/LT(g)) g`` with ``L`` the lcm of the leading monomials."""
    if f.is_zero() or g.is_zero():
        raise ValueError("S-polynomial of a zero polynomial")
    cf, mf = leading_term(f, order)
    cg, mg = leading_term(g, order)
    lcm = _lcm_mono(mf, mg)
    left = f.shift(tuple(a - b for a, b in zip(lcm, mf)), 1 / cf)
    right = g.shift(tuple(a - b for a, b in zip(lcm, mg)), 1 / cg)
    return left - right


def normal_form(h: Polynomial, basis: Sequence[Polynomial], order: WeightedOrder) -> Polynomial:
    """Remainder of ``h`` against ``basis`` taken in the given order.

    Unlike :func:`~stabdiv.division.divide` this accepts generators with
    equal leading monomials.
    """
    if not basis or h.is_zero():
        return h
    _, rem, _ = divide_terms(
        h._terms, [b._terms for b in basis], order.weights, order.precedence, 0, False
    )
    return Polynomial._wrap(h.dim, rem)


def _monic(f: Polynomial, order: WeightedOrder) -> Polynomial:
    c, _ = leading_term(f, order)
    return f if c == 1 else f.scale(1 / c)


def _reduce_basis(basis: list, order: WeightedOrder) -> list:
    lms = [leading_term(g, order)[1] for g in basis]
    keep = []
    for i, mi in enumerate(lms):
        redundant = False
        for j, mj in enumerate(lms):
            if i == j:
                continue
            if all(a <= b for a, b in zip(mj, mi)) and (mj != mi or j < i):
                redundant = True
                break
        if not redundant:
            keep.append(_monic(basis[i], order))
    out = []
    for i, g in enumerate(keep):
        c, m = leading_term(g, order)
        rest = g - Polynomial._wrap(g.dim, {m: c})
        others = keep[:i] + keep[i + 1:]
        out.append(Polynomial._wrap(g.dim, {m: c}) + normal_form(rest, others, order))
    out.sort(key=lambda g: order.key(leading_term(g, order)[1]), reverse=True)
    return out


def buchberger(gens: Sequence[Polynomial], order: WeightedOrder, reduce: bool = True) -> GroebnerBasis:
    """Groebner basis by Buchberger's algorithm.

    Pairs are processed smallest-lcm first (normal strategy); pairs with
    coprime leading monomials are skipped.
    """
    gens = [g for g in gens]
    if not gens:
        raise ValueError("empty generator list")
    for i, g in enumerate(gens):
        if g.is_zero():
            raise ValueError(f"generator {i} is zero")
        if g.dim != order.dim:
            raise ValueError(f"generator {i} has {g.dim} variables, order has {order.dim}")
    basis = [_monic(g, order) for g in gens]
    lms = [leading_term(g, order)[1] for g in basis]
    heap: list = []
    counter = itertools.count()

    def push_pairs(j):
        for i in range(j):
            lcm = _lcm_mono(lms[i], lms[j])
            if all(a == 0 or b == 0 for a, b in zip(lms[i], lms[j])):
                continue  # coprime leading monomials: S-pair reduces to 0
            heapq.heappush(heap, (order.key(lcm), next(counter), i, j))

    for j in range(len(basis)):
        push_pairs(j)
    while heap:
        _, _, i, j = heapq.heappop(heap)
        r = normal_form(s_polynomial(basis[i], basis[j], order), basis, order)
        if r.is_zero():
            continue
        basis.append(_monic(r, order))
        lms.append(leading_term(r, order)[1])
        push_pairs(len(basis) - 1)
    if reduce:
        return GroebnerBasis(tuple(_reduce_basis(basis, order)), order, True)
    return GroebnerBasis(tuple(basis), order, False)


def is_member(h: Polynomial, gb: GroebnerBasis) -> bool:
    """Ideal membership: the remainder against a Groebner basis vanishes."""
    if h.is_zero():
        return True
    if gb.reduced:
        return divide(h, gb.generators, gb.order, trace=False).remainder.is_zero()
    return normal_form(h, gb.generators, gb.order).is_zero()


def quasi_homogeneous_basis(gens: Sequence[Polynomial], order: WeightedOrder, reduce: bool = True) -> GroebnerBasis:
    """Buchberger on quasi-homogeneous input; verifies the output stays quasi-homogeneous."""
    for i, g in enumerate(gens):
        if g.is_zero() or not is_quasi_homogeneous(g, order):
            raise ValueError(f"generator {i} is not {order.weights}-quasi-homogeneous")
    gb = buchberger(gens, order, reduce)
    for i, g in enumerate(gb.generators):
        if len(quasi_components(g, order)) != 1:
            raise RuntimeError(
                f"basis element {i} ({format_poly(g)}) is not quasi-homogeneous; "
                "closure under Buchberger failed"
            )
    return gb


def _exponent_vectors(weights: Sequence[int], target: int) -> list:
    """All ``beta >= 0`` with ``beta . weights == target``, largest first."""
    out = []

    def rec(i, remaining, prefix):
        if i == len(weights) - 1:
            if remaining % weights[i] == 0:
                out.append(tuple(prefix) + (remaining // weights[i],))
            return
        for e in range(remaining // weights[i], -1, -1):
            rec(i + 1, remaining - e * weights[i], prefix + [e])

    if target < 0:
        return []
    rec(0, target, [])
    return out


def equalize_degrees(gb, order: WeightedOrder, m: int) -> list:
    """All products ``z^beta g_i`` of weighted degree exactly ``m``, deduplicated."""
    gens = gb.generators if isinstance(gb, GroebnerBasis) else tuple(gb)
    out = []
    seen = set()
    for i, g in enumerate(gens):
        if g.is_zero() or not is_quasi_homogeneous(g, order):
            raise ValueError(f"generator {i} is not quasi-homogeneous")
        e = weighted_degree(g, order)
        if e > m:
            raise UnreachableDegreeError(i, m, e)
        betas = _exponent_vectors(order.weights, m - e)
        if not betas:
            raise UnreachableDegreeError(i, m, e)
        for beta in betas:
            p = g.shift(beta)
            if p not in seen:
                seen.add(p)
                out.append(p)
    return out


def _representable(weights: Sequence[int], upto: int) -> list:
    ok = [False] * (upto + 1)
    ok[0] = True
    for s in range(1, upto + 1):
        ok[s] = any(s >= w and ok[s - w] for w in weights)
    return ok


def default_equalization_degree(gb, order: WeightedOrder) -> int:
    """Smallest ``m >= max degree + conductor`` reachable from every generator.

    For coprime weights ``(n1, n2)`` the conductor is ``n1*n2 - n1 - n2 + 1``;
    beyond it every integer is a non-negative combination of the weights.
    Non-coprime weights fall back to the conductor of ``weights / gcd``
    scaled by the gcd, then search upward.
    """
    gens = gb.generators if isinstance(gb, GroebnerBasis) else tuple(gb)
    degs = [weighted_degree(g, order) for g in gens]
    w = order.weights
    g = reduce(math.gcd, w)
    red = [x // g for x in w]
    bound = max(red) * max(red) + 1
    ok = _representable(red, bound)
    conductor = next(c for c in range(bound + 1) if all(ok[c:]))
    start = max(degs) + conductor * g
    limit = start + math.lcm(*w) * (len(w) + 1) + max(degs)
    reach = _representable(w, limit)
    for m in range(start, limit + 1):
        if all(reach[m - e] for e in degs):
            return m
    raise UnreachableDegreeError(0, limit, degs[0])


def _ordered_lms(gb) -> list:
    if isinstance(gb, GroebnerBasis):
        return gb.leading_monomials()
    gens, order = gb
    return [leading_term(g, order)[1] for g in gens]


def staircase(gb):
    """Standard monomials (not divisible by any leading monomial), or ``None`` if infinite."""
    lms = _ordered_lms(gb)
    d = len(lms[0])
    if any(all(e == 0 for e in m) for m in lms):
        return []
    bounds = []
    for i in range(d):
        pure = [m[i] for m in lms if all(e == 0 for k, e in enumerate(m) if k != i)]
        if not pure:
            return None
        bounds.append(min(pure))
    out = []
    for mono in itertools.product(*(range(b) for b in bounds)):
        if not any(all(a <= b for a, b in zip(lm, mono)) for lm in lms):
            out.append(mono)
    return out


def staircase_codimension(gb):
    """Number of standard monomials; ``math.inf`` when some variable has no pure power."""
    st = staircase(gb)
    return math.inf if st is None else len(st)


# ------------------------------------------------ bivariate gcd over Q(i)
# Univariate polynomials are lists of GaussianRational, lowest power first.


def _u_trim(a):
    while a and not a[-1]:
        a.pop()
    return a


def _u_sub(a, b):
    n = max(len(a), len(b))
    z = GaussianRational(0)
    return _u_trim([(a[i] if i < len(a) else z) - (b[i] if i < len(b) else z) for i in range(n)])


def _u_mul(a, b):
    if not a or not b:
        return []
    out = [GaussianRational(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _u_trim(out)


def _u_divmod(a, b):
    a = list(a)
    q = [GaussianRational(0)] * max(len(a) - len(b) + 1, 0)
    lb = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] / lb
        q[shift] = c
        for i, y in enumerate(b):
            a[i + shift] = a[i + shift] - c * y
        a.pop()
        _u_trim(a)
    return _u_trim(q), a


def _u_gcd(a, b):
    a, b = list(a), list(b)
    while b:
        a, b = b, _u_divmod(a, b)[1]
    if not a:
        return []
    lc = a[-1]
    return [c / lc for c in a]


def _u_exact_div(a, b):
    q, r = _u_divmod(a, b)
    if r:
        raise ArithmeticError("inexact univariate division")
    return q


# Bivariate: list indexed by y-power of univariate-in-x coefficient lists.


def _to_bi(p: Polynomial) -> list:
    top = max(m[1] for m in p.monomials())
    out = [[] for _ in range(top + 1)]
    for (ex, ey), c in p.items():
        row = out[ey]
        while len(row) <= ex:
            row.append(GaussianRational(0))
        row[ex] = c
    return [_u_trim(r) for r in out]


def _from_bi(b: list) -> Polynomial:
    terms = {}
    for ey, row in enumerate(b):
        for ex, c in enumerate(row):
            if c:
                terms[(ex, ey)] = c
    return Polynomial._wrap(2, terms)


def _bi_trim(b):
    while b and not b[-1]:
        b.pop()
    return b


def _bi_content(b):
    return reduce(_u_gcd, [r for r in b if r], [])


def _bi_pp(b):
    c = _bi_content(b)
    return [_u_exact_div(r, c) if r else [] for r in b]


def _bi_prem(a, b):
    a = [list(r) for r in a]
    lb = b[-1]
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        la = a[-1]
        shift = len(a) - 1 - db
        new = [_u_mul(lb, r) for r in a]
        for i, r in enumerate(b):
            new[i + shift] = _u_sub(new[i + shift], _u_mul(la, r))
        a = _bi_trim(new)
    return a


def _bi_gcd(a, b):
    ca, cb = _bi_content(a), _bi_content(b)
    c = _u_gcd(ca, cb)
    a, b = _bi_pp(a), _bi_pp(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _bi_prem(a, b)
        a, b = b, (_bi_pp(r) if r else [])
    g = _bi_pp(a) if len(a) > 1 else [[GaussianRational(1)]]
    return [_u_mul(c, r) for r in g]


def ideal_gcd(gens: Sequence[Polynomial], order: WeightedOrder | None = None) -> Polynomial:
    """Greatest common divisor of two-variable polynomials, monic in ``order``.

    Computed as polynomials in ``y`` over ``Q(i)[x]`` with a primitive
    pseudo-remainder sequence (no factorisation).
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise ValueError("need at least one nonzero generator")
    if any(g.dim != 2 for g in gens):
        raise ValueError("gcd is implemented for two variables only")
    order = order or WeightedOrder.graded(2)
    g = reduce(_bi_gcd, [_to_bi(p) for p in gens])
    return _monic(_from_bi(g), order)


@dataclass(frozen=True)
class BeurlingForm:
    """``I = p J`` with ``p = gcd(I)``; ``cofactor_ideal`` generates ``J``."""

    gcd_part: Polynomial
    cofactor_ideal: tuple
    codimension: object  # int or math.inf
    cofactor_basis: GroebnerBasis | None = None

    def to_dict(self) -> dict:
        return {
            "gcd": format_poly(self.gcd_part),
            "cofactors": [format_poly(c) for c in self.cofactor_ideal],
            "codimension": "infinite" if self.codimension == math.inf else self.codimension,
            "cofactor_basis": [format_poly(c) for c in self.cofactor_basis.generators]
            if self.cofactor_basis else None,
        }


def beurling_form(gens: Sequence[Polynomial], order: WeightedOrder | None = None) -> BeurlingForm:
    order = order or WeightedOrder.graded(2)
    p = ideal_gcd(gens, order)
    cofactors = []
    for i, g in enumerate(gens):
        res = divide(g, [p], order, trace=False)
        if not res.remainder.is_zero():
            raise ArithmeticError(f"gcd does not divide generator {i}")
        cofactors.append(res.quotients[0])
    gb = buchberger(cofactors, order)
    return BeurlingForm(p, tuple(cofactors), staircase_codimension(gb), gb)
