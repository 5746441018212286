"""Division with remainder under a weighted monomial order.

Generators are sorted so that ``LT(f_1) > ... > LT(f_k)`` and, whenever
several leading terms divide the current leading term, the one with the
largest index in that sorted list is used.  Results are reported in the
caller's original generator order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import NamedTuple, Sequence, Union

from .kernels import divide_terms, order_key
from .norms import SpaceParams, norm_sq
from .polyring import (
    Polynomial,
    VectorPolynomial,
    WeightedOrder,
    format_poly,
    is_quasi_homogeneous,
    leading_term,
    weighted_degree,
)

__all__ = [
    "TraceStep",
    "DivisionResult",
    "StepConstant",
    "DivisionRatio",
    "divide",
    "divide_vector",
    "stability_ratio",
    "step_constant",
    "linear_constant",
]


@dataclass(frozen=True)
class TraceStep:
    kind: str  # "divide" or "remainder"
    coeff: object
    monomial: tuple
    index: int | None = None  # caller's generator index for "divide"
    component: int | None = None  # vector division only

    def term_text(self) -> str:
        text = format_poly(Polynomial._wrap(len(self.monomial), {self.monomial: self.coeff}))
        return text if self.component is None else f"{text}@{self.component}"

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "term": self.term_text()}
        if self.index is not None:
            out["index"] = self.index
        return out

    def to_line(self) -> str:
        if self.kind == "divide":
            return f"divide\t{self.index}\t{self.term_text()}"
        return f"remainder\t-\t{self.term_text()}"


@dataclass(frozen=True)
class DivisionResult:
    """``h = sum(a_i f_i) + r`` with the step trace that produced it."""

    quotients: tuple
    remainder: Union[Polynomial, VectorPolynomial]
    trace: tuple = ()

    def reconstruct(self, gens: Sequence) -> Union[Polynomial, VectorPolynomial]:
        total = self.remainder
        for a, f in zip(self.quotients, gens):
            total = total + a * f
        return total

    def products(self, gens: Sequence) -> list:
        return [a * f for a, f in zip(self.quotients, gens)]

    def to_dict(self, include_trace: bool = True) -> dict:
        out = {
            "quotients": [format_poly(a) for a in self.quotients],
            "remainder": format_poly(self.remainder),
        }
        if include_trace:
            out["trace"] = [s.to_dict() for s in self.trace]
        return out

    def trace_json(self) -> str:
        return json.dumps([s.to_dict() for s in self.trace])

    def trace_text(self) -> str:
        return "\n".join(s.to_line() for s in self.trace)


def _sorted_indices(keys: list) -> list:
    idx = sorted(range(len(keys)), key=lambda i: keys[i], reverse=True)
    for a, b in zip(idx, idx[1:]):
        if keys[a] == keys[b]:
            raise ValueError(
                f"generators {a} and {b} have the same leading monomial; reduce the set first"
            )
    return idx


def _check_gens(h, gens, order, kind):
    if not gens:
        raise ValueError("empty generator list")
    for i, f in enumerate(gens):
        if not isinstance(f, kind):
            raise TypeError(f"generator {i} is not a {kind.__name__}")
        if f.is_zero():
            raise ValueError(f"generator {i} is zero")
        if f.dim != h.dim:
            raise ValueError(f"generator {i} has {f.dim} variables, dividend has {h.dim}")
    if order.dim != h.dim:
        raise ValueError(f"order has {order.dim} weights but dividend has {h.dim} variables")


def divide(h: Polynomial, gens: Sequence[Polynomial], order: WeightedOrder, trace: bool = True) -> DivisionResult:
    """Divide ``h`` by ``gens``; see the module docstring for the selection rule."""
    gens = list(gens)
    _check_gens(h, gens, order, Polynomial)
    keys = [order.key(leading_term(f, order)[1]) for f in gens]
    perm = _sorted_indices(keys)
    quos, rem, steps = divide_terms(
        h._terms, [gens[i]._terms for i in perm], order.weights, order.precedence, 0, trace
    )
    quotients = [None] * len(gens)
    for pos, i in enumerate(perm):
        quotients[i] = Polynomial._wrap(h.dim, quos[pos])
    tr = tuple(
        TraceStep(kind, c, m, perm[pos] if pos >= 0 else None) for kind, m, c, pos in steps
    )
    return DivisionResult(tuple(quotients), Polynomial._wrap(h.dim, rem), tr)


def divide_vector(
    h: VectorPolynomial, gens: Sequence[VectorPolynomial], order: WeightedOrder, trace: bool = True
) -> DivisionResult:
    """Division in ``C[z] (x) C^r`` with term-over-position leading terms."""
    gens = list(gens)
    _check_gens(h, gens, order, VectorPolynomial)
    for i, f in enumerate(gens):
        if f.rank != h.rank:
            raise ValueError(f"generator {i} has rank {f.rank}, dividend has {h.rank}")
    flat = [f.flat_terms() for f in gens]
    keys = [max(order_key(k, order.weights, order.precedence, 1) for k in ft) for ft in flat]
    perm = _sorted_indices(keys)
    quos, rem, steps = divide_terms(
        h.flat_terms(), [flat[i] for i in perm], order.weights, order.precedence, 1, trace
    )
    quotients = [None] * len(gens)
    for pos, i in enumerate(perm):
        quotients[i] = Polynomial._wrap(h.dim, quos[pos])
    tr = tuple(
        TraceStep(kind, c, tuple(m[1:]), perm[pos] if pos >= 0 else None, m[0])
        for kind, m, c, pos in steps
    )
    return DivisionResult(tuple(quotients), VectorPolynomial.from_flat_terms(h.rank, h.dim, rem), tr)


class DivisionRatio(NamedTuple):
    ratio_sq: Fraction  # sum ||a_i f_i||^2 / ||h||^2
    remainder_adjusted: Fraction  # sum ||a_i f_i||^2 / (||h||^2 + ||r||^2)
    products_sq: Fraction = Fraction(0)
    h_sq: Fraction = Fraction(0)
    remainder_sq: Fraction = Fraction(0)


def stability_ratio(h, gens: Sequence, order: WeightedOrder, sp: SpaceParams) -> DivisionRatio:
    """Run the division and measure it in the ``sp`` norm, exactly."""
    if h.is_zero():
        raise ValueError("h must be nonzero")
    if isinstance(h, VectorPolynomial):
        res = divide_vector(h, gens, order, trace=False)
    else:
        res = divide(h, gens, order, trace=False)
    return ratio_from_result(h, gens, res, sp)


def ratio_from_result(h, gens: Sequence, res: DivisionResult, sp: SpaceParams) -> DivisionRatio:
    prods = sum((norm_sq(p, sp) for p in res.products(gens)), Fraction(0))
    hs = norm_sq(h, sp)
    rs = norm_sq(res.remainder, sp)
    return DivisionRatio(prods / hs, prods / (hs + rs), prods, hs, rs)


@dataclass(frozen=True)
class StepConstant:
    index: int
    m: int
    value: Fraction


def step_constant(f: Polynomial, order: WeightedOrder, index: int = 0) -> StepConstant:
    """``(2m)! / |lc(f)|^2 * sum_j |a_j|^2`` for quasi-homogeneous ``f`` in two variables.

    Bounds ``||(LT(p)/LT(f)) f||^2 <= C ||p||^2`` for every step that divides
    by ``f`` on inputs of weighted degree well above ``m = deg_n(f)``.
    """
    if f.dim != 2:
        raise ValueError("the step constant is defined for two variables only")
    if f.is_zero() or not is_quasi_homogeneous(f, order):
        raise ValueError("f must be a nonzero quasi-homogeneous polynomial")
    m = weighted_degree(f, order)
    lc, _ = leading_term(f, order)
    total = sum((c.abs2() for _, c in f.items()), Fraction(0))
    return StepConstant(index, m, factorial(2 * m) * total / lc.abs2())


def linear_constant(k: int, ratio_sq_bound) -> float:
    """Bound on ``A`` in ``sum ||g_i f_i|| <= A ||h||`` from the squared bound.

    By Cauchy-Schwarz ``sum ||g_i f_i|| <= sqrt(k * sum ||g_i f_i||^2)``.
    """
    return math.sqrt(k * float(ratio_sq_bound))
