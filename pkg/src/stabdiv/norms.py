"""Exact norms on the weighted spaces ``H_d^(t)``.

Monomials are orthogonal with ``||z^a||_t^2 = a! / prod_{i=1}^{|a|} (d+t+i)``.
Only the finite-product form is used, so every squared norm of a
Gaussian-rational polynomial is an exact :class:`~fractions.Fraction`.
``t = -d`` is the Drury-Arveson space, ``t = -1`` Hardy, ``t = 0`` Bergman.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod

from .kernels import GaussianRational
from .polyring import Polynomial, VectorPolynomial, quasi_components, WeightedOrder

__all__ = [
    "SpaceParams",
    "monomial_norm_sq",
    "poly_norm_sq",
    "vector_poly_norm_sq",
    "norm_sq",
    "inner_product",
    "c_ratio",
    "c_ratio_limit_probe",
    "equivalence_bounds_check",
]


@dataclass(frozen=True)
class SpaceParams:
    """The pair ``(d, t)`` selecting ``H_d^(t)``; requires ``t >= -d``."""

    d: int
    t: Fraction

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        t = Fraction(self.t)
        if t < -self.d:
            raise ValueError(f"t = {t} is below -d = {-self.d}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "t", t)

    @classmethod
    def drury_arveson(cls, d: int) -> "SpaceParams":
        return cls(d, Fraction(-d))

    def shifted(self, dt=1) -> "SpaceParams":
        return SpaceParams(self.d, self.t + dt)

    def __str__(self):
        return f"H_{self.d}^({self.t})"


@lru_cache(maxsize=64)
def _rising_table(d: int, t: Fraction) -> list:
    # table[n] = prod_{i=1}^n (d + t + i); extended on demand
    return [Fraction(1)]


def _rising(sp: SpaceParams, n: int) -> Fraction:
    table = _rising_table(sp.d, sp.t)
    base = sp.d + sp.t
    while len(table) <= n:
        table.append(table[-1] * (base + len(table)))
    return table[n]


def monomial_norm_sq(alpha, sp: SpaceParams) -> Fraction:
    alpha = tuple(alpha)
    if len(alpha) != sp.d:
        raise ValueError(f"monomial {alpha} does not have length {sp.d}")
    return prod((factorial(a) for a in alpha), start=Fraction(1)) / _rising(sp, sum(alpha))


def poly_norm_sq(p: Polynomial, sp: SpaceParams) -> Fraction:
    if p.dim != sp.d:
        raise ValueError(f"polynomial has {p.dim} variables, space has d = {sp.d}")
    return sum((c.abs2() * monomial_norm_sq(m, sp) for m, c in p.items()), Fraction(0))


def vector_poly_norm_sq(v: VectorPolynomial, sp: SpaceParams) -> Fraction:
    return sum((poly_norm_sq(c, sp) for c in v.components), Fraction(0))


def norm_sq(p, sp: SpaceParams) -> Fraction:
    """Squared norm of a scalar or vector polynomial."""
    if isinstance(p, VectorPolynomial):
        return vector_poly_norm_sq(p, sp)
    return poly_norm_sq(p, sp)


def inner_product(p: Polynomial, q: Polynomial, sp: SpaceParams) -> GaussianRational:
    """``<p, q>_t``, linear in ``p`` and conjugate-linear in ``q``."""
    p._check(q)
    if p.dim != sp.d:
        raise ValueError(f"polynomial has {p.dim} variables, space has d = {sp.d}")
    total = GaussianRational(0)
    small = p if len(p) <= len(q) else q
    for m in small.monomials():
        cq = q.coefficient(m)
        cp = p.coefficient(m)
        if cp and cq:
            total = total + cp * cq.conjugate() * monomial_norm_sq(m, sp)
    return total


def c_ratio(n: int, sp: SpaceParams) -> Fraction:
    """``c_{n,t} = n! / prod_{i=1}^n (d+t+i)``: ratio of ``H^(t)`` to Drury-Arveson
    squared norms on homogeneous polynomials of degree ``n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return Fraction(factorial(n)) / _rising(sp, n)


def c_ratio_limit_probe(n_weight: int, sp: SpaceParams, m: int) -> Fraction:
    """Exact ``c_{floor(m/n_weight),t} / c_{m,t}``.

    For large ``m`` this behaves like ``n_weight ** (d+t)``.
    """
    if n_weight < 1 or m < 1:
        raise ValueError("n_weight and m must be positive")
    if m < n_weight:
        raise ValueError("m must be at least n_weight")
    return c_ratio(m // n_weight, sp) / c_ratio(m, sp)


def equivalence_bounds_check(f: Polynomial, sp: SpaceParams) -> tuple:
    """Check ``c_{m,t} ||f||_DA^2 <= ||f||_t^2 <= c_{k,t} ||f||_DA^2`` exactly.

    ``k`` and ``m`` are the smallest and largest total degrees present in
    ``f``.  Returns ``(lower_ok, upper_ok)``.
    """
    if f.is_zero():
        raise ValueError("the zero polynomial has no homogeneous parts")
    parts = quasi_components(f, WeightedOrder.graded(f.dim))
    k, m = min(parts), max(parts)
    da = poly_norm_sq(f, SpaceParams.drury_arveson(sp.d))
    nt = poly_norm_sq(f, sp)
    return c_ratio(m, sp) * da <= nt, nt <= c_ratio(k, sp) * da
