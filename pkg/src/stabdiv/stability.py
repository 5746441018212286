"""Degree-slice certification of stable division.

For a set of quasi-homogeneous generators of one weighted degree ``m`` the
certifier walks the slices ``I_q`` (``m <= q <= q_max``), divides a basis
of each slice plus seeded random elements, and records the squared ratio
``sum ||a_i f_i||^2 / ||h||^2`` exactly.  A finite sweep shows a trend and
nothing more; the verdict is policy, see :func:`verdict`.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .division import divide, divide_vector, linear_constant, ratio_from_result
from .groebner import _exponent_vectors, normal_form
from .kernels import GaussianRational
from .norms import SpaceParams, c_ratio, norm_sq, poly_norm_sq
from .operators import (
    AMBIGUITY_BAND,
    RANK_RTOL,
    NumericalDiagnosticError,
    generator_span,
    orthonormal_columns,
)
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
    "SliceRecord",
    "StabilityReport",
    "RowOperatorGap",
    "slice_basis",
    "certify",
    "verdict",
    "counterexample_generators",
    "counterexample_h",
    "certify_vector",
    "split_bounds",
    "row_operator_gap",
    "transfer_check",
    "minimal_representation_ratio",
]

PLATEAU_FACTOR = Fraction(105, 100)
GROWTH_FACTOR = 2
COEFF_BOX = 9


def _frac_text(x: Fraction) -> str:
    return str(Fraction(x))


def slice_basis(gens: Sequence[Polynomial], order: WeightedOrder, q: int) -> list:
    """Echelon basis of ``span{z^a f_i : deg_n(z^a f_i) = q}``.

    Rows are monic, fully reduced against each other and sorted by
    decreasing leading monomial.
    """
    rows: list = []
    for i, f in enumerate(gens):
        if f.is_zero() or not is_quasi_homogeneous(f, order):
            raise ValueError(f"generator {i} is not quasi-homogeneous")
        e = weighted_degree(f, order)
        if e > q:
            continue
        for beta in _exponent_vectors(order.weights, q - e):
            r = normal_form(f.shift(beta), rows, order)
            if r.is_zero():
                continue
            c, _ = leading_term(r, order)
            rows.append(r.scale(1 / c))
    # inside one degree, divisibility of monomials is equality, so one
    # pass of reduction against the other rows is a full back-substitution
    out = []
    for k, r in enumerate(rows):
        c, m = leading_term(r, order)
        lead = Polynomial._wrap(r.dim, {m: c})
        others = rows[:k] + rows[k + 1:]
        out.append(lead + normal_form(r - lead, others, order))
    out.sort(key=lambda g: order.key(leading_term(g, order)[1]), reverse=True)
    return out


@dataclass(frozen=True)
class SliceRecord:
    degree: int
    dim: int
    evaluated: int
    max_ratio_sq: Fraction
    mean_ratio_sq: Fraction
    max_remainder_sq: Fraction

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "dim": self.dim,
            "evaluated": self.evaluated,
            "max_ratio_sq": _frac_text(self.max_ratio_sq),
            "mean_ratio_sq": _frac_text(self.mean_ratio_sq),
            "max_remainder_sq": _frac_text(self.max_remainder_sq),
        }


@dataclass(frozen=True)
class StabilityReport:
    generators: tuple
    order: WeightedOrder
    sp: SpaceParams
    q_min: int
    q_max: int
    samples: int
    seed: int
    records: tuple
    sup: Fraction
    linear_constant: float
    verdict: str

    def record(self, q: int) -> SliceRecord | None:
        for r in self.records:
            if r.degree == q:
                return r
        return None

    def max_over(self, lo: int, hi: int) -> Fraction:
        vals = [r.max_ratio_sq for r in self.records if lo <= r.degree <= hi]
        if not vals:
            raise ValueError(f"no nonempty slice in [{lo}, {hi}]")
        return max(vals)

    def to_dict(self) -> dict:
        return {
            "params": {
                "generators": [format_poly(g, self.order) for g in self.generators],
                "weights": list(self.order.weights),
                "d": self.sp.d,
                "t": _frac_text(self.sp.t),
                "q_min": self.q_min,
                "q_max": self.q_max,
                "samples": self.samples,
                "coefficient_box": [-COEFF_BOX, COEFF_BOX],
                "verdict_rule": {
                    "plateau_factor": _frac_text(PLATEAU_FACTOR),
                    "growth_factor": GROWTH_FACTOR,
                    "partition": "thirds of the nonempty slices",
                },
            },
            "records": [r.to_dict() for r in self.records],
            "sup": _frac_text(self.sup),
            "linear_constant": self.linear_constant,
            "verdict": self.verdict,
            "seed": self.seed,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "dim", "max_ratio_sq", "mean_ratio_sq", "max_remainder_sq", "max_ratio_sq_float"])
        for r in self.records:
            w.writerow([r.degree, r.dim, _frac_text(r.max_ratio_sq), _frac_text(r.mean_ratio_sq),
                        _frac_text(r.max_remainder_sq), float(r.max_ratio_sq)])
        return buf.getvalue()


def verdict(maxima: Sequence) -> str:
    """Classify a per-degree series of maxima (ascending degree).

    ``bounded-plateau`` if the top third peaks at most 5% above the middle
    third; ``growing`` if the top third is at least twice the bottom third;
    otherwise ``inconclusive``.  Fewer than three points are inconclusive.
    """
    n = len(maxima)
    if n < 3:
        return "inconclusive"
    a, b = n // 3, (2 * n) // 3
    bottom, middle, top = max(maxima[:a]), max(maxima[a:b]), max(maxima[b:])
    if top <= PLATEAU_FACTOR * middle:
        return "bounded-plateau"
    if top >= GROWTH_FACTOR * bottom:
        return "growing"
    return "inconclusive"


def _slice_rng(seed: int, q: int) -> random.Random:
    return random.Random(seed * 1000003 + q)


def _random_element(basis: list, rng: random.Random) -> Polynomial:
    while True:
        coeffs = [rng.randint(-COEFF_BOX, COEFF_BOX) for _ in basis]
        if any(coeffs):
            break
    h = Polynomial.zero(basis[0].dim)
    for c, b in zip(coeffs, basis):
        if c:
            h = h + b.scale(c)
    return h


def certify(
    gens: Sequence[Polynomial],
    order: WeightedOrder,
    sp: SpaceParams,
    q_max: int,
    samples: int = 50,
    seed: int = 0,
) -> StabilityReport:
    """Sweep ``q = m..q_max`` and report exact division ratios per slice."""
    gens = list(gens)
    if not gens:
        raise ValueError("empty generator list")
    for i, f in enumerate(gens):
        if f.is_zero() or not is_quasi_homogeneous(f, order):
            raise ValueError(f"generator {i} is not {order.weights}-quasi-homogeneous")
    degs = {weighted_degree(f, order) for f in gens}
    if len(degs) != 1:
        raise ValueError(f"generators have unequal weighted degrees {sorted(degs)}; equalize first")
    m = degs.pop()
    if q_max < m:
        raise ValueError(f"q_max = {q_max} is below the generator degree {m}")
    records = []
    for q in range(m, q_max + 1):
        basis = slice_basis(gens, order, q)
        if not basis:
            continue
        rng = _slice_rng(seed, q)
        probes = basis + [_random_element(basis, rng) for _ in range(samples)]
        ratios, rems = [], []
        for h in probes:
            res = divide(h, gens, order, trace=False)
            r = ratio_from_result(h, gens, res, sp)
            ratios.append(r.ratio_sq)
            rems.append(r.remainder_sq)
        records.append(SliceRecord(q, len(basis), len(probes), max(ratios),
                                   sum(ratios, Fraction(0)) / len(ratios), max(rems)))
    sup = max((r.max_ratio_sq for r in records), default=Fraction(0))
    return StabilityReport(
        tuple(gens), order, sp, m, q_max, samples, seed, tuple(records), sup,
        linear_constant(len(gens), sup), verdict([r.max_ratio_sq for r in records]),
    )


# ---------------------------------------------------------------- vector case


def counterexample_generators(kind: str = "trap") -> list:
    """``f1 = (x, 0, y)``, ``f2 = (0, x, y)``; ``kind="fixed"`` gives ``{f1 - f2, f2}``."""
    x = Polynomial.variable(0, 2)
    y = Polynomial.variable(1, 2)
    z = Polynomial.zero(2)
    f1 = VectorPolynomial([x, z, y])
    f2 = VectorPolynomial([z, x, y])
    if kind == "trap":
        return [f1, f2]
    if kind == "fixed":
        return [f1 - f2, f2]
    raise ValueError(f"unknown generator set {kind!r}")


def counterexample_h(n: int) -> VectorPolynomial:
    """``h_n = (x y^n, -x y^n, 0)``."""
    p = Polynomial.monomial((1, n))
    return VectorPolynomial([p, -p, Polynomial.zero(2)])


def certify_vector(gens: Sequence[VectorPolynomial], order: WeightedOrder, sp: SpaceParams, n_max: int) -> list:
    """Rows ``{n, ratio_sq, h_sq, products_sq, remainder_sq}`` for ``h_n``, ``n = 1..n_max``."""
    if sp.d != 2 or order.dim != 2:
        raise ValueError("the vector example lives in two variables")
    rows = []
    for n in range(1, n_max + 1):
        h = counterexample_h(n)
        res = divide_vector(h, gens, order, trace=False)
        r = ratio_from_result(h, gens, res, sp)
        rows.append({"n": n, "ratio_sq": r.ratio_sq, "h_sq": r.h_sq,
                     "products_sq": r.products_sq, "remainder_sq": r.remainder_sq})
    return rows


def split_bounds(p: Polynomial, q: Polynomial, sp: SpaceParams) -> tuple:
    """For ``h = p f1 + q f2`` return ``||p(f1-f2)||^2/||h||^2`` and ``||(p+q) f2||^2/||h||^2``."""
    f1, f2 = counterexample_generators("trap")
    h = p * f1 + q * f2
    hs = norm_sq(h, sp)
    if hs == 0:
        raise ValueError("h vanishes")
    return norm_sq(p * (f1 - f2), sp) / hs, norm_sq((p + q) * f2, sp) / hs


# ------------------------------------------------------- cross-space checks


def transfer_check(gens: Sequence[Polynomial], order: WeightedOrder, t, q_max: int) -> list:
    """Compare ``H_d^(t)`` with Drury-Arveson on every slice basis element.

    Checks ``c_{q,t} ||h||_DA^2 <= ||h||_t^2 <= c_{floor(q/n),t} ||h||_DA^2``
    with ``n`` the largest weight, and the induced bound on division ratios.
    All comparisons are exact.
    """
    d = order.dim
    sp = SpaceParams(d, t)
    da = SpaceParams.drury_arveson(d)
    n = max(order.weights)
    m = min(weighted_degree(f, order) for f in gens)
    out = []
    for q in range(m, q_max + 1):
        basis = slice_basis(gens, order, q)
        if not basis:
            continue
        lo, hi = c_ratio(q, sp), c_ratio(q // n, sp)
        chain_ok = True
        ratio_ok = True
        for h in basis:
            h_da, h_t = poly_norm_sq(h, da), poly_norm_sq(h, sp)
            chain_ok &= lo * h_da <= h_t <= hi * h_da
            res = divide(h, gens, order, trace=False)
            r_t = ratio_from_result(h, gens, res, sp).ratio_sq
            r_da = ratio_from_result(h, gens, res, da).ratio_sq
            ratio_ok &= r_t <= r_da * hi / lo
        out.append({"degree": q, "lower": lo, "upper": hi, "chain_ok": bool(chain_ok),
                    "ratio_ok": bool(ratio_ok), "size": len(basis)})
    return out


@dataclass(frozen=True)
class RowOperatorGap:
    D: int
    sigma_min: float
    C: float
    domain_dims: tuple
    codomain_dim: int
    kernel_dim: int
    singular_values: np.ndarray = field(repr=False, compare=False, default=None)

    def to_dict(self) -> dict:
        return {"D": self.D, "sigma_min": self.sigma_min, "C": self.C,
                "domain_dims": list(self.domain_dims), "codomain_dim": self.codomain_dim,
                "kernel_dim": self.kernel_dim}


def row_operator_gap(gens: Sequence[Polynomial], sp: SpaceParams, D: int, rtol: float = RANK_RTOL) -> RowOperatorGap:
    """Least nonzero singular value of ``(m_1, ..., m_k) -> m_1 + ... + m_k``.

    Each summand ranges over ``span{z^a f_i : total degree <= D}`` with an
    orthonormal basis, so ``T = [Q_1 ... Q_k]``.
    """
    if not gens:
        raise ValueError("empty generator list")
    top = max(f.total_degree() for f in gens)
    if D < top:
        raise ValueError(f"truncation {D} is below the generator degree {top}")
    V, labels = generator_span(gens, sp, D)
    blocks = []
    for i in range(len(gens)):
        Q, _ = orthonormal_columns(V[:, labels == i], rtol)
        blocks.append(Q)
    T = np.hstack(blocks)
    s = np.linalg.svd(T, compute_uv=False)
    cut = rtol * s[0]
    if np.any((s > cut) & (s <= AMBIGUITY_BAND * cut)):
        raise NumericalDiagnosticError("row operator has no clear rank gap", float(s[0] / s[s > cut][-1]))
    nz = s[s > cut]
    sigma = float(nz[-1])
    return RowOperatorGap(D, sigma, 1.0 / sigma ** 2, tuple(b.shape[1] for b in blocks),
                          V.shape[0], T.shape[1] - len(nz), s)


# ------------------------------------------------ minimal-norm representation


def _rref(rows: list, ncols: int):
    """Reduced row echelon form over Gaussian rationals; returns (rows, pivots)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def _solve(A: list, b: list, ncols: int):
    """One solution of ``A x = b`` and a null-space basis; ``None`` if inconsistent."""
    zero = GaussianRational(0)
    aug, piv = _rref([row + [bi] for row, bi in zip(A, b)], ncols + 1)
    if piv and piv[-1] == ncols:
        return None
    x = [zero] * ncols
    for row, c in zip(aug, piv):
        x[c] = row[ncols]
    free = [c for c in range(ncols) if c not in piv]
    null = []
    for fcol in free:
        v = [zero] * ncols
        v[fcol] = GaussianRational(1)
        for row, c in zip(aug, piv):
            v[c] = -row[fcol]
        null.append(v)
    return x, null


def minimal_representation_ratio(h: Polynomial, gens: Sequence[Polynomial], order: WeightedOrder, sp: SpaceParams) -> Fraction:
    """Exact ``min sum ||g_i f_i||^2 / ||h||^2`` over ``h = sum g_i f_i`` in one slice.

    Lower-bounds the constant any representation can reach.  Dense exact
    linear algebra: only for small slices.
    """
    if h.is_zero() or not is_quasi_homogeneous(h, order):
        raise ValueError("h must be a nonzero quasi-homogeneous polynomial")
    q = weighted_degree(h, order)
    cols = []  # z^beta f_i as term maps
    for f in gens:
        e = weighted_degree(f, order)
        if e <= q:
            cols.extend(f.shift(beta) for beta in _exponent_vectors(order.weights, q - e))
    if not cols:
        raise ValueError("h is not in the ideal")
    monos = sorted({m for c in cols for m in c.monomials()} | set(h.monomials()))
    zero = GaussianRational(0)
    A = [[c.coefficient(m) for c in cols] for m in monos]
    sol = _solve(A, [h.coefficient(m) for m in monos], len(cols))
    if sol is None:
        raise ValueError("h is not in the ideal")
    x0, null = sol
    w = {m: GaussianRational(poly_norm_sq(Polynomial.monomial(m), sp)) for m in monos}
    # cost x^* G x with G_{ab} = <col_b, col_a> when both columns share a generator
    owner = []
    for i, f in enumerate(gens):
        e = weighted_degree(f, order)
        if e <= q:
            owner.extend([i] * len(_exponent_vectors(order.weights, q - e)))
    n = len(cols)
    G = [[zero] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            if owner[a] != owner[b]:
                continue
            s = zero
            for m, c in cols[b].items():
                ca = cols[a].coefficient(m)
                if ca:
                    s = s + c * ca.conjugate() * w[m]
            G[a][b] = s

    def matvec(M, v):
        out = []
        for row in M:
            s = zero
            for x, y in zip(row, v):
                if x and y:
                    s = s + x * y
            out.append(s)
        return out

    def dot(u, v):  # u^* v
        s = zero
        for x, y in zip(u, v):
            if x and y:
                s = s + x.conjugate() * y
        return s

    x = x0
    if null:
        Gx0 = matvec(G, x0)
        GN = [matvec(G, v) for v in null]
        lhs = [[dot(u, gv) for gv in GN] for u in null]
        rhs = [-dot(u, Gx0) for u in null]
        res = _solve(lhs, rhs, len(null))
        if res is None:
            raise ArithmeticError("normal equations are inconsistent")
        y = res[0]
        x = [xi + sum((yj * v[k] for yj, v in zip(y, null)), zero) for k, xi in enumerate(x0)]
    cost = dot(x, matvec(G, x))
    return cost.re / poly_norm_sq(h, sp)
