import csv
import io
import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabdiv.division import divide, stability_ratio
from stabdiv.groebner import equalize_degrees, quasi_homogeneous_basis
from stabdiv.norms import SpaceParams, norm_sq, poly_norm_sq
from stabdiv.polyring import Polynomial, WeightedOrder, format_poly, parse
from stabdiv.stability import (
    certify,
    certify_vector,
    counterexample_generators,
    counterexample_h,
    minimal_representation_ratio,
    row_operator_gap,
    slice_basis,
    split_bounds,
    transfer_check,
    verdict,
)

from _helpers import random_poly, random_quasi_homogeneous

O11 = WeightedOrder((1, 1))
O21 = WeightedOrder((2, 1))
DA2 = SpaceParams(2, -2)


def P(s):
    return parse(s)


def brute_norm_sq(p, d, t):
    # straight from the weight alpha! Gamma(d+t+1) / Gamma(d+t+1+|alpha|),
    # written as a product so it stays exact for rational t
    t = Fraction(t)
    total = Fraction(0)
    for alpha, c in p.items():
        w = Fraction(1)
        for a in alpha:
            for k in range(1, a + 1):
                w *= k
        for k in range(sum(alpha)):
            w /= d + t + 1 + k
        total += c.abs2() * w
    return total


def brute_vector_norm_sq(v, d, t):
    return sum((brute_norm_sq(c, d, t) for c in v.components), Fraction(0))


# -- slices


def test_slice_basis_examples():
    assert slice_basis([P("x^2+y^2"), P("x*y")], O11, 3) == [P("x^3"), P("x^2*y"), P("x*y^2"), P("y^3")]
    assert slice_basis([P("x")], O11, 2) == [P("x^2"), P("x*y")]
    assert slice_basis([P("x^3")], O11, 2) == []
    # two equal-degree generators with the same span collapse to one row
    assert slice_basis([P("x+y"), P("2*x+2*y")], O11, 1) == [P("x+y")]
    assert slice_basis([P("x+y^2")], O21, 3) == [P("x*y+y^3")]
    with pytest.raises(ValueError):
        slice_basis([P("x+y^2")], O11, 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_slice_basis_dimension_matches_rank(seed):
    # dimension cross-checked against numpy rank of the raw coefficient matrix
    r = random.Random(seed)
    w = r.choice([(1, 1), (2, 1)])
    o = WeightedOrder(w)
    gens = [random_quasi_homogeneous(r, w, r.randint(2, 4), 3) for _ in range(r.randint(1, 3))]
    q = r.randint(4, 8)
    rows = slice_basis(gens, o, q)
    cols = []
    from stabdiv.groebner import _exponent_vectors
    from stabdiv.polyring import weighted_degree
    for f in gens:
        e = weighted_degree(f, o)
        if e <= q:
            cols.extend(f.shift(b) for b in _exponent_vectors(w, q - e))
    monos = sorted({m for c in cols for m in c.monomials()})
    if not cols:
        assert rows == []
        return
    M = np.array([[complex(float(c.coefficient(m).re), float(c.coefficient(m).im)) for m in monos] for c in cols])
    assert len(rows) == np.linalg.matrix_rank(M)


# -- certify


def test_certify_single_generator():
    rep = certify([P("x^2")], O11, DA2, 10, samples=5)
    assert rep.sup == 1 and rep.verdict == "bounded-plateau"
    assert [r.dim for r in rep.records] == list(range(1, 10))
    assert rep.linear_constant == pytest.approx(1.0)


def test_certify_principal_ideal_ratio_is_one():
    # one generator: the quotient is forced, so the ratio is exactly 1
    rep = certify([P("x^2-3*x*y+(2+i)*y^2")], O11, SpaceParams(2, 0), 9, samples=6)
    assert all(r.max_ratio_sq == 1 and r.max_remainder_sq == 0 for r in rep.records)


def test_certify_output_forms():
    rep = certify([P("x^2"), P("x*y"), P("y^2")], O11, DA2, 8, samples=4, seed=3)
    d = rep.to_dict()
    assert d["params"]["q_min"] == 2 and d["params"]["samples"] == 4 and d["seed"] == 3
    assert d["verdict"] == rep.verdict and d["sup"] == str(rep.sup)
    assert json.loads(json.dumps(d)) == d
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0][0] == "degree" and len(rows) == 1 + len(rep.records)
    assert rep.record(5).degree == 5 and rep.record(99) is None
    assert rep.max_over(2, 8) == rep.sup


def test_certify_is_seeded():
    gens = [P("x^2+x*y"), P("y^2")]
    a = certify(gens, O11, DA2, 7, samples=8, seed=11)
    b = certify(gens, O11, DA2, 7, samples=8, seed=11)
    assert a.to_dict() == b.to_dict()


def test_certify_errors():
    with pytest.raises(ValueError, match="unequal"):
        certify([P("x"), P("y^2")], O11, DA2, 5)
    with pytest.raises(ValueError, match="below"):
        certify([P("x^2")], O11, DA2, 1)
    with pytest.raises(ValueError):
        certify([P("x+y^2")], O11, DA2, 5)
    with pytest.raises(ValueError):
        certify([], O11, DA2, 5)


def test_remainder_vanishes_on_groebner_slices():
    gb = quasi_homogeneous_basis([P("x^2+y^2"), P("x*y")], O11)
    eq = slice_basis(equalize_degrees(gb, O11, 3), O11, 3)
    rep = certify(eq, O11, DA2, 9, samples=6)
    assert all(r.max_remainder_sq == 0 for r in rep.records)
    # a non-basis set of the same ideal leaves remainders
    rep2 = certify([P("x^2+y^2"), P("x*y")], O11, DA2, 6, samples=6)
    assert any(r.max_remainder_sq > 0 for r in rep2.records)


def test_weighted_equalized_certificate():
    eq = slice_basis(equalize_degrees([P("x"), P("y^2")], O21, 4), O21, 4)
    rep = certify(eq, O21, DA2, 12, samples=5)
    assert rep.records[0].degree == 4 and len(eq) == 3
    assert all(r.max_remainder_sq == 0 for r in rep.records)


# -- verdict rule


@pytest.mark.parametrize("series,expected", [
    ([1, 1, 1, 1, 1, 1], "bounded-plateau"),
    ([1, 2, 3, 3, 3.1, 3.1], "bounded-plateau"),
    ([1, 1, 2, 3, 4, 5], "growing"),
    ([1, 1, 1.5, 1.5, 1.7, 1.7], "inconclusive"),
    ([1, 2], "inconclusive"),
    ([], "inconclusive"),
])
def test_verdict_rule(series, expected):
    assert verdict([Fraction(x) for x in series]) == expected


# -- vector example


def test_counterexample_generators():
    f1, f2 = counterexample_generators()
    assert format_poly(f1) == "(x,0,y)" and format_poly(f2) == "(0,x,y)"
    g1, g2 = counterexample_generators("fixed")
    assert g1 == f1 - f2 and g2 == f2
    with pytest.raises(ValueError):
        counterexample_generators("other")
    assert counterexample_h(2) == P("(x*y^2,-x*y^2,0)")


def test_certify_vector_against_brute_force():
    rows = certify_vector(counterexample_generators(), O11, DA2, 12)
    f1, f2 = counterexample_generators()
    for row in rows:
        n = row["n"]
        h = counterexample_h(n)
        a1, a2 = Polynomial.monomial((0, n)), -Polynomial.monomial((0, n))
        prod = brute_vector_norm_sq(a1 * f1, 2, -2) + brute_vector_norm_sq(a2 * f2, 2, -2)
        assert row["h_sq"] == brute_vector_norm_sq(h, 2, -2) == Fraction(2, n + 1)
        assert row["products_sq"] == prod
        assert row["ratio_sq"] == n + 2
    fixed = certify_vector(counterexample_generators("fixed"), O11, DA2, 12)
    assert all(r["ratio_sq"] == 1 and r["remainder_sq"] == 0 for r in fixed)


def test_split_bounds_random(rng):
    for _ in range(60):
        p = random_poly(rng, 2, 4, 4)
        q = random_poly(rng, 2, 4, 4)
        f1, f2 = counterexample_generators()
        if norm_sq(p * f1 + q * f2, DA2) == 0:
            continue
        b1, b2 = split_bounds(p, q, DA2)
        assert b1 <= 2 and b2 <= 3
        h = p * f1 + q * f2
        hs = brute_vector_norm_sq(h, 2, -2)
        assert b1 == brute_vector_norm_sq(p * (f1 - f2), 2, -2) / hs


def test_split_bounds_zero():
    with pytest.raises(ValueError):
        split_bounds(Polynomial.zero(2), Polynomial.zero(2), DA2)


# -- transfer between spaces


@pytest.mark.parametrize("t", [-2, 0, Fraction(1, 2)])
def test_transfer_chain(t):
    rows = transfer_check([P("x^2"), P("x*y"), P("y^2")], O11, t, 14)
    assert rows and all(r["chain_ok"] and r["ratio_ok"] for r in rows)


def test_transfer_weighted():
    eq = equalize_degrees([P("x"), P("y^2")], O21, 2)
    rows = transfer_check(eq, O21, 0, 10)
    assert all(r["chain_ok"] for r in rows)
    # degree 2 with largest weight 2: the upper constant is c_1 = 1/(d+t+1)
    assert rows[0]["upper"] == Fraction(1, 3) and rows[0]["lower"] == Fraction(1, 6)


# -- row operator


def test_row_operator_orthogonal_blocks():
    # disjoint monomial supports: the blocks are mutually orthogonal, sigma = 1
    for D in (4, 6, 8):
        g = row_operator_gap([P("x^2"), P("x*y"), P("y^2")], DA2, D)
        assert g.sigma_min == pytest.approx(1.0, abs=1e-10)
        assert g.codomain_dim == (D + 1) * (D + 2) // 2


def test_row_operator_repeated_generator_kernel():
    g = row_operator_gap([P("x"), P("x")], DA2, 4)
    assert g.kernel_dim == g.domain_dims[0]
    assert g.sigma_min == pytest.approx(np.sqrt(2))


def test_row_operator_overlap_shrinks_gap():
    a = row_operator_gap([P("x"), P("y")], DA2, 5).sigma_min
    b = row_operator_gap([P("x"), P("x+1/10*y")], DA2, 5).sigma_min
    assert a > b > 0


def test_row_operator_errors():
    with pytest.raises(ValueError):
        row_operator_gap([], DA2, 3)
    with pytest.raises(ValueError):
        row_operator_gap([P("x^4")], DA2, 3)


# -- minimal representations


def test_minimal_representation_examples():
    assert minimal_representation_ratio(P("x^2*y"), [P("x^2"), P("x*y")], O11, DA2) == Fraction(1, 2)
    assert minimal_representation_ratio(P("x*y"), [P("x")], O11, DA2) == 1
    with pytest.raises(ValueError):
        minimal_representation_ratio(P("y^2"), [P("x")], O11, DA2)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32))
def test_minimal_representation_below_division(seed):
    r = random.Random(seed)
    gens = [P("x^2"), P("x*y"), P("y^2")] if r.random() < 0.5 else [P("x^2+y^2"), P("x*y"), P("y^3")]
    gb = quasi_homogeneous_basis(gens, O11)
    eq = slice_basis(equalize_degrees(gb, O11, 3), O11, 3)
    q = r.randint(3, 5)
    basis = slice_basis(eq, O11, q)
    h = Polynomial.zero(2)
    while h.is_zero():
        for b in basis:
            h = h + b.scale(r.randint(-3, 3))
    rep = stability_ratio(h, eq, O11, DA2)
    assert minimal_representation_ratio(h, eq, O11, DA2) <= rep.ratio_sq
