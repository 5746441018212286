import itertools
import math
import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from stabdiv.groebner import (
    UnreachableDegreeError,
    beurling_form,
    buchberger,
    default_equalization_degree,
    equalize_degrees,
    ideal_gcd,
    is_member,
    normal_form,
    quasi_homogeneous_basis,
    s_polynomial,
    staircase,
    staircase_codimension,
)
from stabdiv.kernels import GaussianRational
from stabdiv.polyring import Polynomial, WeightedOrder, format_poly, leading_term, parse, quasi_components
from stabdiv.stability import slice_basis

from _helpers import random_poly, random_quasi_homogeneous

O11 = WeightedOrder((1, 1))
O21 = WeightedOrder((2, 1))
X, Y = sympy.symbols("x y")


def P(s):
    return parse(s)


def to_sympy(p: Polynomial):
    return sum(
        (sympy.Rational(c.num_re, c.den) + sympy.I * sympy.Rational(c.num_im, c.den)) * X ** a * Y ** b
        for (a, b), c in p.items()
    )


def from_sympy(expr) -> Polynomial:
    poly = sympy.Poly(sympy.expand(expr), X, Y)
    terms = {}
    for (a, b), c in poly.terms():
        terms[(a, b)] = GaussianRational(_frac(sympy.re(c)), _frac(sympy.im(c)))
    return Polynomial(2, terms)


def monic_from_sympy(expr) -> Polynomial:
    # sympy keeps Gaussian-integer content; normalise to leading coefficient 1
    p = from_sympy(expr)
    c, _ = leading_term(p, O11)
    return p.scale(1 / c)


def _frac(v):
    from fractions import Fraction

    v = sympy.Rational(v)
    return Fraction(int(v.p), int(v.q))


def test_s_polynomial_examples():
    assert s_polynomial(P("x^2"), P("x*y"), O11).is_zero()
    f = P("x^2-3*x*y+y^2")
    assert s_polynomial(f, f, O11).is_zero()
    assert s_polynomial(P("x^2+y^2"), P("x*y"), O11) == P("y^3")
    with pytest.raises(ValueError):
        s_polynomial(Polynomial.zero(2), P("x"), O11)


def test_buchberger_examples():
    gb = buchberger([P("x^2"), P("x*y")], O11)
    assert set(gb.generators) == {P("x^2"), P("x*y")}
    gb = buchberger([P("x^2+y^2"), P("x*y")], O11)
    assert set(gb.generators) == {P("x^2+y^2"), P("x*y"), P("y^3")}
    assert buchberger([P("3*x")], O11).generators == (P("x"),)
    with pytest.raises(ValueError):
        buchberger([], O11)


def test_membership_examples():
    gb = buchberger([P("x")], O11)
    assert is_member(P("x^3+x*y^2"), gb)
    assert not is_member(P("y"), gb)


def _s_pairs_reduce(gb):
    return all(normal_form(s_polynomial(f, g, gb.order), gb.generators, gb.order).is_zero()
               for f, g in itertools.combinations(gb.generators, 2))


def _random_ideal(r):
    return [random_poly(r, 2, r.randint(1, 6), 4, complex_coeffs=r.random() < 0.3) for _ in range(r.randint(1, 3))]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_reduced_basis_matches_sympy(seed):
    r = random.Random(seed)
    gens = _random_ideal(r)
    if any(not any(m[0] or m[1] for m in g.monomials()) and len(g) == 1 for g in gens):
        return
    gb = buchberger(gens, O11)
    ref = sympy.groebner([to_sympy(g) for g in gens], X, Y, order="grlex")
    assert set(gb.generators) == {monic_from_sympy(e) for e in ref.exprs}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_weighted_basis_properties(seed):
    r = random.Random(seed)
    o = WeightedOrder((r.randint(1, 3), r.randint(1, 3)))
    gens = _random_ideal(r)
    gb = buchberger(gens, o)
    assert _s_pairs_reduce(gb)
    assert all(is_member(g, gb) for g in gens)
    lms = gb.leading_monomials()
    for i, g in enumerate(gb.generators):
        assert g.coefficient(lms[i]) == 1
        for j, m in enumerate(lms):
            if i != j:
                assert not any(all(a <= b for a, b in zip(m, t)) for t in g.monomials())
    unreduced = buchberger(gens, o, reduce=False)
    assert _s_pairs_reduce(unreduced)
    assert all(is_member(g, unreduced) for g in gb.generators)


def test_quasi_homogeneous_examples():
    gb = quasi_homogeneous_basis([P("x^2"), P("x*y")], O11)
    assert all(len(quasi_components(g, O11)) == 1 for g in gb)
    gb = quasi_homogeneous_basis([P("x+y^2")], O21)
    assert gb.generators == (P("x+y^2"),)
    gb = quasi_homogeneous_basis([P("x^2+y^2"), P("x*y")], O11)
    assert set(gb.generators) == {P("x^2+y^2"), P("x*y"), P("y^3")}
    with pytest.raises(ValueError):
        quasi_homogeneous_basis([P("x+y^2")], O11)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_quasi_homogeneous_closure(seed):
    r = random.Random(seed)
    w = r.choice([(1, 1), (2, 1), (3, 2)])
    o = WeightedOrder(w)
    gens = [random_quasi_homogeneous(r, w, r.randint(2, 7)) for _ in range(r.randint(1, 3))]
    gb = quasi_homogeneous_basis(gens, o)
    assert all(len(quasi_components(g, o)) == 1 for g in gb)


def test_equalize_examples():
    assert set(equalize_degrees([P("x")], O11, 2)) == {P("x^2"), P("x*y")}
    gb = buchberger([P("x^2"), P("x*y")], O11)
    assert P("x^2") in equalize_degrees(gb, O11, 2)
    out = set(equalize_degrees([P("x"), P("y^2")], O21, 4))
    assert {P("x^2"), P("x*y^2"), P("y^4")} <= out
    assert all(format_poly(p) in {"x^2", "x*y^2", "y^4"} for p in out)


def test_equalize_errors():
    with pytest.raises(UnreachableDegreeError) as ei:
        equalize_degrees([P("x"), P("y")], WeightedOrder((2, 3)), 4)
    assert ei.value.index == 1
    with pytest.raises(UnreachableDegreeError):
        equalize_degrees([P("x^3")], O11, 2)


def test_default_equalization_degree():
    assert default_equalization_degree([P("x"), P("y^2")], O21) == 2
    m = default_equalization_degree([P("x^2"), P("y^3")], WeightedOrder((3, 2)))
    assert m == 8
    equalize_degrees([P("x^2"), P("y^3")], WeightedOrder((3, 2)), m)


@pytest.mark.parametrize("gens,w,m", [
    (["x^2+y^2", "x*y"], (1, 1), 4),
    (["x^2-x*y", "y^3"], (1, 1), 4),
    (["x+y^2"], (2, 1), 4),
    (["x", "y^2"], (2, 1), 2),
])
def test_equalized_slices_match_ideal(gens, w, m):
    # exact comparison of reduced echelon bases of the two slices
    o = WeightedOrder(w)
    gb = quasi_homogeneous_basis([P(g) for g in gens], o)
    eq = equalize_degrees(gb, o, m)
    for q in range(m, m + 11):
        assert slice_basis(eq, o, q) == slice_basis(list(gb.generators), o, q)


def test_equalized_slice_gap_in_weighted_case():
    # a slice reachable from m need not be filled by products of degree m:
    # for I = <y>, n = (2,1), m = 2 the slice q = 3 contains x*y but the
    # products {x, y^2} only reach x*y via x*y itself, which has degree 3
    o = O21
    eq = equalize_degrees([P("y")], o, 2)
    assert set(eq) == {P("y^2")}
    assert slice_basis(eq, o, 3) == [P("y^3")]
    assert set(slice_basis([P("y")], o, 3)) == {P("x*y"), P("y^3")}


def test_staircase_examples():
    assert staircase_codimension(buchberger([P("x"), P("y")], O11)) == 1
    assert staircase_codimension(buchberger([P("x")], O11)) == math.inf
    gb = buchberger([P("x^2"), P("x*y"), P("y^3")], O11)
    assert sorted(staircase(gb)) == sorted([(0, 0), (1, 0), (0, 1), (0, 2)])
    assert staircase_codimension(buchberger([P("1+x")], O11)) == math.inf
    assert staircase_codimension(buchberger([P("3")], O11)) == 0


def test_staircase_matches_vector_space_dimension(rng):
    # codimension equals dim C[x,y]/I, computed independently from sympy's basis
    for _ in range(10):
        a, b = rng.randint(1, 4), rng.randint(1, 4)
        gens = [P(f"x^{a}+y"), P(f"y^{b}")]
        gb = buchberger(gens, O11)
        ref = sympy.groebner([to_sympy(g) for g in gens], X, Y, order="grlex")
        lms = [sympy.Poly(e, X, Y).monoms(order="grlex")[0] for e in ref.exprs]
        box = [(i, j) for i in range(12) for j in range(12)
               if not any(i >= m[0] and j >= m[1] for m in lms)]
        assert staircase_codimension(gb) == len(box)


def test_gcd_and_beurling_examples():
    bf = beurling_form([P("x^2*y"), P("x*y^2")])
    assert bf.gcd_part == P("x*y")
    assert bf.cofactor_ideal == (P("x"), P("y")) and bf.codimension == 1
    bf = beurling_form([P("x")])
    assert bf.gcd_part == P("x") and bf.cofactor_ideal == (Polynomial.constant(2),)
    assert bf.codimension == 0
    bf = beurling_form([P("x^2+x*y"), P("x^2")])
    assert bf.gcd_part == P("x") and bf.codimension < math.inf
    assert bf.to_dict()["gcd"] == "x"
    with pytest.raises(ValueError):
        ideal_gcd([parse("z1*z2", 3)])


def test_gcd_against_sympy(rng):
    for _ in range(25):
        p = random_poly(rng, 2, 3, 3, complex_coeffs=False)
        a = p * random_poly(rng, 2, 3, 3, complex_coeffs=False)
        b = p * random_poly(rng, 2, 3, 3, complex_coeffs=False)
        if a.is_zero() or b.is_zero():
            continue
        g = ideal_gcd([a, b])
        ref = sympy.gcd(to_sympy(a), to_sympy(b))
        # equal up to a unit
        ratio = sympy.simplify(to_sympy(g) / ref)
        assert ratio.is_number and ratio != 0


def test_gcd_with_gaussian_unit():
    p = P("x+(2i)*y")
    g = ideal_gcd([p * P("x"), p * P("y^2+1")])
    assert g == p.scale(1)  # already monic in x
    assert ideal_gcd([P("(1+i)*x*y"), P("(3-i)*x^2")]) == P("x")
