import math
from fractions import Fraction

import numpy as np
import pytest

from stabdiv.norms import SpaceParams, monomial_norm_sq
from stabdiv.operators import (
    AngleDegenerateError,
    NumericalDiagnosticError,
    adjoint_mult_op,
    angle_bound_check,
    cross_commutator,
    essential_normality_scan,
    fang_xia_probe,
    fang_xia_ratio,
    ideal_projection,
    mult_op,
    orthonormal_columns,
    random_angle_trial,
    schatten_norm,
    schatten_norm_eig,
    truncation_basis,
)
from stabdiv.polyring import Polynomial, parse

DA2 = SpaceParams(2, -2)
HARDY2 = SpaceParams(2, -1)
BERG2 = SpaceParams(2, 0)


def P(s):
    return parse(s)


# -- bases and shifts


def test_truncation_basis_layout():
    b = truncation_basis(DA2, 3)
    assert b.size == 10 and b.prefix(1) == 3 and b.prefix(3) == 10
    small = truncation_basis(DA2, 2)
    assert b.monomials[: small.size] == small.monomials
    with pytest.raises(ValueError):
        b.coords(P("x^4"))
    with pytest.raises(ValueError):
        truncation_basis(DA2, -1)


@pytest.mark.parametrize("sp", [DA2, HARDY2, BERG2, SpaceParams(3, Fraction(1, 2))])
def test_shift_weights_match_exact_norms(sp):
    # entry for z^a -> z^(a+e_i) is ||z^(a+e_i)|| / ||z^a||, from exact rationals
    D = 4
    for i in range(1, sp.d + 1):
        S = mult_op(i, sp, D)
        for k, a in enumerate(S.domain.monomials):
            b = list(a)
            b[i - 1] += 1
            r = S.codomain.index[tuple(b)]
            expect = math.sqrt(monomial_norm_sq(tuple(b), sp) / monomial_norm_sq(a, sp))
            assert S.matrix[r, k] == pytest.approx(expect, rel=1e-12)
            col = S.matrix[:, k].copy()
            col[r] = 0
            assert not col.any()


def test_shifts_commute():
    D = 5
    for sp in (DA2, BERG2):
        a = mult_op(1, sp, D + 1).matrix @ mult_op(2, sp, D).matrix
        b = mult_op(2, sp, D + 1).matrix @ mult_op(1, sp, D).matrix
        assert np.allclose(a, b, atol=1e-12)


def test_drury_arveson_row_contraction():
    # sum_i S_i S_i^* <= I on the section, with equality off the vacuum
    D = 6
    n = truncation_basis(DA2, D).size
    R = np.zeros((n, n), dtype=complex)
    for i in (1, 2):
        A = adjoint_mult_op(i, DA2, D).matrix
        R += A.conj().T @ A
    ev = np.linalg.eigvalsh(R)
    assert ev.max() <= 1 + 1e-10
    assert np.allclose(np.diag(R)[1:], 1) and abs(R[0, 0]) < 1e-14


def test_adjoint_is_exact_on_section():
    D = 4
    for sp in (DA2, BERG2):
        A = adjoint_mult_op(2, sp, D).matrix
        S = mult_op(2, sp, D - 1).matrix
        assert np.allclose(A[: S.shape[1], :], S.conj().T)
        assert not A[S.shape[1]:, :].any()
    with pytest.raises(ValueError):
        mult_op(3, DA2, 2)


# -- projections


def test_projection_laws():
    for gens in ([P("x")], [P("x^2"), P("x*y+y^2")], [P("x+y"), P("x-(2i)*y")]):
        Pm = ideal_projection(gens, HARDY2, 6).matrix
        assert np.allclose(Pm @ Pm, Pm, atol=1e-8)
        assert np.allclose(Pm, Pm.conj().T, atol=1e-8)


def test_projection_examples():
    assert np.allclose(ideal_projection([Polynomial.constant(2)], DA2, 4).matrix, np.eye(15))
    pr = ideal_projection([P("x")], DA2, 2)
    assert pr.info["rank"] == 3
    # the range is spanned by the monomials divisible by x
    diag = np.diag(pr.matrix).real
    expect = [1.0 if m[0] >= 1 else 0.0 for m in pr.domain.monomials]
    assert np.allclose(diag, expect)
    with pytest.raises(ValueError):
        ideal_projection([P("x^3")], DA2, 2)
    with pytest.raises(ValueError):
        ideal_projection([], DA2, 2)


def test_orthonormal_columns_rank_and_ambiguity():
    V = np.array([[1, 1, 2], [0, 1, 2], [0, 0, 0]], dtype=complex)
    Q, info = orthonormal_columns(V)
    assert info["rank"] == 2 and np.allclose(Q.conj().T @ Q, np.eye(2))
    W = np.array([[1, 1], [0, 1e-9]], dtype=complex)
    with pytest.raises(NumericalDiagnosticError) as ei:
        orthonormal_columns(W)
    assert ei.value.condition > 1e8
    Q, info = orthonormal_columns(np.zeros((3, 0)))
    assert info["rank"] == 0


# -- Schatten norms


def test_schatten_examples():
    A = np.diag([3.0, 4.0])
    assert schatten_norm(A, 2) == pytest.approx(5.0)
    assert schatten_norm(A, math.inf) == pytest.approx(4.0)
    assert schatten_norm(A, 1) == pytest.approx(7.0)
    assert schatten_norm(np.zeros((3, 3)), 4) == 0.0
    with pytest.raises(ValueError):
        schatten_norm(A, 0.5)


def test_schatten_two_routes_agree(rng):
    g = np.random.default_rng(rng.randint(0, 2**31))
    for _ in range(20):
        A = g.standard_normal((7, 5)) + 1j * g.standard_normal((7, 5))
        for p in (1, 2, 3.5, 6, math.inf):
            assert schatten_norm(A, p) == pytest.approx(schatten_norm_eig(A, p), rel=1e-8)
    # Hilbert-Schmidt is the Frobenius norm
    assert schatten_norm(A, 2) == pytest.approx(np.linalg.norm(A))


# -- commutators


def test_commutator_drury_arveson_single_variable():
    # [S1, S1*] is diagonal; interior singular values lie in [0, 1], 1 at the vacuum
    C = cross_commutator(1, 1, DA2, 5)
    M = C.matrix[np.ix_(~C.boundary, ~C.boundary)]
    assert np.allclose(M, np.diag(np.diag(M)))
    s = np.linalg.svd(M, compute_uv=False)
    assert s.max() == pytest.approx(1.0) and s.min() >= -1e-14
    assert C.matrix[0, 0].real == pytest.approx(-1.0)


def test_cross_commutator_matches_diagonal_formula():
    # on DA: [S_i, S_i^*] z^a = (a_i/|a| - (a_i+1)/(|a|+1)) z^a
    C = cross_commutator(2, 2, DA2, 4)
    for k, a in enumerate(C.domain.monomials):
        n = sum(a)
        first = a[1] / n if n else 0.0
        assert C.matrix[k, k].real == pytest.approx(first - (a[1] + 1) / (n + 1))


def test_commutator_mixed_indices():
    C = cross_commutator(1, 2, DA2, 4)
    assert np.allclose(C.matrix, cross_commutator(2, 1, DA2, 4).matrix.conj().T)


# -- scan


def test_scan_principal_ideal_of_x():
    rows = essential_normality_scan([P("x")], DA2, 3, [4, 6, 8, 10])
    j1 = [r.value for r in rows if r.j == 1]
    j2 = [r.value for r in rows if r.j == 2]
    inc = np.diff(j1)
    assert all(b < a for a, b in zip(inc, inc[1:]))
    # S_2^* maps <x> into itself, so the compression vanishes identically
    assert all(v == 0 for v in j2)
    assert rows[0].increment is None and rows[2].increment == pytest.approx(j1[1] - j1[0])


def test_scan_trivial_ideals():
    # the whole space: nothing is orthogonal to N
    rows = essential_normality_scan([Polynomial.constant(2)], DA2, 3, [2, 3])
    assert all(r.value == 0 for r in rows)


def test_scan_errors_and_warning():
    with pytest.raises(ValueError):
        essential_normality_scan([P("x")], DA2, 3, [6, 4])
    with pytest.raises(ValueError):
        essential_normality_scan([P("x^3")], DA2, 3, [3, 5])
    with pytest.warns(UserWarning):
        essential_normality_scan([P("x")], DA2, 1.5, [3])


def test_scan_row_dict():
    row = essential_normality_scan([P("x")], DA2, 3, [3])[0]
    assert set(row.to_dict()) == {"D", "j", "schatten", "increment", "boundary", "rank"}


# -- one-step estimate


def test_fang_xia_zero_and_single_ratio():
    assert fang_xia_ratio(P("x+y"), Polynomial.zero(2), BERG2, 6, 1) == (0.0, 0.0)
    lhs, rhs = fang_xia_ratio(P("x"), P("y"), BERG2, 4, 2)
    # S_2^*(x y) is a multiple of x, which lies in <x>
    assert lhs == pytest.approx(0.0, abs=1e-12) and rhs > 0
    with pytest.raises(ValueError):
        fang_xia_ratio(P("x"), P("y^5"), BERG2, 4, 1)


def test_fang_xia_probe_stable_in_truncation():
    k8 = fang_xia_probe(P("x+y"), BERG2, 8, samples=20)["max_ratio"]
    k12 = fang_xia_probe(P("x+y"), BERG2, 12, samples=20)["max_ratio"]
    assert abs(k12 - k8) <= 0.2 * k8
    a = fang_xia_probe(P("x^2-y"), BERG2, 7, samples=5, seed=4)
    b = fang_xia_probe(P("x^2-y"), BERG2, 7, samples=5, seed=4)
    assert a == b
    with pytest.raises(ValueError):
        fang_xia_probe(P("x"), BERG2, 3, vanishing_order=3)


# -- angle bound


def test_angle_orthogonal_complement():
    # N perpendicular to M: c = 0 and the bound factor is C sqrt(2)
    e = np.eye(4)
    rep = angle_bound_check(e[:, :2], e[:, 2], np.diag([1.0, 2.0, 3.0, 4.0]), samples=200)
    assert rep.c == pytest.approx(0.0) and rep.C == pytest.approx(3.0)
    assert rep.bound_factor == pytest.approx(3.0 * math.sqrt(2))
    assert rep.violations == 0 and rep.intermediate_violations == 0


def test_angle_zero_operator():
    e = np.eye(3)
    rep = angle_bound_check(e[:, :1], (e[:, 0] + e[:, 1]) / math.sqrt(2), np.zeros((3, 3)), samples=50)
    assert rep.violations == 0 and rep.bound_factor == 0


def test_angle_degenerate():
    e = np.eye(3)
    with pytest.raises(AngleDegenerateError):
        angle_bound_check(e[:, :2], e[:, 0] + 1e-12 * e[:, 2], np.eye(3))


def test_angle_multi_vector_absorption():
    g = np.random.default_rng(5)
    M = g.standard_normal((8, 3))
    N = g.standard_normal((8, 2))
    rep = angle_bound_check(M, N, g.standard_normal((8, 8)), samples=100)
    assert len(rep.steps) == 2 and rep.steps[1]["C"] >= rep.steps[0]["C"] - 1e-12
    assert rep.violations == 0


def test_random_angle_trials():
    g = np.random.default_rng(0)
    for _ in range(30):
        rep = random_angle_trial(g, int(g.integers(2, 12)), 1, samples=10)
        assert rep.violations == 0 and rep.intermediate_violations == 0
    rep = random_angle_trial(g, 6, 2, c=0.5)
    assert rep.c == pytest.approx(0.5)
    with pytest.raises(ValueError):
        random_angle_trial(g, 3, 3)
