"""The compiled and pure-Python kernels must agree term for term."""

import pickle
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stabdiv import _kernels_py as pure
from stabdiv import kernels

compiled = pytest.importorskip("stabdiv._kernels")

BACKENDS = [pure, compiled]


def test_selected_backend():
    assert kernels.BACKEND in ("cython", "python")
    assert compiled.BACKEND == "cython" and pure.BACKEND == "python"


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.BACKEND)
def test_gaussian_rational_arithmetic(mod):
    G = mod.GaussianRational
    a, b = G(Fraction(1, 2), 3), G(-2, Fraction(1, 3))
    assert a + b == G(Fraction(-3, 2), Fraction(10, 3))
    assert a * b == G(Fraction(-1) - 1, Fraction(1, 6) - 6)
    assert (a / b) * b == a
    assert a - a == 0 and not (a - a)
    assert 1 - a == G(Fraction(1, 2), -3)
    assert 2 / G(0, 1) == G(0, -2)
    assert a.conjugate() == G(Fraction(1, 2), -3)
    assert a.abs2() == Fraction(37, 4)
    assert G(6, 0) == Fraction(6) and hash(G(6, 0)) == hash(Fraction(6))
    assert str(G(Fraction(3, 2))) == "3/2" and str(G(1, -2)) == "(1-2i)"
    with pytest.raises(ZeroDivisionError):
        a / G(0)
    assert pickle.loads(pickle.dumps(a)) == a


def test_cross_backend_coercion():
    a = pure.GaussianRational(1, 2)
    b = compiled.GaussianRational(3, -1)
    assert a + b == pure.GaussianRational(4, 1)
    assert b + a == compiled.GaussianRational(4, 1)


def _rand_terms(r, mod, d, n, prefix=0):
    out = {}
    for _ in range(n):
        key = tuple(r.randint(0, 4) for _ in range(d))
        if prefix:
            key = (r.randint(0, 1),) + key
        out[key] = mod.GaussianRational(r.randint(-4, 4) or 1, r.choice([0, 0, 1, -2]))
    return out


def _convert(terms, mod):
    return {k: mod.GaussianRational(v.re, v.im) for k, v in terms.items()}


@settings(max_examples=150)
@given(st.integers(0, 2**32), st.integers(0, 1))
def test_backends_agree(seed, prefix):
    r = random.Random(seed)
    d = r.randint(1, 3)
    w = tuple(r.randint(1, 3) for _ in range(d))
    prec = tuple(r.sample(range(d), d))
    h = _rand_terms(r, pure, d, r.randint(1, 8), prefix)
    gens = [_rand_terms(r, pure, d, r.randint(1, 4), prefix) for _ in range(r.randint(1, 3))]
    out_py = pure.divide_terms(h, gens, w, prec, prefix)
    out_cy = compiled.divide_terms(_convert(h, compiled), [_convert(g, compiled) for g in gens], w, prec, prefix)
    assert out_py[0] == out_cy[0]
    assert out_py[1] == out_cy[1]
    assert [(k, m, c, i) for k, m, c, i in out_py[2]] == [(k, m, c, i) for k, m, c, i in out_cy[2]]
    p, q = _rand_terms(r, pure, d, 5), _rand_terms(r, pure, d, 5)
    assert pure.mul_terms(p, q) == compiled.mul_terms(_convert(p, compiled), _convert(q, compiled))
    s = pure.GaussianRational(-1, 1)
    assert pure.add_terms(p, q, s) == compiled.add_terms(_convert(p, compiled), _convert(q, compiled), s)
    key = tuple(r.randint(0, 3) for _ in range(d + prefix))
    assert pure.order_key(key, w, prec, prefix) == compiled.order_key(key, w, prec, prefix)


def test_env_switch_selects_pure_backend(monkeypatch):
    import importlib

    monkeypatch.setenv("STABDIV_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("STABDIV_PURE_PYTHON")
        importlib.reload(kernels)
