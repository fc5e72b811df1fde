from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polycert.fields import QQ, FieldSpec
from polycert.polys import (Polynomial, embed_poly, evaluate, monomial_id, monomials_up_to, multiply_by_variable,
                            parse_poly, poly_arith)
from polycert.fields import extend_field

F5 = FieldSpec.prime(5)
GF4 = FieldSpec.gf(2, 2)
N = 3


def coeffs(K):
    if K.kind == "rational":
        return st.integers(-5, 5)
    return st.integers(0, K.order - 1).map(K.elem)


def polys(K, n=N, deg=3):
    mono = st.tuples(*[st.integers(0, deg) for _ in range(n)]).filter(lambda m: sum(m) <= deg)
    return st.dictionaries(mono, coeffs(K), max_size=5).map(lambda t: Polynomial(K, n, t))


def points(K, n=N):
    if K.kind == "rational":
        return st.lists(st.integers(-4, 4).map(QQ.elem), min_size=n, max_size=n)
    return st.lists(st.integers(0, K.order - 1).map(K.elem), min_size=n, max_size=n)


@pytest.mark.parametrize("K", [F5, GF4, QQ], ids=str)
@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_ring_axioms_and_degree(K, data):
    f, g, h = (data.draw(polys(K)) for _ in range(3))
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f and f + g == g + f
    assert (f - f).is_zero()
    if not f.is_zero() and not g.is_zero():
        assert (f * g).degree == f.degree + g.degree


@pytest.mark.parametrize("K", [F5, GF4, QQ], ids=str)
@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_evaluate_is_homomorphism(K, data):
    f, g = data.draw(polys(K)), data.draw(polys(K))
    v = data.draw(points(K))
    assert evaluate(f * g, v) == evaluate(f, v) * evaluate(g, v)
    assert evaluate(f + g, v) == evaluate(f, v) + evaluate(g, v)


@pytest.mark.parametrize("n", range(1, 7))
def test_monomial_counts(n):
    for d in range(7):
        ms = monomials_up_to(n, d)
        assert len(ms) == comb(n + d, d)
        assert [monomial_id(m) for m in ms] == list(range(len(ms)))


def test_grevlex_order():
    assert monomials_up_to(2, 1) == [(0, 0), (0, 1), (1, 0)]
    f = parse_poly("x*y + x^2 + y^2", QQ, ["x", "y"])
    assert f.leading_monomial() == (2, 0)


def test_parse_and_format_roundtrip():
    names = ["x1", "x2"]
    f = parse_poly("x1^2 - 1/3*x1*x2^2 + (x2 + 1)^2", QQ, names)
    assert parse_poly(f.format(names), QQ, names) == f
    assert Polynomial.from_json(QQ, 2, f.to_json()) == f
    with pytest.raises(ValueError):
        parse_poly("x1 + z", QQ, names)


def test_variable_shift_and_embedding():
    x = Polynomial.variable(F5, 2, 0)
    assert multiply_by_variable(x, 1) == parse_poly("x*y", F5, ["x", "y"])
    assert poly_arith(x, x, "mul") == x * x
    E, emb = extend_field(FieldSpec.prime(2), 2)
    f = parse_poly("x^2 + x + 1", FieldSpec.prime(2), ["x"])
    g = embed_poly(f, emb)
    assert g.spec == E and evaluate(g, [E.generator()]).raw == 0
