import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polycert.fields import QQ, FieldSpec
from polycert.exactla import (FieldMatrix, check_witness, intersect_with_degree, nullspace, pack_gf2, rank, rref,
                              solve_linear, space_contains, space_from, unpack_gf2)
from polycert.polys import Polynomial, monomial_id

F2, F7 = FieldSpec.prime(2), FieldSpec.prime(7)


def matrices(K, max_rows=6, max_cols=7):
    entry = st.integers(-3, 3).map(Fraction) if K.kind == "rational" else st.integers(0, K.order - 1)
    return st.integers(1, max_rows).flatmap(lambda r: st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(entry, min_size=c, max_size=c), min_size=r, max_size=r))).map(
        lambda rows: FieldMatrix.from_raw(K, rows))


@pytest.mark.parametrize("K", [F2, F7, QQ], ids=str)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_rref_idempotent_and_rank_nullity(K, data):
    M = data.draw(matrices(K))
    R, r, piv = rref(M)
    R2, r2, piv2 = rref(R)
    assert R2 == R and r2 == r and piv2 == piv
    ns = nullspace(M)
    assert r + len(ns) == M.ncols
    for x in ns:
        assert all(v == 0 for v in M.apply(x))


def test_packed_matches_generic():
    rng = random.Random(11)
    for _ in range(200):
        rows, cols = rng.randint(1, 64), rng.randint(1, 192)
        data = [[rng.random() < 0.3 for _ in range(cols)] for _ in range(rows)]
        M = FieldMatrix.from_raw(F2, [[int(v) for v in row] for row in data])
        a = rref(M, kernel="packed")
        b = rref(M, kernel="generic")
        assert a[0] == b[0] and a[1] == b[1] and a[2] == b[2]


def test_pack_roundtrip():
    rows = [[1, 0, 1] + [0] * 70 + [1], [0] * 74]
    assert unpack_gf2(pack_gf2(rows, 74), 74) == rows


def test_bareiss_matches_generic():
    rng = random.Random(5)
    for _ in range(50):
        rows = [[Fraction(rng.randint(-4, 4)) for _ in range(5)] for _ in range(4)]
        M = FieldMatrix.from_raw(QQ, rows)
        assert rref(M, kernel="bareiss")[0] == rref(M, kernel="generic")[0]


@pytest.mark.parametrize("K", [F7, QQ], ids=str)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_solve_or_witness(K, data):
    M = data.draw(matrices(K))
    b = [K.from_int(v) for v in data.draw(st.lists(st.integers(-3, 3), min_size=M.nrows, max_size=M.nrows))]
    sol = solve_linear(M, b)
    if sol.feasible:
        assert M.apply(sol.x) == b
    else:
        assert check_witness(M, b, sol.witness)


def polys(K, n, deg):
    mono = st.tuples(*[st.integers(0, deg) for _ in range(n)]).filter(lambda m: sum(m) <= deg)
    coeff = st.integers(1, 4) if K.kind == "rational" else st.integers(1, K.order - 1).map(K.elem)
    return st.dictionaries(mono, coeff, min_size=1, max_size=4).map(lambda t: Polynomial(K, n, t))


@pytest.mark.parametrize("K", [F2, F7, QQ], ids=str)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_space_contains_reconstructs(K, data):
    gens = data.draw(st.lists(polys(K, 2, 3), min_size=1, max_size=4))
    S = space_from(gens, degree=3)
    cs = data.draw(st.lists(st.integers(0, 3), min_size=len(gens), max_size=len(gens)))
    f = Polynomial.zero(K, 2)
    for c, g in zip(cs, gens):
        f = f + g.scale(K.from_int(c))
    ok, coeffs = space_contains(S, f)
    assert ok
    rebuilt = Polynomial.zero(K, 2)
    for c, b in zip(coeffs, S.basis):
        rebuilt = rebuilt + b.scale(c)
    assert rebuilt == f


@pytest.mark.parametrize("n,d", [(1, 3), (2, 2), (2, 3), (3, 2), (3, 3)])
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_graded_echelon(n, d, data):
    gens = data.draw(st.lists(polys(F7, n, d), min_size=1, max_size=5))
    S = space_from(gens, degree=d)
    for b in S.basis:
        for e in range(d + 1):
            assert (b.degree <= e) == (sum(b.leading_monomial()) <= e)
    for e in range(d + 1):
        low = intersect_with_degree(S, e)
        assert low.dim == S.dim_up_to(e)
        assert all(b.degree <= e for b in low.basis)
        assert all(monomial_id(m) >= 0 for m in low.leading_monomials)
