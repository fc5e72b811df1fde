import itertools
import random
from fractions import Fraction

import pytest

from polycert.exactla import FieldMatrix, check_witness, solve_linear
from polycert.fields import QQ, FieldSpec, enumerate_field, extend_field
from polycert.nulla import (BOUND_REACHED, INFEASIBLE, NullCertificate, PolySystem, combination, nulla_decide,
                            nulla_run, verify_null_cert)
from polycert.polys import Polynomial, embed_poly, evaluate, monomials_up_to


def random_system(K, n, rng, count=None, deg=2):
    gens = []
    for _ in range(count or rng.randint(1, 4)):
        terms = {}
        for _ in range(rng.randint(1, 3)):
            m = [0] * n
            for _ in range(rng.randint(0, deg)):
                m[rng.randrange(n)] += 1
            terms[tuple(m)] = rng.randint(1, K.order - 1) if K.is_finite else rng.randint(-3, 3)
        f = Polynomial(K, n, terms)
        if not f.is_zero():
            gens.append(f)
    if not gens:
        gens = [Polynomial.constant(K, n, 1)]
    return PolySystem(K, [f"x{i}" for i in range(n)], gens)


def has_root_over(sys, E, emb) -> bool:
    gens = [embed_poly(g, emb) for g in sys.generators]
    pts = enumerate_field(E)
    return any(all(evaluate(g, pt).raw == 0 for g in gens) for pt in itertools.product(pts, repeat=sys.n))


@pytest.mark.parametrize("p", [2, 3])
def test_soundness_against_enumeration(p):
    K = FieldSpec.prime(p)
    E, emb = extend_field(K, 2)
    rng = random.Random(p)
    infeasible = 0
    for _ in range(60):
        S = random_system(K, rng.randint(1, 3), rng)
        o = nulla_run(S, 2)
        if o.status == INFEASIBLE:
            infeasible += 1
            assert verify_null_cert(S, o.certificate)
            assert not has_root_over(S, E, emb)
    assert infeasible > 0


def test_monotone_minimal_degree():
    rng = random.Random(7)
    K = FieldSpec.prime(2)
    seen = 0
    for _ in range(60):
        S = random_system(K, rng.randint(1, 3), rng)
        o = nulla_run(S, 1)
        if o.status != INFEASIBLE:
            continue
        seen += 1
        for D in range(o.nulla_degree, 4):
            assert nulla_run(S, D).nulla_degree == o.nulla_degree
        if o.nulla_degree > 0:
            assert nulla_run(S, o.nulla_degree - 1).status == BOUND_REACHED
    assert seen > 0


def linear(K, rng, infeasible):
    nv, m = rng.randint(2, 4), rng.randint(1, 4)
    A = [[rng.randint(-3, 3) for _ in range(nv)] for _ in range(m)]
    b = [rng.randint(-3, 3) for _ in range(m)]
    if infeasible:
        w = [rng.randint(1, 2) for _ in range(m)]
        A.append([sum(w[i] * A[i][j] for i in range(m)) for j in range(nv)])
        b.append(sum(w[i] * b[i] for i in range(m)) + 1)
    return A, b


@pytest.mark.parametrize("K", [QQ, FieldSpec.prime(5)], ids=str)
def test_fredholm_specialization(K):
    rng = random.Random(17)
    for t in range(100):
        A, b = linear(K, rng, t % 2 == 1)
        nv = len(A[0])
        gens = []
        for row, bi in zip(A, b):
            terms = {tuple(int(i == j) for i in range(nv)): K.from_int(a) for j, a in enumerate(row)}
            terms[(0,) * nv] = K.from_int(-bi)
            f = Polynomial(K, nv, terms)
            if not f.is_zero():
                gens.append(f)
        M = FieldMatrix.from_raw(K, [[K.from_int(a) for a in row] for row in A])
        bb = [K.from_int(v) for v in b]
        sol = solve_linear(M, bb)
        assert sol.feasible or check_witness(M, bb, sol.witness)
        if not gens:
            assert sol.feasible
            continue
        S = PolySystem(K, [f"x{i}" for i in range(nv)], gens)
        o = nulla_run(S, 0)
        assert (o.status == INFEASIBLE) == (not sol.feasible)


def dual_infeasible(S, d) -> bool:
    """F*lambda = 0, lambda_1 = 1 over monomials of the degree-d expansion, decided by solve_linear."""
    K, n = S.spec, S.n
    rows = [g.shift(m) for g in S.generators for m in monomials_up_to(n, d)]
    monos = sorted({m for r in rows for m in r.monomials()} | {(0,) * n})
    idx = {m: i for i, m in enumerate(monos)}
    A = [[K.zero] * len(monos) for _ in rows]
    for i, r in enumerate(rows):
        for m in r.monomials():
            A[i][idx[m]] = r.coeff(m).raw
    unit = [K.zero] * len(monos)
    unit[idx[(0,) * n]] = K.one
    M = FieldMatrix(K, A + [unit], len(monos))
    return not solve_linear(M, [K.zero] * len(rows) + [K.one]).feasible


def test_dual_consistency():
    rng = random.Random(23)
    for K in (FieldSpec.prime(2), FieldSpec.prime(3), QQ):
        for _ in range(25):
            S = random_system(K, rng.randint(1, 3), rng)
            for d in range(3):
                assert (nulla_decide(S, d) is not None) == dual_infeasible(S, d)


def test_examples_and_certificate_json():
    S = PolySystem.parse(QQ, ["x1", "x2", "x3"], ["x1^2 - 1", "2*x1*x2 + x3", "x1 + x2", "x1 + x3"])
    o = nulla_run(S, 3)
    assert o.status == INFEASIBLE and o.nulla_degree == 1
    cert = NullCertificate.from_json(o.certificate.to_json(), S.n)
    assert verify_null_cert(S, cert)
    assert combination(S, cert.multipliers) == Polynomial.constant(QQ, 3, 1)
    bad = NullCertificate([m.scale(Fraction(2)) for m in cert.multipliers], QQ)
    assert not verify_null_cert(S, bad)
    assert PolySystem.from_json(S.to_json()) == S
    with pytest.raises(ValueError):
        PolySystem(QQ, ["x"], [Polynomial.zero(QQ, 1)])
