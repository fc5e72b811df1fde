"""Brute-force reference answers, written without importing polycert.

Everything here is deliberately naive: exhaustive enumeration over tiny
domains, plus sympy for exact rank questions.  The frozen values in
tests/data/oracles.json were produced by ``python tests/freeze_oracles.py``.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

# GF(4) = F_2[t]/(t^2+t+1), elements packed as bits: 0, 1, w=2, w^2=w+1=3
GF4_ONE, GF4_W, GF4_W2 = 1, 2, 3
COLOR_TO_GF4 = (GF4_ONE, GF4_W, GF4_W2)


def gf4_mul(a: int, b: int) -> int:
    r = 0
    for i in range(2):
        if (b >> i) & 1:
            r ^= a << i
    if r & 4:
        r ^= 0b111
    return r


def gf4_pow(a: int, e: int) -> int:
    r = 1
    for _ in range(e):
        r = gf4_mul(r, a)
    return r


def proper_colorings(n: int, edges, k: int = 3, fix0: bool = True) -> list[tuple[int, ...]]:
    """All proper k-colorings as color-index tuples; vertex 0 gets color 0 when fix0."""
    out = []
    first = [0] if fix0 and n else range(k)
    for c0 in first:
        for rest in itertools.product(range(k), repeat=max(n - 1, 0)):
            col = (c0,) + rest if n else ()
            if all(col[i] != col[j] for i, j in edges):
                out.append(col)
    return out


def colorable(n: int, edges, k: int = 3) -> bool:
    adj = [set() for _ in range(n)]
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    col = [-1] * n

    def go(v):
        if v == n:
            return True
        for c in range(k):
            if all(col[u] != c for u in adj[v]):
                col[v] = c
                if go(v + 1):
                    return True
        col[v] = -1
        return False

    return go(0)


def coloring_roots_gf4(n: int, edges) -> list[list[int]]:
    """Roots of the F_2 3-coloring encoding with x_0 = 1, as packed GF(4) tuples."""
    return sorted([COLOR_TO_GF4[c] for c in col] for col in proper_colorings(n, edges))


def check_gf4_root(n: int, edges, point) -> bool:
    """Evaluate x_i^3 + 1 and x_i^2 + x_i x_j + x_j^2 directly in GF(4)."""
    for x in point:
        if gf4_pow(x, 3) ^ 1:
            return False
    for i, j in edges:
        a, b = point[i], point[j]
        if gf4_mul(a, a) ^ gf4_mul(a, b) ^ gf4_mul(b, b):
            return False
    return True


def stability_number(n: int, edges) -> int:
    best = 0
    es = [(i, j) for i, j in edges]
    for mask in range(1 << n):
        if bin(mask).count("1") <= best:
            continue
        if all(not ((mask >> i) & 1 and (mask >> j) & 1) for i, j in es):
            best = bin(mask).count("1")
    return best


def odd_cycle_theta(n: int) -> float:
    c = math.cos(math.pi / n)
    return n * c / (1 + c)


def linear_feasible(A, b) -> bool:
    """Ax = b over Q via sympy ranks."""
    import sympy

    M = sympy.Matrix(A)
    Mb = M.row_join(sympy.Matrix(b))
    return M.rank() == Mb.rank()


def count_fq_roots(p: int, n: int, polys) -> int:
    """Common roots in F_p^n of polynomials given as {exponent tuple: int coeff}."""
    count = 0
    for pt in itertools.product(range(p), repeat=n):
        ok = True
        for f in polys:
            v = 0
            for m, c in f.items():
                t = c
                for x, e in zip(pt, m):
                    t *= x**e
                v += t
            if v % p:
                ok = False
                break
        count += ok
    return count


def fq_roots(p: int, n: int, polys) -> list[tuple[int, ...]]:
    out = []
    for pt in itertools.product(range(p), repeat=n):
        if all(sum(c * math.prod(x**e for x, e in zip(pt, m)) for m, c in f.items()) % p == 0 for f in polys):
            out.append(pt)
    return out


# -- corpora -------------------------------------------------------------------------

def gnp(n: int, p: float, rng: random.Random) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]


def corpus_criterion3():
    out = []
    for s in range(100):
        rng = random.Random(3000 + s)
        n = rng.randint(4, 7)
        p = rng.uniform(0.3, 0.9)
        out.append((n, gnp(n, p, rng)))
    return out


def corpus_non3colorable(count: int = 50):
    out = []
    rng = random.Random(5000)
    while len(out) < count:
        n = rng.randint(5, 11)
        p = rng.uniform(0.3, 0.7)
        edges = gnp(n, p, rng)
        if not colorable(n, edges):
            out.append((n, edges))
    return out


def corpus_planted_k4(count: int = 20):
    out = []
    for s in range(count):
        rng = random.Random(6000 + s)
        n = rng.randint(6, 30)
        edges = set(gnp(n, rng.uniform(0.05, 0.2), rng))
        quad = sorted(rng.sample(range(n), 4))
        edges |= set(itertools.combinations(quad, 2))
        out.append((n, sorted(edges), quad))
    return out


def corpus_bipartite(count: int = 20):
    out = []
    for s in range(count):
        rng = random.Random(7000 + s)
        n = rng.randint(2, 8)
        side = [rng.random() < 0.5 for _ in range(n)]
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if side[i] != side[j] and rng.random() < 0.6]
        out.append((n, edges))
    return out


def corpus_small(count: int = 20):
    out = []
    for s in range(count):
        rng = random.Random(8000 + s)
        n = rng.randint(3, 8)
        out.append((n, gnp(n, rng.uniform(0.2, 0.7), rng)))
    return out


def complement(n: int, edges):
    es = set(map(tuple, edges))
    return [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in es]


def corpus_linear(count: int = 100):
    """Integer systems over Q; odd indices get an appended inconsistent combination."""
    out = []
    for s in range(count):
        rng = random.Random(9000 + s)
        nv = rng.randint(2, 5)
        m = rng.randint(1, 5)
        A = [[rng.randint(-3, 3) for _ in range(nv)] for _ in range(m)]
        b = [rng.randint(-4, 4) for _ in range(m)]
        if s % 2:
            w = [rng.randint(-2, 2) or 1 for _ in range(m)]
            A.append([sum(w[i] * A[i][j] for i in range(m)) for j in range(nv)])
            b.append(sum(w[i] * b[i] for i in range(m)) + rng.choice([-2, -1, 1, 2]))
        out.append((A, b))
    return out


def corpus_fq_systems(count: int = 100):
    """Random systems over F_2/F_3 (n <= 4, deg <= 3) plus the field equations."""
    out = []
    for s in range(count):
        rng = random.Random(10000 + s)
        p = rng.choice([2, 3])
        n = rng.randint(1, 4)
        polys = []
        for _ in range(rng.randint(1, 3)):
            f = {}
            for _ in range(rng.randint(1, 4)):
                deg = rng.randint(0, 3)
                m = [0] * n
                for _ in range(deg):
                    m[rng.randrange(n)] += 1
                f[tuple(m)] = (f.get(tuple(m), 0) + rng.randint(1, p - 1)) % p
            f = {m: c for m, c in f.items() if c}
            if f:
                polys.append(f)
        for i in range(n):
            m = [0] * n
            m[i] = p
            e = [0] * n
            e[i] = 1
            polys.append({tuple(m): 1, tuple(e): p - 1})
        out.append((p, n, polys))
    return out


def fraction_str(x) -> str:
    return str(Fraction(x))
