"""Root recovery from a terminal fixed-point space via multiplication matrices.

When the fixed point certifies ``dim_d = dim_{d-1}``, the standard monomials of
the terminal space form a basis of R/I and every ``x_i * b`` has a normal form
of degree <= d.  The matrices of "multiply by x_i" commute.  A random linear
combination M has distinct eigenvalues (for radical ideals and a large enough
field).  Its left eigenvectors are the evaluation functionals ``b -> b(root)``,
so each root's coordinates come straight out of the shared eigenbasis.

Finite-field work happens in an extension E of the base field, on raw values
held in numpy arrays (log/exp tables for products).  Over Q everything is
exact Fraction arithmetic and only rational roots are found.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactla import FieldMatrix, PolySpace, _axpy, _is_f2
from .fields import (
    DEFAULT_ENUM_CAP, FieldElement, FieldSpec, embedding, extend_field, subfield_contains,
)
from .polys import Polynomial, evaluate

REDUCTION_ESCAPE = "REDUCTION_ESCAPE"
FAIL_DEGENERATE = "FAIL_DEGENERATE"
ROOT_OUTSIDE_EXTENSION = "ROOT_OUTSIDE_EXTENSION"
NOT_COMMUTING = "NOT_COMMUTING"
NOT_DIAGONAL = "NOT_DIAGONAL"

MAX_REDRAWS = 8


class RecoveryError(RuntimeError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass
class QuotientBasis:
    space: PolySpace
    ids: list[int]  # standard monomial ids, ascending (so ids[0] is the constant)
    generators: list[Polynomial] | None = None

    @property
    def N(self) -> int:
        return len(self.ids)

    @property
    def monomials(self) -> list[tuple[int, ...]]:
        return [self.space.codec.monomial(i) for i in self.ids]


@dataclass
class MultiplicationMatrix:
    var: int
    matrix: FieldMatrix


@dataclass
class RootSet:
    field: FieldSpec
    roots: list[tuple[FieldElement, ...]]
    work_field: FieldSpec | None = None
    draws: int = 1

    def __len__(self):
        return len(self.roots)

    def as_raw(self) -> set[tuple]:
        return {tuple(c.raw for c in r) for r in self.roots}

    def to_json(self) -> dict:
        return {
            "extension": self.field.to_json(),
            "roots": [[self.field.format(c.raw) for c in r] for r in self.roots],
        }


# ---------------------------------------------------------------------------
# quotient construction

def normal_form(space: PolySpace, row):
    """Reduce a row modulo the (fully reduced) basis of ``space``."""
    rows = space.rows()
    if space.f2:
        for b in [L for L in rows if (row >> L) & 1]:
            row ^= rows[b]
        return row
    K = space.spec
    row = dict(row)
    for b in [L for L in row if L in rows]:
        c = row.get(b)
        if c:
            _axpy(K, row, K.neg(c), rows[b])
    return row


def build_quotient(F: PolySpace, generators: Sequence[Polynomial] | None = None):
    """Standard-monomial basis of R/I and the matrices M_{x_i} on it.

    Column j of M_{x_i} holds the coordinates of NF(x_i * b_j).
    """
    ids = F.standard_monomial_ids(F.degree)
    if not ids or ids[0] != 0:
        raise RecoveryError(REDUCTION_ESCAPE, "1 lies in the space; there is no quotient to build")
    pos = {m: j for j, m in enumerate(ids)}
    N = len(ids)
    K = F.spec
    codec = F.codec
    mats = []
    for i in range(F.n):
        cols = []
        for j, b in enumerate(ids):
            m = codec.mul(b, i)
            nf = normal_form(F, (1 << m) if F.f2 else {m: K.one})
            col = [K.zero] * N
            items = [(x, 1) for x in range(nf.bit_length()) if (nf >> x) & 1] if F.f2 else nf.items()
            for x, c in items:
                k = pos.get(x)
                if k is None:
                    raise RecoveryError(
                        REDUCTION_ESCAPE,
                        f"x{i} * {codec.monomial(b)} leaves a term {codec.monomial(x)} outside the basis")
                col[k] = c
            cols.append(col)
        rows = [[cols[j][r] for j in range(N)] for r in range(N)]
        mats.append(MultiplicationMatrix(i, FieldMatrix.from_raw(K, rows, N)))
    basis = QuotientBasis(F, ids, list(generators) if generators is not None else None)
    return basis, mats


# ---------------------------------------------------------------------------
# dense linear algebra on raw finite-field values

class _FF:
    """Vectorized arithmetic on int64 arrays of raw values of a finite field."""

    def __init__(self, E: FieldSpec):
        self.E = E
        self.p = E.p
        self.char2 = E.p == 2
        self.prime = E.kind == "prime"
        E.numpy_tables()

    def add(self, a, b):
        if self.char2:
            return a ^ b
        return self.E.add_array(a, b)

    def neg(self, a):
        if self.char2:
            return a
        if self.prime:
            return (-a) % self.p
        return self._neg_ext(a)

    def _neg_ext(self, a):
        out = np.zeros_like(a)
        scale = 1
        for _ in range(self.E.k):
            out += ((-(a // scale % self.p)) % self.p) * scale
            scale *= self.p
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        return self.E.mul_array(a, b)

    def sum(self, a, axis):
        if self.char2:
            return np.bitwise_xor.reduce(a, axis=axis)
        if self.prime:
            return a.sum(axis=axis) % self.p
        a = np.moveaxis(a, axis, 0)
        out = np.zeros(a.shape[1:], dtype=np.int64)
        for x in a:
            out = self.add(out, x)
        return out

    def matmul(self, A, B):
        if self.prime:
            return (A @ B) % self.p
        if B.size and int(B.max()) < self.p:
            # B lives in the prime subfield: multiply coordinate planes separately
            out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
            scale = 1
            for _ in range(self.E.k):
                out += ((A // scale % self.p) @ B) % self.p * scale
                scale *= self.p
            return out
        rows = max(1, (1 << 22) // max(1, A.shape[1] * B.shape[1]))
        return np.concatenate([self.sum(self.mul(A[i:i + rows, :, None], B[None, :, :]), axis=1)
                               for i in range(0, A.shape[0], rows)], axis=0) if A.shape[0] else \
            np.zeros((0, B.shape[1]), dtype=np.int64)

    def matvec(self, A, v):
        return self.sum(self.mul(A, v[None, :]), axis=1)

    def inv(self, x: int) -> int:
        return int(self.E.inv(int(x)))

    def inverse_each(self, a):
        return np.array([self.inv(x) for x in a], dtype=np.int64)

    def rref(self, A):
        """Reduced row echelon form; returns (R, pivot columns)."""
        A = A.copy()
        rows, cols = A.shape
        pivots = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(A[r:, c])[0]
            if len(nz) == 0:
                continue
            k = r + int(nz[0])
            if k != r:
                A[[r, k]] = A[[k, r]]
            inv = self.inv(A[r, c])
            A[r] = self.mul(A[r], np.full(cols, inv, dtype=np.int64))
            f = A[:, c].copy()
            f[r] = 0
            A = self.sub(A, self.mul(f[:, None], A[r][None, :]))
            pivots.append(c)
            r += 1
        return A, pivots

    def null_vector(self, A):
        """A nonzero vector in the right kernel of A, or None."""
        R, piv = self.rref(A)
        cols = A.shape[1]
        free = [c for c in range(cols) if c not in set(piv)]
        if not free:
            return None
        f = free[0]
        x = np.zeros(cols, dtype=np.int64)
        x[f] = 1
        for r, c in enumerate(piv):
            x[c] = self.neg(R[r, f:f + 1])[0]
        return x

    def inverse(self, A):
        n = A.shape[0]
        aug = np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1)
        R, piv = self.rref(aug)
        if piv[:n] != list(range(n)):
            return None
        return R[:, n:]

    def hessenberg(self, M, track: bool = False):
        """Upper Hessenberg H = G M G^-1; returns (H, G) with G None unless tracked."""
        H = M.copy()
        N = H.shape[0]
        G = np.eye(N, dtype=np.int64) if track else None
        for m in range(1, N - 1):
            nz = np.nonzero(H[m:, m - 1])[0]
            if len(nz) == 0:
                continue
            i = m + int(nz[0])
            if i != m:
                H[[i, m]] = H[[m, i]]
                H[:, [i, m]] = H[:, [m, i]]
                if track:
                    G[[i, m]] = G[[m, i]]
            inv = self.inv(H[m, m - 1])
            u = self.mul(H[m + 1:, m - 1], np.full(N - m - 1, inv, dtype=np.int64))
            if not u.any():
                continue
            H[m + 1:] = self.sub(H[m + 1:], self.mul(u[:, None], H[m][None, :]))
            H[:, m] = self.add(H[:, m], self.matvec(H[:, m + 1:], u))
            if track:
                G[m + 1:] = self.sub(G[m + 1:], self.mul(u[:, None], G[m][None, :]))
        return H, G

    def left_eigenvectors(self, M, lams):
        """Rows w with w M = lam w and w[0] = 1, one per eigenvalue, or None.

        Solved for all eigenvalues at once by forward substitution on the
        Hessenberg form; None when the form is reduced or a row is inconsistent.
        """
        N = M.shape[0]
        H, G = self.hessenberg(M, track=True)
        sub = np.array([H[j + 1, j] for j in range(N - 1)], dtype=np.int64)
        if not sub.all():
            return None
        lam = np.array(lams, dtype=np.int64)
        V = np.zeros((len(lams), N), dtype=np.int64)
        V[:, 0] = 1
        for j in range(N):
            s = self.sum(self.mul(V[:, :j + 1], H[None, :j + 1, j]), axis=1)
            s = self.sub(s, self.mul(lam, V[:, j]))
            if j == N - 1:
                if s.any():
                    return None
                break
            V[:, j + 1] = self.mul(self.neg(s), np.full(len(lams), self.inv(sub[j]), dtype=np.int64))
        return self.matmul(V, G)

    def charpoly(self, M):
        """Characteristic polynomial (coefficients low degree first) via Hessenberg form."""
        E = self.E
        N = M.shape[0]
        H, _ = self.hessenberg(M)
        # p_k(x) = (x - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{j=i+1..k} h_{j,j-1}) p_{i-1}
        P = np.zeros((N + 1, N + 1), dtype=np.int64)
        P[0, 0] = 1
        for k in range(1, N + 1):
            prev = P[k - 1]
            shifted = np.concatenate([[0], prev[:-1]])
            cur = self.sub(shifted, self.mul(prev, np.full(N + 1, H[k - 1, k - 1], dtype=np.int64)))
            coef = np.zeros(k - 1, dtype=np.int64)
            t = 1
            for i in range(k - 1, 0, -1):
                t = E.mul(t, int(H[i, i - 1]))
                if t == 0:
                    break
                coef[i - 1] = E.mul(int(H[i - 1, k - 1]), t)
            if coef.any():
                acc = self.sum(self.mul(coef[:, None], P[:k - 1]), axis=0)
                cur = self.sub(cur, acc)
            P[k] = cur
        return P[N]

    def roots(self, poly):
        """All roots in E by evaluating at every element (Horner, vectorized)."""
        q = self.E.order
        X = np.arange(q, dtype=np.int64)
        vals = np.full(q, poly[-1], dtype=np.int64)
        for c in poly[-2::-1]:
            vals = self.add(self.mul(vals, X), np.full(q, c, dtype=np.int64))
        return [int(x) for x in np.nonzero(vals == 0)[0]]

    def multiplicity(self, poly, r: int) -> int:
        """Multiplicity of the root r, by repeated synthetic division."""
        E = self.E
        coeffs = [int(c) for c in poly]
        mult = 0
        while len(coeffs) > 1:
            out = [0] * (len(coeffs) - 1)
            acc = 0
            for k in range(len(coeffs) - 1, 0, -1):
                acc = E.add(E.mul(acc, r), coeffs[k])
                out[k - 1] = acc
            rem = E.add(E.mul(acc, r), coeffs[0])
            if rem != 0:
                break
            mult += 1
            coeffs = out
        return mult


# ---------------------------------------------------------------------------
# extraction

def _check_commuting(mats: list[np.ndarray], mm):
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            if not np.array_equal(mm(mats[a], mats[b]), mm(mats[b], mats[a])):
                raise RecoveryError(NOT_COMMUTING, f"M_x{a} and M_x{b} do not commute")


def _extension_degree(base: FieldSpec, N: int) -> int:
    need = 4 * N * N
    return max(1, math.ceil(math.log(need) / math.log(base.order) - 1e-12))


# -- splitting degree by distinct-degree factorization ------------------------

def _f2_mulmod(a: int, b: int, m: int) -> int:
    dm = m.bit_length() - 1
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> dm) & 1:
            a ^= m
    return r


def _f2_mod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def _f2_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _f2_mod(a, b)
    return a


def _f2_div(a: int, b: int) -> int:
    q = 0
    db = b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        s = a.bit_length() - 1 - db
        q ^= 1 << s
        a ^= b << s
    return q


def _f2_split_degree(f: int) -> int:
    out = 1
    h = 2  # x
    j = 0
    while f.bit_length() > 1:
        j += 1
        h = _f2_mulmod(h, h, f)
        while True:
            g = _f2_gcd(f, h ^ 2)  # gcd(f, x^(2^j) - x)
            if g.bit_length() <= 1:
                break
            out = math.lcm(out, j)
            f = _f2_div(f, g)
            if f.bit_length() <= 1:
                return out
            h = _f2_mod(h, f)
    return out


class _KPoly:
    """Dense polynomials (low degree first) over a finite field, scalar ops."""

    def __init__(self, K: FieldSpec):
        self.K = K

    def trim(self, a):
        a = list(a)
        while a and a[-1] == 0:
            a.pop()
        return a

    def mod(self, a, m):
        K = self.K
        a = self.trim(a)
        dm = len(m) - 1
        inv = K.inv(m[-1])
        while len(a) - 1 >= dm:
            c = K.mul(a[-1], inv)
            s = len(a) - 1 - dm
            for i, mi in enumerate(m):
                if mi:
                    a[s + i] = K.sub(a[s + i], K.mul(c, mi))
            a = self.trim(a)
        return a

    def divexact(self, a, b):
        K = self.K
        a = self.trim(a)
        q = [0] * (len(a) - len(b) + 1)
        inv = K.inv(b[-1])
        while len(a) >= len(b):
            c = K.mul(a[-1], inv)
            s = len(a) - len(b)
            q[s] = c
            for i, bi in enumerate(b):
                if bi:
                    a[s + i] = K.sub(a[s + i], K.mul(c, bi))
            a = self.trim(a)
        return self.trim(q)

    def mulmod(self, a, b, m):
        K = self.K
        if not a or not b:
            return []
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = K.add(out[i + j], K.mul(x, y))
        return self.mod(out, m)

    def powmod(self, a, e, m):
        r = [self.K.one]
        while e:
            if e & 1:
                r = self.mulmod(r, a, m)
            a = self.mulmod(a, a, m)
            e >>= 1
        return r

    def gcd(self, a, b):
        a, b = self.trim(a), self.trim(b)
        while b:
            a, b = b, self.mod(a, b)
        return a

    def split_degree(self, f) -> int:
        K = self.K
        f = self.trim(f)
        q = K.order
        out = 1
        h = [0, K.one]
        j = 0
        while len(f) > 1:
            j += 1
            h = self.powmod(h, q, f)
            while True:
                hx = list(h) + [0] * max(0, 2 - len(h))
                hx[1] = K.sub(hx[1], K.one)
                g = self.gcd(f, self.mod(hx, f))
                if len(g) <= 1:
                    break
                out = math.lcm(out, j)
                f = self.divexact(f, g)
                if len(f) <= 1:
                    return out
                h = self.mod(h, f)
        return out


def _splitting_degree(K: FieldSpec, chi) -> int:
    """Smallest j such that ``chi`` (raw coefficients over K) splits over GF(|K|^j)."""
    if K.kind == "prime" and K.p == 2:
        f = 0
        for i, c in enumerate(chi):
            if int(c):
                f |= 1 << i
        return _f2_split_degree(f)
    return _KPoly(K).split_degree([int(c) for c in chi])


def extract_roots(basis: QuotientBasis, mats: Sequence[MultiplicationMatrix], seed: int = 0,
                  generators: Sequence[Polynomial] | None = None, field_cap: int = DEFAULT_ENUM_CAP) -> RootSet:
    """Roots of the ideal from commuting multiplication matrices.

    Every candidate is checked by exact evaluation against ``generators``
    (default: the ones stored on ``basis``, else the basis of its space).
    """
    K = basis.space.spec
    gens = list(generators if generators is not None else (basis.generators or basis.space.basis))
    if K.kind == "rational":
        return _extract_rational(basis, mats, seed, gens)
    return _extract_finite(basis, mats, seed, gens, field_cap)


def _extract_finite(basis, mats, seed, gens, cap) -> RootSet:
    K = basis.space.spec
    N = basis.N
    n = len(mats)
    base = _FF(K)
    raw = [np.array(m.matrix.rows, dtype=np.int64).reshape(N, N) for m in mats]
    _check_commuting(raw, base.matmul)
    J = 1
    for m in raw:
        J = math.lcm(J, _splitting_degree(K, base.charpoly(m)))
    if K.order ** J > cap:
        raise RecoveryError(ROOT_OUTSIDE_EXTENSION, f"coordinates need GF({K.p}^{K.k * J}), above the field cap")
    e = -(-_extension_degree(K, N) // J) * J
    while K.order ** e > cap and e > J:
        e -= J
    rng = random.Random(seed)
    draws = 0
    while True:
        E, emb = extend_field(K, e)
        ff = _FF(E)
        emb_table = np.array([emb(v) for v in range(K.order)], dtype=np.int64)
        Ms = [emb_table[m] for m in raw]
        split_failed = False
        for _ in range(MAX_REDRAWS + 1):
            draws += 1
            c = [rng.randrange(E.order) for _ in range(n)]
            M = np.zeros((N, N), dtype=np.int64)
            for ci, Mi in zip(c, Ms):
                M = ff.add(M, ff.mul(Mi, np.full((N, N), ci, dtype=np.int64)))
            chi = ff.charpoly(M)
            lams = ff.roots(chi)
            mults = [ff.multiplicity(chi, r) for r in lams]
            if sum(mults) < N:
                split_failed = True
                break
            if len(lams) == N:
                return _finish_finite(basis, Ms, M, lams, ff, K, gens, draws)
        if not split_failed:
            raise RecoveryError(FAIL_DEGENERATE, f"no combination with distinct eigenvalues after {draws} draws")
        if K.order ** (2 * e) > cap:
            raise RecoveryError(ROOT_OUTSIDE_EXTENSION,
                                f"characteristic polynomial does not split over GF({K.p}^{K.k * e})")
        e *= 2


def _finish_finite(basis, Ms, M, lams, ff: _FF, K, gens, draws) -> RootSet:
    N = basis.N
    E = ff.E
    W = ff.left_eigenvectors(M, lams)
    if W is None or not W[:, 0].all():
        W = np.zeros((N, N), dtype=np.int64)
        for r, lam in enumerate(lams):
            A = ff.sub(M.T, np.diag(np.full(N, lam, dtype=np.int64)))
            w = ff.null_vector(A)
            if w is None or w[0] == 0:
                raise RecoveryError(FAIL_DEGENERATE, "eigenvector does not evaluate the constant to a nonzero value")
            W[r] = ff.mul(w, np.full(N, ff.inv(w[0]), dtype=np.int64))
    else:
        W = ff.mul(W, ff.inverse_each(W[:, 0])[:, None])
    # The rows of W are eigenvectors for distinct eigenvalues, hence W is
    # invertible, and T^-1 M_i T is diagonal for T = W^-1 exactly when
    # W M_i = D_i W; the first column of W is 1, so D_i is read off column 0.
    coords = np.zeros((N, len(Ms)), dtype=np.int64)
    for i, Mi in enumerate(Ms):
        P = ff.matmul(W, Mi)
        diag = P[:, 0].copy()
        if not np.array_equal(P, ff.mul(diag[:, None], W)):
            raise RecoveryError(NOT_DIAGONAL, f"T^-1 M_x{i} T is not diagonal")
        coords[:, i] = diag
    L, to_small = _minimal_subfield(E, K, coords)
    roots = []
    for row in coords:
        pt = tuple(FieldElement(L, to_small(int(v))) for v in row)
        if all(evaluate(g, pt).raw == 0 for g in gens):
            roots.append(pt)
    roots.sort(key=lambda pt: tuple(c.raw for c in pt))
    return RootSet(L, roots, E, draws)


def _minimal_subfield(E: FieldSpec, K: FieldSpec, coords: np.ndarray):
    """Smallest GF(p^j) between K and E holding every coordinate, with a map E -> it."""
    values = sorted({int(v) for v in coords.ravel()})
    j = K.k
    while j < E.k:
        if E.k % j == 0 and all(subfield_contains(E, v, j) for v in values):
            break
        j += K.k
    if j == E.k:
        return E, lambda v: v
    if j == K.k:
        L = K
    else:
        L = FieldSpec.gf(E.p, j) if j > 1 else FieldSpec.prime(E.p)
    emb = embedding(L, E)
    back = {emb(v): v for v in range(L.order)}
    return L, back.__getitem__


# -- rationals ---------------------------------------------------------------

def _qmatmul(A, B):
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    return [[sum((A[i][k] * B[k][j] for k in range(m) if A[i][k] and B[k][j]), Fraction(0))
             for j in range(p)] for i in range(n)]


def _faddeev_leverrier(M) -> list[Fraction]:
    N = len(M)
    coeffs = [Fraction(0)] * (N + 1)
    coeffs[N] = Fraction(1)
    Mk = [[Fraction(0)] * N for _ in range(N)]
    for k in range(1, N + 1):
        for i in range(N):
            Mk[i][i] += coeffs[N - k + 1]
        AM = _qmatmul(M, Mk)
        coeffs[N - k] = -sum(AM[i][i] for i in range(N)) / k
        Mk = AM
    return coeffs


def _qeval(poly, x):
    acc = Fraction(0)
    for c in reversed(poly):
        acc = acc * x + c
    return acc


def _qdeflate(poly, r):
    out = [Fraction(0)] * (len(poly) - 1)
    acc = Fraction(0)
    for k in range(len(poly) - 1, 0, -1):
        acc = acc * r + poly[k]
        out[k - 1] = acc
    return out


def _rational_roots(poly, M=None) -> tuple[list[Fraction], int]:
    """Distinct rational roots proposed numerically and confirmed exactly, with total multiplicity.

    Candidates come from the eigenvalues of ``M`` (better conditioned than the
    coefficients) and from the roots of whatever is left after deflating the
    confirmed ones, repeated until nothing new is confirmed.
    """
    found = []
    total = 0
    rest = list(poly)
    approx = list(np.linalg.eigvals(np.array(M, dtype=float))) if M is not None and len(M) else []
    while len(rest) > 1:
        approx += list(np.roots([float(c) for c in reversed(rest)]))
        cands = set()
        for z in approx:
            if abs(z.imag) <= 1e-6 * max(1.0, abs(z.real)):
                cands.add(Fraction(round(z.real)))
                for den in (10**3, 10**6, 10**9):
                    cands.add(Fraction(z.real).limit_denominator(den))
        approx = []
        hit = False
        for r in sorted(cands):
            if r in found or _qeval(rest, r) != 0:
                continue
            found.append(r)
            hit = True
            while len(rest) > 1 and _qeval(rest, r) == 0:
                rest = _qdeflate(rest, r)
                total += 1
        if not hit:
            break
    return sorted(found), total


def _qnull_vector(A) -> list[Fraction] | None:
    from .exactla import nullspace

    ns = nullspace(FieldMatrix.from_raw(FieldSpec.rational(), A, len(A[0])))
    return [Fraction(v) for v in ns[0]] if ns else None


def _qinverse(A):
    n = len(A)
    R = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(A)]
    for c in range(n):
        piv = next((r for r in range(c, n) if R[r][c] != 0), None)
        if piv is None:
            return None
        R[c], R[piv] = R[piv], R[c]
        inv = 1 / R[c][c]
        R[c] = [v * inv for v in R[c]]
        for r in range(n):
            if r != c and R[r][c] != 0:
                f = R[r][c]
                R[r] = [a - f * b for a, b in zip(R[r], R[c])]
    return [r[n:] for r in R]


def _extract_rational(basis, mats, seed, gens) -> RootSet:
    K = basis.space.spec
    N = basis.N
    Ms = [[[Fraction(v) for v in row] for row in m.matrix.rows] for m in mats]
    for a in range(len(Ms)):
        for b in range(a + 1, len(Ms)):
            if _qmatmul(Ms[a], Ms[b]) != _qmatmul(Ms[b], Ms[a]):
                raise RecoveryError(NOT_COMMUTING, f"M_x{a} and M_x{b} do not commute")
    rng = random.Random(seed)
    span = 10 * N * N
    for draw in range(1, MAX_REDRAWS + 2):
        c = [rng.randint(-span, span) for _ in Ms]
        M = [[sum((ci * Mi[r][s] for ci, Mi in zip(c, Ms)), Fraction(0)) for s in range(N)] for r in range(N)]
        chi = _faddeev_leverrier(M)
        lams, total = _rational_roots(chi, M)
        if total < N:
            raise RecoveryError(ROOT_OUTSIDE_EXTENSION,
                                "characteristic polynomial has irrational or complex roots")
        if len(lams) < N:
            continue
        W = []
        for lam in lams:
            A = [[M[s][r] - (lam if r == s else 0) for s in range(N)] for r in range(N)]
            w = _qnull_vector(A)
            if w is None or w[0] == 0:
                raise RecoveryError(FAIL_DEGENERATE, "eigenvector does not evaluate the constant to a nonzero value")
            W.append([v / w[0] for v in w])
        T = _qinverse(W)
        if T is None:
            raise RecoveryError(FAIL_DEGENERATE, "eigenvectors are dependent")
        coords = [[None] * len(Ms) for _ in range(N)]
        for i, Mi in enumerate(Ms):
            D = _qmatmul(_qmatmul(W, Mi), T)
            for r in range(N):
                for s in range(N):
                    if r != s and D[r][s] != 0:
                        raise RecoveryError(NOT_DIAGONAL, f"T^-1 M_x{i} T is not diagonal")
                coords[r][i] = D[r][r]
        roots = []
        for row in coords:
            pt = tuple(FieldElement(K, v) for v in row)
            if all(evaluate(g, pt).raw == 0 for g in gens):
                roots.append(pt)
        roots.sort(key=lambda pt: tuple(c.raw for c in pt))
        return RootSet(K, roots, K, draw)
    raise RecoveryError(FAIL_DEGENERATE, f"no combination with distinct eigenvalues after {MAX_REDRAWS + 1} draws")


def recover_roots(sys, outcome, seed: int = 0) -> RootSet:
    """Convenience: quotient plus extraction for a COUNTED FPNulLA outcome."""
    if outcome.space is None:
        raise ValueError("recovery needs a COUNTED outcome")
    basis, mats = build_quotient(outcome.space, sys.generators)
    return extract_roots(basis, mats, seed)
