"""Exact linear algebra over a :class:`FieldSpec`.

Two layers live here:

* :class:`FieldMatrix` with :func:`rref`, :func:`nullspace`, :func:`solve_linear`.
  Over F_2 the elimination runs on rows packed 64 columns per ``uint64`` word;
  over Q it is fraction-free (Bareiss) forward elimination followed by a single
  normalization pass; other fields use plain Gauss-Jordan.
* :class:`SparseEchelon` and :class:`PolySpace`, which hold spans of polynomials
  as rows keyed by monomial id (see :mod:`polycert.monindex`).  The leading
  term of a row is its largest id, so a graded echelon basis makes
  ``S ∩ R_d`` a filter on leading degrees and ``1 ∈ S`` a lookup of pivot 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Iterable, Sequence

import numpy as np

from .fields import FieldElement, FieldError, FieldSpec
from .monindex import MonomialCodec
from .polys import Polynomial


# ---------------------------------------------------------------------------
# dense matrices

class FieldMatrix:
    """Dense matrix of raw field values (lists of rows)."""

    def __init__(self, spec: FieldSpec, rows: Sequence[Sequence], ncols: int | None = None):
        self.spec = spec
        conv = []
        for r in rows:
            conv.append([_raw(spec, v) for v in r])
        if ncols is None:
            ncols = len(conv[0]) if conv else 0
        if any(len(r) != ncols for r in conv):
            raise ValueError("matrix rows have different lengths")
        self.rows = conv
        self.nrows = len(conv)
        self.ncols = ncols

    @classmethod
    def from_raw(cls, spec: FieldSpec, rows: Sequence[Sequence], ncols: int | None = None) -> "FieldMatrix":
        """Wrap rows that already hold raw values of ``spec`` (no conversion)."""
        M = cls.__new__(cls)
        M.spec = spec
        M.rows = [list(r) for r in rows]
        M.nrows = len(M.rows)
        M.ncols = ncols if ncols is not None else (len(M.rows[0]) if M.rows else 0)
        return M

    @classmethod
    def zeros(cls, spec: FieldSpec, nrows: int, ncols: int) -> "FieldMatrix":
        return cls(spec, [[spec.zero] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> "FieldMatrix":
        return cls(spec, [[spec.one if i == j else spec.zero for j in range(n)] for i in range(n)], n)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij) -> FieldElement:
        i, j = ij
        return FieldElement(self.spec, self.rows[i][j])

    def __eq__(self, other):
        return isinstance(other, FieldMatrix) and self.spec == other.spec and self.shape == other.shape and self.rows == other.rows

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(self.spec, [list(c) for c in zip(*self.rows)] if self.nrows else [], self.nrows)

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        K = self.spec
        cols = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = K.zero
                for a, b in zip(r, c):
                    if a != 0 and b != 0:
                        acc = K.add(acc, K.mul(a, b))
                row.append(acc)
            out.append(row)
        return FieldMatrix(K, out, other.ncols)

    def apply(self, v: Sequence) -> list:
        K = self.spec
        out = []
        for r in self.rows:
            acc = K.zero
            for a, b in zip(r, v):
                if a != 0 and b != 0:
                    acc = K.add(acc, K.mul(a, b))
            out.append(acc)
        return out

    def __repr__(self):
        body = "; ".join(" ".join(self.spec.format(v) for v in r) for r in self.rows)
        return f"FieldMatrix({self.spec}, [{body}])"


def _raw(spec: FieldSpec, v):
    if isinstance(v, FieldElement):
        if v.spec != spec:
            raise FieldError("entry from a different field")
        return v.raw
    if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
        return spec.from_fraction(Fraction(v)) if spec.kind != "extension" else spec.from_int(int(v))
    if isinstance(v, (bool, np.integer)):
        return spec.from_int(int(v))
    return spec.parse_elem(v)


# -- F_2 bit-packed kernel ----------------------------------------------------

def pack_gf2(rows: Sequence[Sequence[int]], ncols: int) -> np.ndarray:
    words = (ncols + 63) // 64
    out = np.zeros((len(rows), max(words, 1)), dtype=np.uint64)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            if v & 1:
                out[i, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
    return out


def unpack_gf2(packed: np.ndarray, ncols: int) -> list[list[int]]:
    if packed.shape[0] == 0:
        return []
    bits = np.unpackbits(packed.view(np.uint8), axis=1, bitorder="little")
    return bits[:, :ncols].astype(int).tolist()


def rref_gf2_packed(packed: np.ndarray, ncols: int) -> tuple[np.ndarray, int, list[int]]:
    """Gauss-Jordan on packed rows by word-wise XOR."""
    A = packed.copy()
    nrows = A.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w, b = c >> 6, np.uint64(1) << np.uint64(c & 63)
        hits = np.nonzero(A[r:, w] & b)[0]
        if len(hits) == 0:
            continue
        p = r + hits[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        mask = (A[:, w] & b) != 0
        mask[r] = False
        A[mask] ^= A[r]
        pivots.append(c)
        r += 1
    return A, r, pivots


# -- generic kernels -------------------------------------------------------------

def _rref_generic(spec: FieldSpec, rows: list[list]) -> tuple[list[list], int, list[int]]:
    A = [list(r) for r in rows]
    nrows = len(A)
    ncols = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = spec.inv(A[r][c])
        A[r] = [spec.mul(v, inv) for v in A[r]]
        for i in range(nrows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [spec.sub(a, spec.mul(f, b)) if b != 0 else a for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A, r, pivots


def _rref_rational(rows: list[list[Fraction]]) -> tuple[list[list], int, list[int]]:
    """Fraction-free forward elimination over Z, then one normalization pass."""
    A = []
    for r in rows:
        den = 1
        for v in r:
            den = den * v.denominator // gcd(den, v.denominator)
        A.append([int(v * den) for v in r])
    nrows = len(A)
    ncols = len(A[0]) if A else 0
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        for i in range(r + 1, nrows):
            a = A[i][c]
            # Bareiss step: every entry stays an integer minor, division is exact
            A[i] = [(piv * x - a * y) // prev for x, y in zip(A[i], A[r])]
        prev = piv
        pivots.append(c)
        r += 1
    # normalize pivot rows and eliminate upwards in exact fractions
    R = [[Fraction(v) for v in row] for row in A[:r]]
    for k in range(r - 1, -1, -1):
        c = pivots[k]
        inv = 1 / R[k][c]
        R[k] = [v * inv for v in R[k]]
        for i in range(k):
            f = R[i][c]
            if f:
                R[i] = [a - f * b for a, b in zip(R[i], R[k])]
    R.extend([[Fraction(0)] * ncols for _ in range(nrows - r)])
    return R, r, pivots


def rref(M: FieldMatrix, kernel: str = "auto") -> tuple[FieldMatrix, int, list[int]]:
    """Reduced row echelon form, rank and pivot columns.

    ``kernel`` may force ``"generic"`` (plain Gauss-Jordan), ``"packed"`` (F_2)
    or ``"bareiss"`` (Q); ``"auto"`` picks by field.
    """
    spec = M.spec
    if kernel == "auto":
        if spec.kind == "prime" and spec.p == 2:
            kernel = "packed"
        elif spec.kind == "rational":
            kernel = "bareiss"
        else:
            kernel = "generic"
    if M.nrows == 0 or M.ncols == 0:
        return FieldMatrix(spec, M.rows, M.ncols), 0, []
    if kernel == "packed":
        if not (spec.kind == "prime" and spec.p == 2):
            raise FieldError("packed kernel is F_2 only")
        A, rank, piv = rref_gf2_packed(pack_gf2(M.rows, M.ncols), M.ncols)
        return FieldMatrix(spec, unpack_gf2(A, M.ncols), M.ncols), rank, piv
    if kernel == "bareiss":
        if spec.kind != "rational":
            raise FieldError("fraction-free kernel is for Q")
        R, rank, piv = _rref_rational(M.rows)
        return FieldMatrix(spec, R, M.ncols), rank, piv
    R, rank, piv = _rref_generic(spec, M.rows)
    return FieldMatrix(spec, R, M.ncols), rank, piv


def rank(M: FieldMatrix) -> int:
    return rref(M)[1]


def nullspace(M: FieldMatrix) -> list[list]:
    """Basis of {x : M x = 0}, one raw vector per free column."""
    R, r, piv = rref(M)
    K = M.spec
    free = [c for c in range(M.ncols) if c not in set(piv)]
    basis = []
    for f in free:
        x = [K.zero] * M.ncols
        x[f] = K.one
        for i, c in enumerate(piv):
            x[c] = K.neg(R.rows[i][f])
        basis.append(x)
    return basis


@dataclass
class LinearSolution:
    feasible: bool
    x: list | None = None
    witness: list | None = None  # y with y^T M = 0 and y^T b != 0

    def __bool__(self):
        return self.feasible


def solve_linear(M: FieldMatrix, b: Sequence) -> LinearSolution:
    """One solution of ``M x = b`` with free variables zero, or a Fredholm witness."""
    K = M.spec
    if len(b) != M.nrows:
        raise ValueError("right-hand side has the wrong length")
    bb = [_raw(K, v) for v in b]
    m = M.nrows
    aug = [list(M.rows[i]) + [bb[i]] + [K.one if j == i else K.zero for j in range(m)] for i in range(m)]
    R, _, piv = rref(FieldMatrix(K, aug, M.ncols + 1 + m))
    nc = M.ncols
    for i, row in enumerate(R.rows):
        if all(v == 0 for v in row[:nc]) and row[nc] != 0:
            y = row[nc + 1:]
            return LinearSolution(False, witness=y)
    x = [K.zero] * nc
    for i, c in enumerate(piv):
        if c < nc:
            x[c] = R.rows[i][nc]
    return LinearSolution(True, x=x)


def check_witness(M: FieldMatrix, b: Sequence, y: Sequence) -> bool:
    K = M.spec
    yT_M = M.transpose().apply(y)
    yb = K.zero
    for yi, bi in zip(y, b):
        yb = K.add(yb, K.mul(yi, _raw(K, bi)))
    return all(v == 0 for v in yT_M) and yb != 0


# ---------------------------------------------------------------------------
# sparse echelon engine over monomial ids

def _is_f2(spec: FieldSpec) -> bool:
    return spec.kind == "prime" and spec.p == 2


class SparseEchelon:
    """Semi-reduced echelon form: pivot rows with distinct leading ids.

    Over F_2 rows are Python int bitsets (bit = monomial id).  Elsewhere rows are
    ``{id: raw}`` dicts with leading coefficient one.  With ``track=True`` each
    row carries a companion expressing it in terms of caller-chosen keys (for
    certificates); companions are int bitsets over key indices over F_2 and
    ``{key_index: raw}`` dicts otherwise.
    """

    def __init__(self, spec: FieldSpec, track: bool = False):
        self.spec = spec
        self.f2 = _is_f2(spec)
        self.track = track
        self.rows: dict[int, object] = {}
        self.comps: dict[int, object] = {}

    def __len__(self):
        return len(self.rows)

    def lead(self, row) -> int:
        if self.f2:
            return row.bit_length() - 1
        return max(row) if row else -1

    def reduce(self, row, comp=None):
        """Lead-reduce until the lead is free; returns (row, comp)."""
        rows = self.rows
        if self.f2:
            comps = self.comps
            while row:
                L = row.bit_length() - 1
                p = rows.get(L)
                if p is None:
                    break
                row ^= p
                if comp is not None:
                    comp ^= comps[L]
            return row, comp
        K = self.spec
        row = dict(row)
        comp = dict(comp) if comp is not None else None
        while row:
            L = max(row)
            p = rows.get(L)
            if p is None:
                break
            c = row[L]
            _axpy(K, row, K.neg(c), p)
            if comp is not None:
                _axpy(K, comp, K.neg(c), self.comps[L])
        return row, comp

    def insert(self, row, comp=None) -> int | None:
        """Insert a row; returns its new pivot id or ``None`` if it was dependent."""
        row, comp = self.reduce(row, comp)
        if not row:
            return None
        L = self.lead(row)
        if not self.f2:
            c = row[L]
            if c != self.spec.one:
                inv = self.spec.inv(c)
                mul = self.spec.mul
                row = {k: mul(v, inv) for k, v in row.items()}
                if comp is not None:
                    comp = {k: mul(v, inv) for k, v in comp.items()}
        self.rows[L] = row
        if self.track:
            self.comps[L] = comp
        return L

    def contains(self, row) -> bool:
        return not self.reduce(row)[0]

    def fully_reduced(self) -> tuple[dict, dict]:
        """Reduced row echelon form (every pivot column appears in one row only)."""
        leads = sorted(self.rows)
        red: dict[int, object] = {}
        rcomp: dict[int, object] = {}
        if self.f2:
            pivmask = 0
            for L in leads:
                pivmask |= 1 << L
            for L in leads:
                row = self.rows[L]
                comp = self.comps.get(L) if self.track else None
                x = (row & pivmask) ^ (1 << L)
                while x:
                    b = x.bit_length() - 1
                    row ^= red[b]
                    if comp is not None:
                        comp ^= rcomp[b]
                    x ^= 1 << b
                red[L] = row
                if comp is not None:
                    rcomp[L] = comp
            return red, rcomp
        K = self.spec
        pivset = set(leads)
        for L in leads:
            row = dict(self.rows[L])
            comp = dict(self.comps[L]) if self.track else None
            for b in sorted((k for k in row if k in pivset and k != L), reverse=True):
                c = row.get(b)
                if c:
                    _axpy(K, row, K.neg(c), red[b])
                    if comp is not None:
                        _axpy(K, comp, K.neg(c), rcomp[b])
            red[L] = row
            if comp is not None:
                rcomp[L] = comp
        return red, rcomp


def _axpy(K: FieldSpec, target: dict, a, src: dict):
    """target += a * src in place, dropping zeros."""
    add, mul = K.add, K.mul
    for k, v in src.items():
        w = mul(a, v)
        if k in target:
            w = add(target[k], w)
            if w == 0:
                del target[k]
            else:
                target[k] = w
        elif w != 0:
            target[k] = w


def row_from_poly(f: Polynomial, codec: MonomialCodec, f2: bool):
    if f2:
        r = 0
        for m in f.terms:
            r |= 1 << codec.id(m)
        return r
    return {codec.id(m): c for m, c in f.terms.items()}


def poly_from_row(row, spec: FieldSpec, codec: MonomialCodec, f2: bool) -> Polynomial:
    terms = {}
    if f2:
        x = row
        while x:
            b = x.bit_length() - 1
            terms[codec.monomial(b)] = 1
            x ^= 1 << b
    else:
        for k, v in row.items():
            terms[codec.monomial(k)] = v
    return Polynomial(spec, codec.n, terms, _trusted=True)


def row_ids(row, f2: bool) -> list[int]:
    """Column ids of a row in descending order."""
    if f2:
        out = []
        x = row
        while x:
            b = x.bit_length() - 1
            out.append(b)
            x ^= 1 << b
        return out
    return sorted(row, reverse=True)


def shift_row(row, k: int, codec: MonomialCodec, f2: bool):
    """Multiply a row by the variable x_k."""
    mul = codec.mul
    if f2:
        out = 0
        x = row
        while x:
            b = x.bit_length() - 1
            out |= 1 << mul(b, k)
            x ^= 1 << b
        return out
    return {mul(i, k): v for i, v in row.items()}


_CODECS: dict[int, MonomialCodec] = {}


def codec_for(n: int) -> MonomialCodec:
    c = _CODECS.get(n)
    if c is None:
        c = _CODECS[n] = MonomialCodec(n)
    return c


class PolySpace:
    """A finite-dimensional space of polynomials of degree <= ``degree``.

    The basis is kept in reduced row echelon form over graded-grevlex monomial
    columns; ``basis`` lists it by decreasing leading monomial.
    """

    def __init__(self, spec: FieldSpec, n: int, degree: int, rows: dict):
        self.spec = spec
        self.n = n
        self.degree = degree
        self.f2 = _is_f2(spec)
        self.codec = codec_for(n)
        self._rows = rows  # lead id -> fully reduced row

    @classmethod
    def from_echelon(cls, ech: SparseEchelon, n: int, degree: int, max_lead: int | None = None) -> "PolySpace":
        """Span of the pivot rows of ``ech`` whose lead id is below ``max_lead``."""
        sub = SparseEchelon(ech.spec)
        sub.rows = {L: r for L, r in ech.rows.items() if max_lead is None or L < max_lead}
        red, _ = sub.fully_reduced()
        return cls(ech.spec, n, degree, red)

    @property
    def dim(self) -> int:
        return len(self._rows)

    def lead_ids(self) -> list[int]:
        return sorted(self._rows, reverse=True)

    @property
    def leading_monomials(self) -> list[tuple[int, ...]]:
        return [self.codec.monomial(L) for L in self.lead_ids()]

    @property
    def basis(self) -> list[Polynomial]:
        return [poly_from_row(self._rows[L], self.spec, self.codec, self.f2) for L in self.lead_ids()]

    def rows(self) -> dict:
        return self._rows

    def echelon(self) -> SparseEchelon:
        e = SparseEchelon(self.spec)
        e.rows = dict(self._rows)
        return e

    def contains(self, f: Polynomial) -> tuple[bool, list[FieldElement] | None]:
        """Membership; on success the coefficients on ``basis`` (in its order)."""
        _check_poly(self, f)
        if f.degree > self.degree:
            return False, None
        row = row_from_poly(f, self.codec, self.f2)
        K = self.spec
        coeffs = []
        if self.f2:
            for L in self.lead_ids():
                bit = (row >> L) & 1
                coeffs.append(bit)
                if bit:
                    row ^= self._rows[L]
            ok = row == 0
        else:
            row = dict(row)
            for L in self.lead_ids():
                c = row.get(L, K.zero)
                coeffs.append(c)
                if c != 0:
                    _axpy(K, row, K.neg(c), self._rows[L])
            ok = not row
        if not ok:
            return False, None
        return True, [FieldElement(K, c) for c in coeffs]

    def __contains__(self, f: Polynomial) -> bool:
        return self.contains(f)[0]

    def contains_one(self) -> bool:
        return 0 in self._rows

    def intersect_with_degree(self, d: int) -> "PolySpace":
        if d > self.degree:
            raise ValueError(f"degree {d} exceeds the space's bound {self.degree}")
        bound = comb(self.n + d, d) if d >= 0 else 0
        return PolySpace(self.spec, self.n, d, {L: r for L, r in self._rows.items() if L < bound})

    def dim_up_to(self, d: int) -> int:
        """dim(S ∩ R_d), read off leading degrees (graded echelon property)."""
        bound = comb(self.n + d, d) if d >= 0 else 0
        return sum(1 for L in self._rows if L < bound)

    def codim_at(self, d: int) -> int:
        return comb(self.n + d, d) - self.dim_up_to(d)

    def expand_once(self) -> "PolySpace":
        ech = self.echelon()
        for row in list(self._rows.values()):
            for k in range(self.n):
                ech.insert(shift_row(row, k, self.codec, self.f2))
        red, _ = ech.fully_reduced()
        return PolySpace(self.spec, self.n, self.degree + 1, red)

    def standard_monomial_ids(self, d: int | None = None) -> list[int]:
        """Ids of degree <= d that are not leading monomials, ascending."""
        d = self.degree if d is None else d
        bound = comb(self.n + d, d)
        return [i for i in range(bound) if i not in self._rows]

    def __eq__(self, other):
        return (isinstance(other, PolySpace) and self.spec == other.spec and self.n == other.n
                and self._rows == other._rows)

    def __repr__(self):
        return f"PolySpace({self.spec}, n={self.n}, degree<={self.degree}, dim={self.dim})"


def _check_poly(S: PolySpace, f: Polynomial):
    if f.spec != S.spec:
        raise FieldError(f"mismatched fields {f.spec} and {S.spec}")
    if f.n != S.n:
        raise ValueError("arity mismatch")


def space_from(polys: Iterable[Polynomial], spec: FieldSpec | None = None, n: int | None = None,
               degree: int | None = None) -> PolySpace:
    """Row-reduced basis of the K-linear span of ``polys``."""
    polys = list(polys)
    if polys:
        spec = spec or polys[0].spec
        n = n or polys[0].n
    if spec is None or n is None:
        raise ValueError("an empty span needs an explicit field and arity")
    for f in polys:
        if f.spec != spec:
            raise FieldError("mixed fields in span")
        if f.n != n:
            raise ValueError("mixed arities in span")
    codec = codec_for(n)
    f2 = _is_f2(spec)
    ech = SparseEchelon(spec)
    for f in polys:
        if not f.is_zero():
            ech.insert(row_from_poly(f, codec, f2))
    d = max((f.degree for f in polys), default=0) if degree is None else degree
    red, _ = ech.fully_reduced()
    return PolySpace(spec, n, max(d, 0), red)


def space_contains(S: PolySpace, f: Polynomial):
    return S.contains(f)


def intersect_with_degree(S: PolySpace, d: int) -> PolySpace:
    return S.intersect_with_degree(d)
