"""Compiled sparse elimination over F_2 for decision-only runs.

Rows are int32 arrays of monomial ids sorted in decreasing order and stored
back to back in one arena.  ``pivot_of[c]`` is the row whose leading id is
``c`` (or -1).  A new row is reduced in a dense bitmap against every pivot it
meets on one downward sweep, so stored rows hold no column that was a pivot
when they were inserted.  That keeps later reduction chains short.

The closure routine computes ``F = F+ ∩ R_d`` as a worklist: every stored row
with lead degree <= d is multiplied by each variable once; products that reduce
to a new pivot of degree <= d are queued in turn, those of degree d + 1 are kept
as F+ rows.  At the fixed point F is the span of the low pivots.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .monindex import count_up_to, monomial_index

OK = 0
ONE_FOUND = 1
NEED_SPACE = 2


@njit(cache=True)
def _top_bit(w):
    """Index of the highest set bit of a nonzero uint64."""
    r = 0
    if w >> np.uint64(32):
        w >>= np.uint64(32)
        r += 32
    if w >> np.uint64(16):
        w >>= np.uint64(16)
        r += 16
    if w >> np.uint64(8):
        w >>= np.uint64(8)
        r += 8
    if w >> np.uint64(4):
        w >>= np.uint64(4)
        r += 4
    if w >> np.uint64(2):
        w >>= np.uint64(2)
        r += 2
    if w >> np.uint64(1):
        r += 1
    return r


@njit(cache=True)
def _insert(buf, acc, length, data, rstart, rlen, pivot_of, st):
    """Fully reduce ``buf[:length]`` (decreasing ids); store it if nonzero.

    The working row lives in the dense bitmap ``acc`` (all zero on entry and on
    exit).  Terms are visited from the top down; a term that is a current pivot
    is cancelled by XOR-ing that pivot's row, which only touches smaller ids, so
    one downward sweep suffices.  The stored row therefore has no term that was
    a pivot at insertion time.  Returns the new row index or -1.
    ``st[3]`` counts rows, ``st[4]`` is the used arena length.
    """
    one = np.uint64(1)
    for t in range(length):
        c = buf[t]
        acc[c >> 6] ^= one << np.uint64(c & 63)
    count = length
    kept = 0
    pos = st[4]
    w = buf[0] >> 6 if length > 0 else -1
    # mask selects the bits of word w still to be visited
    mask = ~np.uint64(0)
    while kept < count:
        word = acc[w] & mask
        if word == 0:
            w -= 1
            mask = ~np.uint64(0)
            continue
        b = _top_bit(word)
        c = (w << 6) + b
        r = pivot_of[c]
        if r >= 0:
            s = rstart[r]
            for t in range(rlen[r]):
                x = data[s + t]
                q = x >> 6
                bit = one << np.uint64(x & 63)
                if acc[q] & bit:
                    count -= 1
                else:
                    count += 1
                acc[q] ^= bit
        else:
            data[pos + kept] = c
            kept += 1
            acc[w] ^= one << np.uint64(b)
        # continue strictly below c
        if b == 0:
            w -= 1
            mask = ~np.uint64(0)
        else:
            mask = (one << np.uint64(b)) - one
    if kept == 0:
        return -1
    # the kept bits were cleared as they were copied out, so acc is zero again
    nr = st[3]
    rstart[nr] = pos
    rlen[nr] = kept
    pivot_of[data[pos]] = nr
    st[3] = nr + 1
    st[4] = pos + kept
    return nr


@njit(cache=True)
def _close(data, rstart, rlen, pivot_of, queue, mul, n, low_bound, st, buf, acc):
    """Run the worklist until empty, until 1 appears, or until space runs out.

    ``st`` = [head, tail, next variable, rows, arena used, capacity rows].
    """
    cap_data = data.shape[0]
    slack = buf.shape[0]
    while st[0] < st[1]:
        r = queue[st[0]]
        k = st[2]
        while k < n:
            if st[4] + slack > cap_data or st[3] + 1 > st[5]:
                st[2] = k
                return NEED_SPACE
            s = rstart[r]
            L = rlen[r]
            for t in range(L):
                buf[t] = mul[data[s + t], k]
            nr = _insert(buf, acc, L, data, rstart, rlen, pivot_of, st)
            if nr >= 0:
                lead = data[rstart[nr]]
                if lead == 0:
                    st[2] = k + 1
                    return ONE_FOUND
                if lead < low_bound:
                    queue[st[1]] = nr
                    st[1] += 1
            k += 1
        st[2] = 0
        st[0] += 1
    return OK


@njit(cache=True)
def _insert_many(rows_data, rows_ptr, data, rstart, rlen, pivot_of, st, buf, acc, queue, low_bound):
    """Insert CSR rows starting at ``st[2]``; queue new low pivots.

    Returns ONE_FOUND as soon as 1 enters the span, NEED_SPACE (with ``st[2]``
    at the next row) when the arena is short, OK when all rows are in.
    """
    cap_data = data.shape[0]
    slack = buf.shape[0]
    i = st[2]
    while i < rows_ptr.shape[0] - 1:
        if st[4] + slack > cap_data or st[3] + 1 > st[5]:
            st[2] = i
            return NEED_SPACE
        a = rows_ptr[i]
        L = rows_ptr[i + 1] - a
        for t in range(L):
            buf[t] = rows_data[a + t]
        nr = _insert(buf, acc, L, data, rstart, rlen, pivot_of, st)
        i += 1
        if nr >= 0:
            lead = data[rstart[nr]]
            if lead == 0:
                st[2] = i
                return ONE_FOUND
            if lead < low_bound:
                queue[st[1]] = nr
                st[1] += 1
    st[2] = 0
    return OK


class GF2Span:
    """Growable arena of F_2 pivot rows over the monomials of degree <= max_degree + 1."""

    def __init__(self, n: int, max_degree: int, capacity: int = 1 << 20):
        self.n = n
        self.max_degree = max_degree
        self.index = monomial_index(n, max_degree + 1)
        self.ncols = self.index.size
        self.mul = self.index.mul
        self.data = np.zeros(capacity, dtype=np.int32)
        self.rcap = 1 << 16
        self.rstart = np.zeros(self.rcap, dtype=np.int64)
        self.rlen = np.zeros(self.rcap, dtype=np.int32)
        self.pivot_of = np.full(self.ncols, -1, dtype=np.int32)
        self.queue = np.zeros(self.ncols + 1, dtype=np.int32)
        self.buf = np.zeros(self.ncols + 1, dtype=np.int32)
        self.acc = np.zeros(self.ncols // 64 + 1, dtype=np.uint64)
        # head, tail, resume position, rows, arena used, row capacity
        self.st = np.zeros(6, dtype=np.int64)
        self.st[5] = self.rcap
        self.d = None

    def _grow(self):
        if self.st[4] + self.buf.shape[0] > self.data.shape[0]:
            self.data = np.concatenate([self.data, np.zeros(self.data.shape[0], dtype=np.int32)])
        if self.st[3] + 1 > self.rcap:
            self.rstart = np.concatenate([self.rstart, np.zeros(self.rcap, dtype=np.int64)])
            self.rlen = np.concatenate([self.rlen, np.zeros(self.rcap, dtype=np.int32)])
            self.rcap *= 2
            self.st[5] = self.rcap

    def insert_rows(self, flat: np.ndarray, ptr: np.ndarray, low_bound: int) -> bool:
        """Insert CSR rows (decreasing ids); True if 1 entered the span."""
        self.st[2] = 0
        while True:
            code = _insert_many(flat, ptr, self.data, self.rstart, self.rlen, self.pivot_of, self.st,
                                self.buf, self.acc, self.queue, low_bound)
            if code == NEED_SPACE:
                self._grow()
                continue
            self.st[2] = 0
            return code == ONE_FOUND

    def insert_generators(self, rows: list[np.ndarray], d: int) -> bool:
        """Insert generator rows at degree bound d, queueing them for expansion."""
        self.d = d
        flat, ptr = to_csr(rows)
        return self.insert_rows(flat, ptr, count_up_to(self.n, d))

    def close(self) -> bool:
        """Fixed point of F := F+ ∩ R_d.  Returns True if 1 entered the span."""
        low = count_up_to(self.n, self.d)
        while True:
            code = _close(self.data, self.rstart, self.rlen, self.pivot_of, self.queue, self.mul,
                          self.n, low, self.st, self.buf, self.acc)
            if code == NEED_SPACE:
                self._grow()
                continue
            return code == ONE_FOUND

    def raise_degree(self):
        """F := F+ and d := d + 1: the former degree d+1 rows join the worklist."""
        if self.d + 1 > self.max_degree:
            raise ValueError("degree bound exceeded")
        lo = count_up_to(self.n, self.d)
        hi = count_up_to(self.n, self.d + 1)
        rows = self.pivot_of[lo:hi]
        rows = np.sort(rows[rows >= 0])
        t = int(self.st[1])
        self.queue[t:t + len(rows)] = rows
        self.st[1] = t + len(rows)
        self.d += 1

    def dim_up_to(self, d: int) -> int:
        return int(np.count_nonzero(self.pivot_of[:count_up_to(self.n, d)] >= 0))

    def codim_at(self, d: int) -> int:
        return count_up_to(self.n, d) - self.dim_up_to(d)

    @property
    def row_count(self) -> int:
        return int(self.st[3])

    def rows_below(self, bound: int) -> list[list[int]]:
        """Pivot rows with lead id < bound as decreasing id lists."""
        out = []
        for lead in range(min(bound, self.ncols)):
            r = self.pivot_of[lead]
            if r >= 0:
                s = self.rstart[r]
                out.append(self.data[s:s + self.rlen[r]].tolist())
        return out


def to_csr(rows: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(rows) + 1, dtype=np.int64)
    for i, r in enumerate(rows):
        ptr[i + 1] = ptr[i] + len(r)
    flat = np.concatenate(rows).astype(np.int32) if rows else np.zeros(0, dtype=np.int32)
    return flat, ptr


def system_rows(sys) -> list[np.ndarray]:
    """Generators of an F_2 system as decreasing id arrays."""
    from .polys import monomial_id

    rows = []
    for g in sys.generators:
        ids = sorted((monomial_id(m) for m in g.terms), reverse=True)
        rows.append(np.array(ids, dtype=np.int32))
    return rows


def fpnulla_decide(sys, D: int | None = None):
    """Alg. 2 over F_2 without certificates.

    Returns ``(status, passes, count)`` with status in INFEASIBLE, COUNTED,
    BOUND_REACHED; ``passes`` is the number of outer iterations performed.
    """
    d0 = sys.degree
    if D is None:
        D = d0 + 6
    if D < d0:
        raise ValueError("degree bound below the system degree")
    span = GF2Span(sys.n, D)
    passes = 1
    if span.insert_generators(system_rows(sys), d0):
        return "INFEASIBLE", passes, None
    while True:
        if span.close():
            return "INFEASIBLE", passes, None
        d = span.d
        c_d, c_prev = span.codim_at(d), span.codim_at(d - 1)
        if c_d == c_prev:
            return "COUNTED", passes, c_d
        if d + 1 > D:
            return "BOUND_REACHED", passes, None
        span.raise_degree()
        passes += 1


def nulla_degree1_decide(sys) -> int | None:
    """NulLA degree when it is 0 or 1 (F_2, no certificate), else None."""
    d0 = sys.degree
    span = GF2Span(sys.n, d0, capacity=1 << 18)
    rows = system_rows(sys)
    if span.insert_rows(*to_csr(rows), 0):
        return 0
    mul = span.mul
    shifted = [mul[r, k] for r in rows for k in range(sys.n)]
    if span.insert_rows(*to_csr(shifted), 0):
        return 1
    return None
