"""Dense numbering of monomials in graded grevlex order, with multiplication tables.

Monomial ids are positions in the ascending graded-grevlex sequence, so id 0 is
the constant monomial, the leading term of a row is its largest id, and the ids
below ``comb(n + d, d)`` are exactly the monomials of degree <= d.  Ids do not
depend on the degree bound, which lets spaces grow without renumbering.
"""

from __future__ import annotations

import functools
from itertools import combinations_with_replacement
from math import comb

import numpy as np


def count_up_to(n: int, d: int) -> int:
    return comb(n + d, d) if d >= 0 else 0


class MonomialIndex:
    def __init__(self, n: int, D: int):
        self.n = n
        self.D = D
        self.size = count_up_to(n, D)
        # binom[a, b] = C(a, b), large enough for the rank formula
        top = n + D + 1
        self._binom = np.zeros((top + 1, n + 1), dtype=np.int64)
        for a in range(top + 1):
            for b in range(min(a, n) + 1):
                self._binom[a, b] = comb(a, b)
        exps = np.zeros((self.size, n), dtype=np.int16)
        for e in range(1, D + 1):
            block = np.array(list(combinations_with_replacement(range(n), e)), dtype=np.int64).reshape(-1, e)
            ex = np.zeros((len(block), n), dtype=np.int16)
            rows = np.repeat(np.arange(len(block)), e)
            np.add.at(ex, (rows, block.ravel()), 1)
            ids = self.ids_of(ex)
            exps[ids] = ex
        self.exps = exps
        self.degrees = exps.sum(axis=1).astype(np.int64)
        self._mul = None

    def ids_of(self, exps: np.ndarray) -> np.ndarray:
        """Vectorized id of each row of an integer exponent array."""
        exps = np.asarray(exps, dtype=np.int64)
        if exps.ndim == 1:
            exps = exps[None, :]
        n = self.n
        e = exps.sum(axis=1)
        ids = np.where(e > 0, self._offsets(e), 0)
        rem = e.copy()
        for i in range(n - 1, 0, -1):
            a = exps[:, i]
            t = rem - a - 1
            ok = t >= 0
            ids = ids + np.where(ok, self._binom[np.where(ok, t + i, 0), i], 0)
            rem = rem - a
        return ids

    def _offsets(self, e: np.ndarray) -> np.ndarray:
        # number of monomials of degree < e, i.e. C(n + e - 1, n)
        return self._binom[np.maximum(self.n + e - 1, 0), self.n]

    def id(self, m) -> int:
        return int(self.ids_of(np.asarray(m, dtype=np.int64))[0])

    def monomial(self, i: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.exps[i])

    def bound(self, d: int) -> int:
        """Number of monomials of degree <= d (ids below this have degree <= d)."""
        return count_up_to(self.n, d)

    @property
    def mul(self) -> np.ndarray:
        """``mul[i, k]`` is the id of ``x_k * m_i`` for every id of degree <= D - 1."""
        if self._mul is None:
            low = self.bound(self.D - 1)
            table = np.zeros((low, self.n), dtype=np.int32)
            base = self.exps[:low].astype(np.int64)
            for k in range(self.n):
                base[:, k] += 1
                table[:, k] = self.ids_of(base)
                base[:, k] -= 1
            self._mul = table
        return self._mul


@functools.lru_cache(maxsize=16)
def monomial_index(n: int, D: int) -> MonomialIndex:
    return MonomialIndex(n, D)


class MonomialCodec:
    """Lazy id <-> exponent-tuple conversion for one variable count, any degree."""

    def __init__(self, n: int):
        from .polys import monomial_id

        self.n = n
        self._id_of = monomial_id
        self._ids: dict = {}
        self._tuples: dict = {}
        self._mul: dict = {}

    def id(self, m) -> int:
        m = tuple(m)
        i = self._ids.get(m)
        if i is None:
            i = self._id_of(m)
            self._ids[m] = i
            self._tuples[i] = m
        return i

    def monomial(self, i: int) -> tuple[int, ...]:
        m = self._tuples.get(i)
        if m is None:
            m = _unrank(self.n, i)
            self._tuples[i] = m
            self._ids[m] = i
        return m

    def degree(self, i: int) -> int:
        return sum(self.monomial(i))

    def mul(self, i: int, k: int) -> int:
        key = (i, k)
        j = self._mul.get(key)
        if j is None:
            m = list(self.monomial(i))
            m[k] += 1
            j = self.id(m)
            self._mul[key] = j
        return j

    def mul_monomial(self, i: int, m) -> int:
        a = self.monomial(i)
        return self.id(tuple(x + y for x, y in zip(a, m)))


def _unrank(n: int, i: int) -> tuple[int, ...]:
    """Inverse of the id map (walks the rank formula from the last variable down)."""
    e = 0
    while count_up_to(n, e) <= i:
        e += 1
    rank = i - (comb(n + e - 1, n) if e else 0)
    m = [0] * n
    rem = e
    for pos in range(n - 1, 0, -1):
        # smallest exponent whose count of smaller monomials fits under the rank
        a = 0
        while True:
            t = rem - a - 1
            below = comb(t + pos, pos) if t >= 0 else 0
            if below <= rank:
                break
            a += 1
        rank -= below
        m[pos] = a
        rem -= a
    m[0] = rem
    return tuple(m)
