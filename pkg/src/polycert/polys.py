"""Sparse multivariate polynomials over a :class:`~polycert.fields.FieldSpec`.

Terms are stored as ``{exponent tuple: raw coefficient}`` with zeros purged.
The global monomial order is graded reverse lexicographic.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Mapping, Sequence

from .fields import Embedding, FieldElement, FieldError, FieldSpec

ORDER_NAME = "grevlex"

Monomial = tuple[int, ...]


def grevlex_key(m: Monomial):
    """Sort key: ascending key means ascending graded grevlex order."""
    return (sum(m), tuple(-e for e in reversed(m)))


def monomials_of_degree(n: int, e: int) -> list[Monomial]:
    out = []
    for combo in combinations_with_replacement(range(n), e):
        m = [0] * n
        for v in combo:
            m[v] += 1
        out.append(tuple(m))
    out.sort(key=grevlex_key)
    return out


def monomials_up_to(n: int, d: int) -> list[Monomial]:
    """All monomials of total degree <= d, ascending in graded grevlex."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    out: list[Monomial] = []
    for e in range(d + 1):
        out.extend(monomials_of_degree(n, e))
    return out


def monomial_id(m: Sequence[int]) -> int:
    """Position of ``m`` in the infinite ascending graded-grevlex sequence.

    Ids below ``comb(n + d, d)`` are exactly the monomials of degree <= d, so the
    ids are stable when the degree bound grows.
    """
    n = len(m)
    e = sum(m)
    idx = comb(n + e - 1, n) if e else 0
    # Rank within degree e counts the smaller monomials: those agreeing with m on
    # every position after i and carrying a larger exponent at position i.
    rank = 0
    rem = e
    for i in range(n - 1, 0, -1):
        a = m[i]
        t = rem - a - 1
        if t >= 0:
            rank += comb(t + i, i)
        rem -= a
    return idx + rank


class Polynomial:
    """Immutable sparse polynomial in ``n`` variables."""

    __slots__ = ("spec", "n", "terms", "_hash")

    def __init__(self, spec: FieldSpec, n: int, terms: Mapping[Monomial, object] | None = None, *, _trusted=False):
        self.spec = spec
        self.n = n
        if _trusted:
            self.terms = terms
        else:
            clean = {}
            for m, c in (terms or {}).items():
                m = tuple(int(e) for e in m)
                if len(m) != n or min(m, default=0) < 0:
                    raise ValueError(f"bad monomial {m} for {n} variables")
                if isinstance(c, FieldElement):
                    if c.spec != spec:
                        raise FieldError("coefficient from a different field")
                    c = c.raw
                elif isinstance(c, (int, Fraction)) and spec.kind != "extension":
                    c = spec.from_fraction(Fraction(c))
                if c != 0:
                    clean[m] = c
            self.terms = clean
        self._hash = None

    # -- constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, spec: FieldSpec, n: int) -> "Polynomial":
        return cls(spec, n, {}, _trusted=True)

    @classmethod
    def constant(cls, spec: FieldSpec, n: int, c=1) -> "Polynomial":
        raw = c.raw if isinstance(c, FieldElement) else spec.from_fraction(Fraction(c))
        return cls(spec, n, {(0,) * n: raw} if raw != 0 else {}, _trusted=True)

    @classmethod
    def variable(cls, spec: FieldSpec, n: int, i: int) -> "Polynomial":
        m = [0] * n
        m[i] = 1
        return cls(spec, n, {tuple(m): spec.one}, _trusted=True)

    @classmethod
    def monomial(cls, spec: FieldSpec, m: Sequence[int], c=None) -> "Polynomial":
        raw = spec.one if c is None else (c.raw if isinstance(c, FieldElement) else spec.from_fraction(Fraction(c)))
        return cls(spec, len(m), {tuple(m): raw} if raw != 0 else {}, _trusted=True)

    # -- basic queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=grevlex_key, reverse=True)

    def leading_monomial(self) -> Monomial | None:
        return max(self.terms, key=grevlex_key) if self.terms else None

    def coeff(self, m: Sequence[int]) -> FieldElement:
        return FieldElement(self.spec, self.terms.get(tuple(m), self.spec.zero))

    def constant_term(self) -> FieldElement:
        return self.coeff((0,) * self.n)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.spec == other.spec and self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.spec, self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec, self.n, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic ---------------------------------------------------------------
    def _compatible(self, other: "Polynomial"):
        if not isinstance(other, Polynomial):
            raise TypeError("expected a Polynomial")
        if other.spec != self.spec:
            raise FieldError(f"mismatched fields {self.spec} and {other.spec}")
        if other.n != self.n:
            raise ValueError(f"arity mismatch: {self.n} vs {other.n} variables")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction, FieldElement)):
            return Polynomial.constant(self.spec, self.n, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        self._compatible(other)
        add = self.spec.add
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = add(out[m], c) if m in out else c
            if v == 0:
                out.pop(m, None)
            else:
                out[m] = v
        return Polynomial(self.spec, self.n, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        neg = self.spec.neg
        return Polynomial(self.spec, self.n, {m: neg(c) for m, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._compatible(other)
        add, mul = self.spec.add, self.spec.mul
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = mul(c1, c2)
                if m in out:
                    v = add(out[m], v)
                if v == 0:
                    out.pop(m, None)
                else:
                    out[m] = v
        return Polynomial(self.spec, self.n, out, _trusted=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.spec, self.n, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, c) -> "Polynomial":
        if isinstance(c, FieldElement):
            if c.spec != self.spec:
                raise FieldError("scalar from a different field")
            raw = c.raw
        else:
            raw = self.spec.from_fraction(Fraction(c))
        if raw == 0:
            return Polynomial.zero(self.spec, self.n)
        mul = self.spec.mul
        return Polynomial(self.spec, self.n, {m: mul(v, raw) for m, v in self.terms.items()}, _trusted=True)

    def shift(self, m: Sequence[int]) -> "Polynomial":
        """Multiply by the monomial ``x^m``."""
        return Polynomial(
            self.spec, self.n,
            {tuple(a + b for a, b in zip(k, m)): c for k, c in self.terms.items()}, _trusted=True,
        )

    def evaluate(self, point: Sequence) -> FieldElement:
        return evaluate(self, point)

    def to_json(self) -> list[dict]:
        return [{"coeff": self.spec.format(self.terms[m]), "monomial": list(m)} for m in self.monomials()]

    @classmethod
    def from_json(cls, spec: FieldSpec, n: int, terms: Iterable[dict]) -> "Polynomial":
        acc: dict = {}
        for t in terms:
            m = tuple(int(e) for e in t["monomial"])
            if len(m) != n:
                raise ValueError(f"monomial {m} does not have {n} entries")
            c = spec.parse_elem(t["coeff"])
            acc[m] = spec.add(acc[m], c) if m in acc else c
        return cls(spec, n, acc)

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.n)]
        parts = []
        for m in self.monomials():
            c = self.terms[m]
            factors = []
            for v, e in enumerate(m):
                if e == 1:
                    factors.append(names[v])
                elif e > 1:
                    factors.append(f"{names[v]}^{e}")
            mono = "*".join(factors)
            cs = self.spec.format(c)
            if not mono:
                parts.append(cs)
            elif c == self.spec.one:
                parts.append(mono)
            elif self.spec.kind != "extension" and c == self.spec.neg(self.spec.one) and self.spec.p != 2:
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Polynomial({self.spec}, {self.format()!r})"


def poly_arith(f: Polynomial, g, op: str) -> Polynomial:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "scale":
        return f.scale(g)
    raise ValueError(f"unknown op {op!r}")


def multiply_by_variable(f: Polynomial, i: int) -> Polynomial:
    if not 0 <= i < f.n:
        raise IndexError(f"variable index {i} out of range for {f.n} variables")
    out = {}
    for m, c in f.terms.items():
        m2 = list(m)
        m2[i] += 1
        out[tuple(m2)] = c
    return Polynomial(f.spec, f.n, out, _trusted=True)


def evaluate(f: Polynomial, point: Sequence) -> FieldElement:
    """Exact value of ``f`` at ``point``.

    Point coordinates may live in an extension of ``f``'s field; the coefficients
    are then mapped through the canonical embedding first.
    """
    if len(point) != f.n:
        raise ValueError(f"point has {len(point)} coordinates, expected {f.n}")
    coords = [p if isinstance(p, FieldElement) else f.spec(p) for p in point]
    target = coords[0].spec if coords else f.spec
    for c in coords:
        if c.spec != target:
            raise FieldError("point coordinates from different fields")
    emb = None
    if target != f.spec:
        from .fields import embedding

        emb = embedding(f.spec, target)
    K = target
    raws = [c.raw for c in coords]
    powers: list[dict] = [dict() for _ in raws]
    total = K.zero
    for m, c in f.terms.items():
        v = emb(c) if emb is not None else c
        for i, e in enumerate(m):
            if e:
                pw = powers[i].get(e)
                if pw is None:
                    pw = K.pow(raws[i], e)
                    powers[i][e] = pw
                v = K.mul(v, pw)
        total = K.add(total, v)
    return FieldElement(K, total)


def embed_poly(f: Polynomial, emb: Embedding) -> Polynomial:
    return Polynomial(emb.dst, f.n, {m: emb(c) for m, c in f.terms.items()}, _trusted=True)


# ---------------------------------------------------------------------------
# a small infix parser, handy for tests and hand-written systems

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|\^|[-+*()]))")


def parse_poly(text: str, spec: FieldSpec, names: Sequence[str]) -> Polynomial:
    """Parse expressions like ``2*x1*x2 + x3 - 1`` or ``(x+y)^2``."""
    index = {name: i for i, name in enumerate(names)}
    n = len(names)
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ValueError(f"cannot parse {text[pos:]!r}")
        pos = mt.end()
        num, name, op = mt.groups()
        tokens.append(("num", num) if num else ("name", name) if name else ("op", "^" if op == "**" else op))
    tokens.append(("end", None))
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        acc = term() * sign
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        acc = power()
        while peek() == ("op", "*") or peek()[0] in ("num", "name") or peek() == ("op", "("):
            if peek() == ("op", "*"):
                take()
            acc = acc * power()
        return acc

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, val = take()
            if kind != "num" or "/" in val:
                raise ValueError("exponent must be a non-negative integer")
            base = base ** int(val)
        return base

    def atom():
        kind, val = take()
        if kind == "num":
            return Polynomial.constant(spec, n, spec.parse_elem(val) if spec.kind != "extension" else spec.from_fraction(Fraction(val)))
        if kind == "name":
            if val not in index:
                raise ValueError(f"unknown variable {val!r}")
            return Polynomial.variable(spec, n, index[val])
        if val == "(":
            e = expr()
            if take() != ("op", ")"):
                raise ValueError("unbalanced parentheses")
            return e
        if val == "-":
            return -atom()
        raise ValueError(f"unexpected token {val!r}")

    result = expr()
    if peek()[0] != "end":
        raise ValueError(f"trailing input in {text!r}")
    return result
