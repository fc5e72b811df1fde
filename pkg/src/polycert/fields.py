"""Exact coefficient fields: prime fields, extensions GF(p^k), and the rationals.

Elements are handled in two layers.  Hot loops (polynomial arithmetic, elimination)
work on *raw* values through the methods of :class:`FieldSpec`:

* prime field  -> ``int`` in ``[0, p)``
* extension    -> ``int`` packing the coordinate vector base ``p``
                  (coefficient of ``t**i`` is digit ``i``)
* rational     -> :class:`fractions.Fraction`

:class:`FieldElement` wraps a raw value together with its field for the public API.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

DEFAULT_ENUM_CAP = 2**20
_TABLE_CAP = 2**16


class FieldError(ValueError):
    pass


def is_prime(p: int) -> bool:
    """Trial division up to 2**16, then Miller-Rabin with fixed bases."""
    if p < 2:
        return False
    small = min(p - 1, 2**16)
    d = 2
    while d <= small and d * d <= p:
        if p % d == 0:
            return False
        d += 1
    if d * d > p:
        return True
    s, r = p - 1, 0
    while s % 2 == 0:
        s //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, s, p)
        if x in (1, p - 1):
            continue
        for _ in range(r - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# dense univariate polynomials over F_p, coefficient lists low degree first

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo the monic polynomial ``m``."""
    a = _trim([c % p for c in a])
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = a[-1]
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _divides(m: Sequence[int], f: Sequence[int], p: int) -> bool:
    return not _pmod(list(f), m, p)


def _monic_polys(p: int, deg: int) -> Iterator[list[int]]:
    """Monic polynomials of degree ``deg`` in increasing packed order."""
    for code in range(p**deg):
        coeffs = []
        c = code
        for _ in range(deg):
            coeffs.append(c % p)
            c //= p
        yield coeffs + [1]


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    k = len(f) - 1
    if k < 1 or f[-1] % p != 1:
        return False
    for d in range(1, k // 2 + 1):
        for g in _monic_polys(p, d):
            if _divides(g, f, p):
                return False
    return True


@functools.lru_cache(maxsize=None)
def lex_least_irreducible(p: int, k: int) -> tuple[int, ...]:
    for f in _monic_polys(p, k):
        if is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {k} over F_{p}")  # pragma: no cover


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """A coefficient field.  Build with :meth:`prime`, :meth:`gf`, :meth:`rational`."""

    kind: str
    p: int | None = None
    k: int = 1
    modulus: tuple[int, ...] | None = None
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.kind == "rational":
            if self.p is not None or self.modulus is not None:
                raise FieldError("rational field takes no characteristic")
            return
        if self.kind not in ("prime", "extension"):
            raise FieldError(f"unknown field kind {self.kind!r}")
        if self.p is None or not is_prime(self.p):
            raise FieldError(f"characteristic {self.p} is not prime")
        if self.kind == "prime":
            if self.k != 1 or self.modulus is not None:
                raise FieldError("prime field has k = 1 and no modulus")
            return
        if self.modulus is None or len(self.modulus) != self.k + 1:
            raise FieldError("extension needs a monic modulus of degree k")
        if not is_irreducible(list(self.modulus), self.p):
            raise FieldError(f"modulus {self.modulus} is not irreducible over F_{self.p}")

    # -- constructors -------------------------------------------------------
    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls("prime", p)

    @classmethod
    def rational(cls) -> "FieldSpec":
        return cls("rational")

    @classmethod
    def gf(cls, p: int, k: int = 1, modulus: Sequence[int] | None = None) -> "FieldSpec":
        """GF(p^k); the modulus defaults to the lex-least monic irreducible."""
        if modulus is None:
            if k == 1:
                return cls.prime(p)
            modulus = lex_least_irreducible(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        return cls("extension", p, len(modulus) - 1, modulus)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``f2``, ``fp:<p>``, ``gf:<p>:<k>`` or ``q``."""
        t = text.strip().lower()
        if t in ("q", "rational", "qq"):
            return cls.rational()
        if t == "f2":
            return cls.prime(2)
        parts = t.split(":")
        try:
            if parts[0] == "fp" and len(parts) == 2:
                return cls.prime(int(parts[1]))
            if parts[0] == "gf" and len(parts) == 3:
                return cls.gf(int(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise FieldError(f"bad field spec {text!r}") from exc
        raise FieldError(f"bad field spec {text!r}")

    # -- properties -----------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return self.kind != "rational"

    @property
    def order(self) -> int | None:
        return None if self.kind == "rational" else self.p**self.k

    @property
    def characteristic(self) -> int:
        return 0 if self.kind == "rational" else self.p

    def __str__(self) -> str:
        if self.kind == "rational":
            return "q"
        if self.kind == "prime":
            return "f2" if self.p == 2 else f"fp:{self.p}"
        return f"gf:{self.p}:{self.k}"

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind != "rational":
            out["p"] = self.p
            out["k"] = self.k
        if self.kind == "extension":
            out["modulus"] = list(self.modulus)
        return out

    @classmethod
    def from_json(cls, obj) -> "FieldSpec":
        if isinstance(obj, str):
            return cls.parse(obj)
        kind = obj["kind"]
        if kind == "rational":
            return cls.rational()
        if kind == "prime":
            return cls.prime(int(obj["p"]))
        return cls.gf(int(obj["p"]), int(obj["k"]), obj["modulus"])

    # -- raw arithmetic -------------------------------------------------------
    @property
    def zero(self):
        return Fraction(0) if self.kind == "rational" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "rational" else 1

    def from_int(self, n: int):
        if self.kind == "rational":
            return Fraction(n)
        return n % self.p  # constant polynomial in the extension case too

    def from_fraction(self, q: Fraction):
        q = Fraction(q)
        if self.kind == "rational":
            return q
        return self.div(self.from_int(q.numerator), self.from_int(q.denominator))

    def is_zero(self, a) -> bool:
        return a == 0

    def add(self, a, b):
        if self.kind == "rational":
            return a + b
        if self.kind == "prime":
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self._pack([(x + y) % self.p for x, y in zip(self._digits(a), self._digits(b))])

    def neg(self, a):
        if self.kind == "rational":
            return -a
        if self.kind == "prime":
            return -a % self.p
        if self.p == 2:
            return a
        return self._pack([-x % self.p for x in self._digits(a)])

    def sub(self, a, b):
        if self.kind == "rational":
            return a - b
        if self.kind == "prime":
            return (a - b) % self.p
        if self.p == 2:
            return a ^ b
        return self._pack([(x - y) % self.p for x, y in zip(self._digits(a), self._digits(b))])

    def mul(self, a, b):
        if self.kind == "rational":
            return a * b
        if self.kind == "prime":
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        tables = self._tables()
        if tables is not None:
            exp, log = tables
            return exp[(log[a] + log[b]) % (self.order - 1)]
        return self._mul_slow(a, b)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("division by zero in " + str(self))
        if self.kind == "rational":
            return 1 / a
        if self.kind == "prime":
            return pow(a, self.p - 2, self.p)
        tables = self._tables()
        if tables is not None:
            exp, log = tables
            return exp[(-log[a]) % (self.order - 1)]
        return self.pow(a, self.order - 2)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.kind == "rational":
            return a**e
        if self.kind == "prime":
            return pow(a, e, self.p)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    # -- extension internals --------------------------------------------------
    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return out

    def _pack(self, digits: Sequence[int]) -> int:
        v = 0
        for d in reversed(digits):
            v = v * self.p + d
        return v

    def _mul_slow(self, a: int, b: int) -> int:
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        r = _pmod(prod, self.modulus, self.p)
        return self._pack(r + [0] * (self.k - len(r)))

    def _slow_pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._mul_slow(r, a)
            a = self._mul_slow(a, a)
            e >>= 1
        return r

    def _times_matrix(self, h: int) -> np.ndarray:
        """k x k matrix over F_p of x -> x*h acting on coordinate vectors."""
        cols = [self._digits(self._mul_slow(self.p**c, h)) for c in range(self.k)]
        return np.array(cols, dtype=np.int64).T

    def _tables(self, force: bool = False):
        """Exp/log tables over a primitive element, built lazily for small fields.

        Multiplication by a fixed element is F_p-linear on coordinates, so the
        exp table is filled a block at a time with one small matrix product.
        """
        if "tables" in self._cache:
            return self._cache["tables"]
        q = self.order
        if q > (DEFAULT_ENUM_CAP if force else _TABLE_CAP):
            return None
        q1 = q - 1
        factors = _prime_factors(q1)
        g = next(g for g in range(2, q) if all(self._slow_pow(g, q1 // r) != 1 for r in factors))
        B = min(q1, 1024)
        base = [1]
        for _ in range(B - 1):
            base.append(self._mul_slow(base[-1], g))
        digits = np.array([self._digits(v) for v in base], dtype=np.int64)
        weights = self.p ** np.arange(self.k, dtype=np.int64)
        gB = self._mul_slow(base[-1], g)
        exp = np.empty(q1, dtype=np.int64)
        h = 1
        for start in range(0, q1, B):
            block = (digits @ self._times_matrix(h).T) % self.p
            take = min(B, q1 - start)
            exp[start:start + take] = (block @ weights)[:take]
            h = self._mul_slow(h, gB)
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(q1)
        tables = (exp.tolist(), log.tolist())
        self._cache["tables"] = tables
        self._cache["np_tables"] = (exp, log)
        return tables

    def numpy_tables(self):
        """(exp, log) numpy arrays for bulk evaluation; finite fields only."""
        if self.kind == "prime":
            if "np_tables" not in self._cache:
                q = self.p
                g = next(g for g in range(1, q) if q == 2 or all(pow(g, (q - 1) // r, q) != 1 for r in _prime_factors(q - 1)))
                exp = np.array([pow(g, i, q) for i in range(q - 1)], dtype=np.int64)
                log = np.zeros(q, dtype=np.int64)
                log[exp] = np.arange(q - 1)
                self._cache["np_tables"] = (exp, log)
            return self._cache["np_tables"]
        if self.kind == "rational":
            raise FieldError("the rationals have no finite tables")
        self._tables(force=True)
        return self._cache["np_tables"]

    def add_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise addition of raw finite-field values held in int64 arrays."""
        if self.kind == "prime":
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        out = np.zeros_like(a)
        scale = 1
        for _ in range(self.k):
            out += ((a // scale % self.p + b // scale % self.p) % self.p) * scale
            scale *= self.p
        return out

    def mul_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        exp, log = self.numpy_tables()
        q1 = len(exp)
        out = exp[(log[a] + log[b]) % q1]
        return np.where((a == 0) | (b == 0), 0, out)

    # -- string forms ---------------------------------------------------------
    def format(self, a) -> str:
        if self.kind == "rational":
            return str(a)
        if self.kind == "prime":
            return str(a)
        return "[" + ",".join(str(d) for d in self._digits(a)) + "]"

    def parse_elem(self, text):
        if isinstance(text, (int, Fraction)) and not isinstance(text, bool):
            return self.from_fraction(Fraction(text))
        s = str(text).strip()
        if self.kind == "extension" and s.startswith("["):
            digits = [int(x) % self.p for x in s.strip("[]").split(",") if x.strip()]
            if len(digits) > self.k:
                raise FieldError(f"too many coordinates in {s!r}")
            return self._pack(digits + [0] * (self.k - len(digits)))
        try:
            return self.from_fraction(Fraction(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldError(f"cannot parse field element {s!r}") from exc

    # -- public element helpers -----------------------------------------------
    def __call__(self, value) -> "FieldElement":
        return FieldElement(self, self.parse_elem(value) if not isinstance(value, FieldElement) else value.raw)

    def elem(self, raw) -> "FieldElement":
        return FieldElement(self, raw)

    def generator(self) -> "FieldElement":
        """The class of ``t`` in GF(p^k) (for GF(4) this is omega)."""
        if self.kind != "extension":
            raise FieldError("only extension fields have a distinguished generator")
        return FieldElement(self, self.p)


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


F2 = FieldSpec.prime(2)
QQ = FieldSpec.rational()


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    raw: object

    def _check(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldError(f"mismatched fields {self.spec} and {other.spec}")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.spec, self.spec.from_fraction(Fraction(other)))
        return NotImplemented

    def __add__(self, other):
        o = self._check(other)
        return o if o is NotImplemented else FieldElement(self.spec, self.spec.add(self.raw, o.raw))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._check(other)
        return o if o is NotImplemented else FieldElement(self.spec, self.spec.sub(self.raw, o.raw))

    def __rsub__(self, other):
        o = self._check(other)
        return o if o is NotImplemented else FieldElement(self.spec, self.spec.sub(o.raw, self.raw))

    def __mul__(self, other):
        o = self._check(other)
        return o if o is NotImplemented else FieldElement(self.spec, self.spec.mul(self.raw, o.raw))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._check(other)
        return o if o is NotImplemented else FieldElement(self.spec, self.spec.div(self.raw, o.raw))

    def __rtruediv__(self, other):
        o = self._check(other)
        return o if o is NotImplemented else FieldElement(self.spec, self.spec.div(o.raw, self.raw))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.raw))

    def __pow__(self, e: int):
        return FieldElement(self.spec, self.spec.pow(self.raw, e))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.raw == other.raw
        if isinstance(other, (int, Fraction)):
            return self.raw == self.spec.from_fraction(Fraction(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.raw))

    def __bool__(self):
        return self.raw != 0

    def __str__(self):
        return self.spec.format(self.raw)

    def __repr__(self):
        return f"FieldElement({self.spec}, {self.spec.format(self.raw)})"

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.inv(self.raw))


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    if a.spec != b.spec:
        raise FieldError(f"mismatched fields {a.spec} and {b.spec}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def enumerate_field(spec: FieldSpec, cap: int = DEFAULT_ENUM_CAP) -> list[FieldElement]:
    """All elements of a finite field, zero first, in packed-coordinate order."""
    if not spec.is_finite:
        raise FieldError("cannot enumerate an infinite field")
    if spec.order > cap:
        raise FieldError(f"field of order {spec.order} exceeds cap {cap}")
    return [FieldElement(spec, v) for v in range(spec.order)]


@dataclass(frozen=True)
class Embedding:
    """Field homomorphism ``src -> dst``; ``image`` is where ``t`` goes (extensions)."""

    src: FieldSpec
    dst: FieldSpec
    image: int | None = None

    def __call__(self, raw):
        if self.src == self.dst:
            return raw
        if self.src.kind == "prime":
            return raw
        result = 0
        power = 1
        for d in self.src._digits(raw):
            if d:
                result = self.dst.add(result, self.dst.mul(self.dst.from_int(d), power))
            power = self.dst.mul(power, self.image)
        return result

    def element(self, e: FieldElement) -> FieldElement:
        return FieldElement(self.dst, self(e.raw))


@functools.lru_cache(maxsize=None)
def embedding(src: FieldSpec, dst: FieldSpec) -> Embedding:
    """Deterministic embedding: ``t`` maps to the smallest root of ``src.modulus`` in ``dst``."""
    if src == dst:
        return Embedding(src, dst)
    if not src.is_finite or not dst.is_finite or src.p != dst.p or dst.k % src.k:
        raise FieldError(f"{src} does not embed in {dst}")
    if src.kind == "prime":
        return Embedding(src, dst)
    for r in range(dst.order):
        acc = 0
        for c in reversed(src.modulus):
            acc = dst.add(dst.mul(acc, r), dst.from_int(c))
        if acc == 0:
            return Embedding(src, dst, r)
    raise FieldError(f"{src.modulus} has no root in {dst}")  # pragma: no cover


def extend_field(spec: FieldSpec, degree: int) -> tuple[FieldSpec, Embedding]:
    """GF(p^(k*degree)) with the lex-least irreducible modulus, plus the base embedding."""
    if not spec.is_finite:
        raise FieldError("cannot extend the rationals")
    if degree < 1:
        raise FieldError("extension degree must be >= 1")
    if degree == 1:
        return spec, Embedding(spec, spec)
    big = FieldSpec.gf(spec.p, spec.k * degree)
    return big, embedding(spec, big)


def subfield_contains(spec: FieldSpec, raw, j: int) -> bool:
    """Whether ``raw`` lies in the subfield GF(p^j) (i.e. is fixed by Frobenius^j)."""
    return spec.pow(raw, spec.p**j) == raw


RawOp = Callable[[object, object], object]
