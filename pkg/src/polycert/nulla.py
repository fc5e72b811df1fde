"""Degree-by-degree Nullstellensatz certificate search (NulLA).

The span of ``{x^a f_i : |a| <= d}`` is built level by level, multiplying the
previous level's products by single variables.  This is the same space as
iterating ``F := F + sum_k x_k F`` from the generators, and each product keeps
its identity ``(a, i)`` so a hit on ``1`` can be unwound into multipliers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .exactla import (
    PolySpace, SparseEchelon, codec_for, row_from_poly, shift_row, _is_f2,
)
from .fields import FieldError, FieldSpec
from .polys import Polynomial, parse_poly

INFEASIBLE = "INFEASIBLE"
BOUND_REACHED = "BOUND_REACHED"


@dataclass
class PolySystem:
    spec: FieldSpec
    names: list[str]
    generators: list[Polynomial]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.generators:
            raise ValueError("a system needs at least one generator")
        n = len(self.names)
        for g in self.generators:
            if g.spec != self.spec:
                raise FieldError("generator over a different field")
            if g.n != n:
                raise ValueError("generator arity does not match the variable list")
            if g.is_zero():
                raise ValueError("zero generator")

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def m(self) -> int:
        return len(self.generators)

    @property
    def degree(self) -> int:
        return max(g.degree for g in self.generators)

    @classmethod
    def parse(cls, spec: FieldSpec, names: Sequence[str], gens: Sequence[str], **kw) -> "PolySystem":
        names = list(names)
        return cls(spec, names, [parse_poly(g, spec, names) for g in gens], **kw)

    def to_json(self) -> dict:
        return {
            "field": self.spec.to_json(),
            "variables": list(self.names),
            "generators": [g.to_json() for g in self.generators],
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PolySystem":
        spec = FieldSpec.from_json(obj["field"])
        names = [str(v) for v in obj["variables"]]
        gens = [Polynomial.from_json(spec, len(names), g) for g in obj["generators"]]
        return cls(spec, names, gens, dict(obj.get("provenance", {})))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


@dataclass
class NullCertificate:
    multipliers: list[Polynomial]
    spec: FieldSpec

    @property
    def degree(self) -> int:
        return max((b.degree for b in self.multipliers), default=-1)

    def to_json(self) -> dict:
        return {
            "type": "nullstellensatz",
            "field": self.spec.to_json(),
            "order": "grevlex",
            "degree": self.degree,
            "multipliers": [b.to_json() for b in self.multipliers],
        }

    @classmethod
    def from_json(cls, obj: dict, n: int) -> "NullCertificate":
        if obj.get("type") != "nullstellensatz":
            raise ValueError("not a Nullstellensatz certificate")
        spec = FieldSpec.from_json(obj["field"])
        return cls([Polynomial.from_json(spec, n, b) for b in obj["multipliers"]], spec)


@dataclass
class NullaOutcome:
    status: str
    bound: int
    certificate: NullCertificate | None = None
    nulla_degree: int | None = None
    dims: list[int] = field(default_factory=list)  # dim of the span after each degree

    def to_json(self) -> dict:
        out = {"status": self.status, "bound": self.bound}
        if self.certificate is not None:
            out["degree"] = self.nulla_degree
            out["certificate"] = self.certificate.to_json()
        return out


def combination(sys: PolySystem, multipliers: Sequence[Polynomial]) -> Polynomial:
    total = Polynomial.zero(sys.spec, sys.n)
    for b, f in zip(multipliers, sys.generators):
        if not b.is_zero():
            total = total + b * f
    return total


def verify_null_cert(sys: PolySystem, cert: NullCertificate) -> bool:
    """True iff sum(beta_i f_i) - 1 is exactly the zero polynomial."""
    if len(cert.multipliers) != sys.m:
        raise ValueError(f"{len(cert.multipliers)} multipliers for {sys.m} generators")
    for b in cert.multipliers:
        if b.spec != sys.spec:
            raise FieldError("multiplier over a different field")
        if b.n != sys.n:
            raise ValueError("multiplier arity mismatch")
    return (combination(sys, cert.multipliers) - 1).is_zero()


def expand_once(S: PolySpace) -> PolySpace:
    """F+ = F + sum_i x_i F, with the degree bound raised by one."""
    return S.expand_once()


def default_bound(sys: PolySystem) -> int:
    prov = sys.provenance or {}
    if prov.get("recipe") == "coloring" and _is_f2(sys.spec) and prov.get("k") == 3:
        return 2 * sys.n
    return 4


class _ProductSpan:
    """Incremental span of products x^a f_i with optional origin tracking."""

    def __init__(self, sys: PolySystem, track: bool):
        self.sys = sys
        self.f2 = _is_f2(sys.spec)
        self.codec = codec_for(sys.n)
        self.track = track
        self.ech = SparseEchelon(sys.spec, track=track)
        self.keys: list[tuple[int, int]] = []  # product index -> (monomial id, generator)
        self.level: list[tuple[int, int, object]] = []
        self.seen: set[tuple[int, int]] = set()

    def _add(self, a: int, i: int, row) -> bool:
        idx = len(self.keys)
        self.keys.append((a, i))
        comp = None
        if self.track:
            comp = 1 << idx if self.f2 else {idx: self.sys.spec.one}
        self.ech.insert(row, comp)
        return 0 in self.ech.rows

    def start(self) -> bool:
        hit = False
        for i, f in enumerate(self.sys.generators):
            row = row_from_poly(f, self.codec, self.f2)
            self.seen.add((0, i))
            self.level.append((0, i, row))
            hit = self._add(0, i, row) or hit
            if hit:
                return True
        return hit

    def next_level(self) -> bool:
        new = []
        for a, i, row in self.level:
            for k in range(self.sys.n):
                b = self.codec.mul(a, k)
                if (b, i) in self.seen:
                    continue
                self.seen.add((b, i))
                r2 = shift_row(row, k, self.codec, self.f2)
                new.append((b, i, r2))
                if self._add(b, i, r2):
                    self.level = new
                    return True
        self.level = new
        return False

    def certificate(self) -> NullCertificate:
        sys = self.sys
        K = sys.spec
        comp = self.ech.comps[0]
        terms: list[dict] = [dict() for _ in range(sys.m)]
        if self.f2:
            x = comp
            while x:
                b = x.bit_length() - 1
                a, i = self.keys[b]
                terms[i][self.codec.monomial(a)] = 1
                x ^= 1 << b
        else:
            for idx, c in comp.items():
                a, i = self.keys[idx]
                terms[i][self.codec.monomial(a)] = c
        return NullCertificate([Polynomial(K, sys.n, t, _trusted=True) for t in terms], K)


def nulla_run(sys: PolySystem, D: int | None = None) -> NullaOutcome:
    """Search for a Nullstellensatz certificate of multiplier degree <= D.

    BOUND_REACHED only says no certificate of degree <= D exists; it does not
    claim the system is feasible.
    """
    if D is None:
        D = default_bound(sys)
    if D < 0:
        raise ValueError("degree bound must be >= 0")
    span = _ProductSpan(sys, track=True)
    hit = span.start()
    dims = [len(span.ech)]
    d = 0
    while not hit and d < D:
        d += 1
        hit = span.next_level()
        dims.append(len(span.ech))
    if not hit:
        return NullaOutcome(BOUND_REACHED, D, dims=dims)
    cert = span.certificate()
    if not verify_null_cert(sys, cert):  # pragma: no cover - guards the bookkeeping
        raise AssertionError("extracted certificate failed verification")
    return NullaOutcome(INFEASIBLE, D, cert, cert.degree, dims)


def nulla_decide(sys: PolySystem, D: int) -> int | None:
    """NulLA degree (<= D) without certificate bookkeeping, or None."""
    span = _ProductSpan(sys, track=False)
    if span.start():
        return 0
    for d in range(1, D + 1):
        if span.next_level():
            return d
    return None
