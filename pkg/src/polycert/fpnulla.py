"""Fixed-point refinement at bounded degree (FPNulLA) and solution counting.

At degree bound d the span F is closed under ``F := F+ ∩ R_d``.  Then either
1 is in F (infeasible), or the quotient dimensions at d and d - 1 agree and
``dim R_d / F`` counts the solutions over the algebraic closure (with
multiplicity), or ``F := F+`` and d grows by one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .exactla import PolySpace, SparseEchelon, codec_for, row_from_poly, shift_row, _is_f2
from .nulla import INFEASIBLE, BOUND_REACHED, NullCertificate, PolySystem, verify_null_cert
from .polys import Polynomial

COUNTED = "COUNTED"


@dataclass
class FpnullaOutcome:
    status: str
    degree: int  # terminal degree bound d
    passes: int  # outer iterations performed (the FPNulLA degree)
    certificate: NullCertificate | None = None
    solution_count: int | None = None
    space: PolySpace | None = None
    with_multiplicity: bool = True
    trace: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"status": self.status, "degree": self.degree, "passes": self.passes}
        if self.solution_count is not None:
            out["count"] = self.solution_count
            out["with_multiplicity"] = self.with_multiplicity
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        out["trace"] = self.trace
        return out


def codim_at(S: PolySpace, d: int) -> int:
    """dim_d(F°) = C(n+d, d) - dim(S ∩ R_d)."""
    if d > S.degree:
        raise ValueError(f"degree {d} exceeds the space's bound {S.degree}")
    return S.codim_at(d)


def fixed_point_close(S: PolySpace) -> tuple[PolySpace, int]:
    """Iterate S := S+ ∩ R_d until stable or until 1 ∈ S.

    Returns the final space and the number of strict growth steps.  Each step
    either leaves the space unchanged (and stops) or raises its dimension, so
    at most C(n+d, d) steps happen.
    """
    steps = 0
    d = S.degree
    while not S.contains_one():
        T = S.expand_once().intersect_with_degree(d)
        if T.dim == S.dim:
            break
        S = T
        steps += 1
    return S, steps


class _Tracked:
    """Sparse worklist closure with optional origin tracking for certificates."""

    def __init__(self, sys: PolySystem, track: bool):
        self.sys = sys
        self.f2 = _is_f2(sys.spec)
        self.codec = codec_for(sys.n)
        self.track = track
        self.ech = SparseEchelon(sys.spec, track=track)
        self.keys: list[tuple[int, int]] = []
        self.key_index: dict[tuple[int, int], int] = {}
        self.queue: list[int] = []
        self.d = sys.degree

    def _key(self, a: int, i: int) -> int:
        k = self.key_index.get((a, i))
        if k is None:
            k = len(self.keys)
            self.keys.append((a, i))
            self.key_index[(a, i)] = k
        return k

    def _shift_comp(self, comp, k: int):
        mul = self.codec.mul
        if self.f2:
            out = 0
            x = comp
            while x:
                b = x.bit_length() - 1
                a, i = self.keys[b]
                out ^= 1 << self._key(mul(a, k), i)
                x ^= 1 << b
            return out
        return {self._key(mul(self.keys[j][0], k), self.keys[j][1]): v for j, v in comp.items()}

    def _insert(self, row, comp) -> bool:
        L = self.ech.insert(row, comp)
        if L is None:
            return False
        if L == 0:
            return True
        if L < comb(self.sys.n + self.d, self.d):
            self.queue.append(L)
        return False

    def start(self) -> bool:
        for i, f in enumerate(self.sys.generators):
            comp = None
            if self.track:
                idx = self._key(0, i)
                comp = 1 << idx if self.f2 else {idx: self.sys.spec.one}
            if self._insert(row_from_poly(f, self.codec, self.f2), comp):
                return True
        return False

    def close(self) -> bool:
        n = self.sys.n
        while self.queue:
            L = self.queue.pop(0)
            row = self.ech.rows[L]
            comp = self.ech.comps[L] if self.track else None
            for k in range(n):
                c2 = self._shift_comp(comp, k) if self.track else None
                if self._insert(shift_row(row, k, self.codec, self.f2), c2):
                    return True
        return False

    def raise_degree(self):
        lo = comb(self.sys.n + self.d, self.d)
        self.d += 1
        hi = comb(self.sys.n + self.d, self.d)
        self.queue.extend(sorted(L for L in self.ech.rows if lo <= L < hi))

    def dim_up_to(self, d: int) -> int:
        bound = comb(self.sys.n + d, d) if d >= 0 else 0
        return sum(1 for L in self.ech.rows if L < bound)

    def codim_at(self, d: int) -> int:
        return (comb(self.sys.n + d, d) if d >= 0 else 0) - self.dim_up_to(d)

    def certificate(self) -> NullCertificate:
        sys = self.sys
        comp = self.ech.comps[0]
        terms: list[dict] = [dict() for _ in range(sys.m)]
        items = []
        if self.f2:
            x = comp
            while x:
                b = x.bit_length() - 1
                items.append((b, 1))
                x ^= 1 << b
        else:
            items = list(comp.items())
        K = sys.spec
        for j, c in items:
            a, i = self.keys[j]
            m = self.codec.monomial(a)
            v = K.add(terms[i][m], c) if m in terms[i] else c
            if v == 0:
                terms[i].pop(m, None)
            else:
                terms[i][m] = v
        return NullCertificate([Polynomial(K, sys.n, t, _trusted=True) for t in terms], K)


def fpnulla_run(sys: PolySystem, D: int | None = None, certificate: bool = True) -> FpnullaOutcome:
    """Alg. 2.  ``D`` caps the degree bound d (default: system degree + 6).

    With ``certificate=False`` over F_2 the compiled kernel decides and counts
    without multiplier bookkeeping; INFEASIBLE outcomes then carry no certificate.
    """
    d0 = sys.degree
    if D is None:
        D = d0 + 6
    if D < d0:
        raise ValueError(f"degree bound {D} is below the system degree {d0}")
    if not certificate and _is_f2(sys.spec):
        return _run_compiled(sys, D)
    eng = _Tracked(sys, track=certificate)
    passes = 1
    trace = []
    hit = eng.start() or eng.close()
    while True:
        d = eng.d
        entry = {"d": d, "dim": eng.dim_up_to(d)}
        if hit:
            entry["one"] = True
            trace.append(entry)
            cert = None
            if certificate:
                cert = eng.certificate()
                if not verify_null_cert(sys, cert):  # pragma: no cover
                    raise AssertionError("extracted certificate failed verification")
            return FpnullaOutcome(INFEASIBLE, d, passes, certificate=cert, trace=trace)
        c_d, c_prev = eng.codim_at(d), eng.codim_at(d - 1)
        entry.update({"codim_d": c_d, "codim_d_minus_1": c_prev})
        trace.append(entry)
        if c_d == c_prev:
            space = PolySpace.from_echelon(eng.ech, sys.n, d, max_lead=comb(sys.n + d, d))
            return FpnullaOutcome(COUNTED, d, passes, solution_count=c_d, space=space,
                                  with_multiplicity=not sys.provenance.get("radical", False), trace=trace)
        if d + 1 > D:
            return FpnullaOutcome(BOUND_REACHED, d, passes, trace=trace)
        eng.raise_degree()
        passes += 1
        hit = eng.close()


def _run_compiled(sys: PolySystem, D: int) -> FpnullaOutcome:
    from .gf2kernel import GF2Span, system_rows

    span = GF2Span(sys.n, D)
    passes = 1
    trace = []
    hit = span.insert_generators(system_rows(sys), sys.degree) or span.close()
    while True:
        d = span.d
        entry = {"d": d, "dim": span.dim_up_to(d)}
        if hit:
            entry["one"] = True
            trace.append(entry)
            return FpnullaOutcome(INFEASIBLE, d, passes, trace=trace)
        c_d, c_prev = span.codim_at(d), span.codim_at(d - 1)
        entry.update({"codim_d": c_d, "codim_d_minus_1": c_prev})
        trace.append(entry)
        if c_d == c_prev:
            ech = SparseEchelon(sys.spec)
            for ids in span.rows_below(comb(sys.n + d, d)):
                r = 0
                for c in ids:
                    r |= 1 << c
                ech.insert(r)
            space = PolySpace.from_echelon(ech, sys.n, d)
            return FpnullaOutcome(COUNTED, d, passes, solution_count=c_d, space=space,
                                  with_multiplicity=not sys.provenance.get("radical", False), trace=trace)
        if d + 1 > D:
            return FpnullaOutcome(BOUND_REACHED, d, passes, trace=trace)
        span.raise_degree()
        passes += 1
        hit = span.close()
