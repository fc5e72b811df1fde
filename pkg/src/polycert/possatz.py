"""Real certificates: SOS Gram matrices, bounded-degree Positivstellensatz,
the moment relaxation dual to it, and the TH_1 theta body of a stable-set ideal.

Inputs are exact polynomials over Q.  The SDPs are floating point, so each
numeric certificate is re-checked by expanding the identity.  Psatz
certificates also get a rationalization pass: round, project exactly onto the
affine coefficient constraints, then confirm PSD-ness with an exact LDL sweep.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .encodings import Graph
from .fields import QQ
from .polys import Polynomial, monomials_up_to
from .sdpcore import (
    DUAL_INFEASIBLE, INDETERMINATE, OPTIMAL, PRIMAL_INFEASIBLE, SdpProblem, psd_check, sdp_solve, verify_ray,
)

PSD_TOL = 1e-8
RES_TOL = 1e-7
CERT_TOL = 1e-6

SOS = "SOS"
NOT_SOS = "NOT_SOS"
INFEASIBLE = "INFEASIBLE"
FEASIBLE = "FEASIBLE"
BOUND_REACHED = "BOUND_REACHED"

Mono = tuple[int, ...]
_DENOMINATORS = (1, 2, 3, 4, 6, 12, 24, 60, 360, 720, 5040, 10**4, 10**6)


# -- coefficient dictionaries ---------------------------------------------------

def _madd(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def _exact(f: Polynomial) -> dict[Mono, Fraction]:
    if f.spec != QQ:
        raise ValueError("real certificates need polynomials over Q")
    return {m: Fraction(c) for m, c in f.terms.items()}


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = _madd(ma, mb)
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c != 0}


def _padd(a: dict, b: dict, scale=1) -> dict:
    out = dict(a)
    for m, c in b.items():
        out[m] = out.get(m, 0) + scale * c
    return {m: c for m, c in out.items() if c != 0}


def _deg(a: dict) -> int:
    return max((sum(m) for m in a), default=-1)


def _gram_poly(basis: Sequence[Mono], Q) -> dict:
    out: dict = {}
    N = len(basis)
    for i in range(N):
        for j in range(N):
            v = Q[i][j]
            if v:
                m = _madd(basis[i], basis[j])
                out[m] = out.get(m, 0) + v
    return {m: c for m, c in out.items() if c != 0}


def exact_psd(Q) -> bool:
    """PSD test over Q by symmetric elimination (no square roots)."""
    A = [[Fraction(v) for v in row] for row in Q]
    n = len(A)
    for i in range(n):
        for j in range(n):
            if A[i][j] != A[j][i]:
                return False
    for k in range(n):
        piv = A[k][k]
        if piv < 0:
            return False
        if piv == 0:
            if any(A[k][j] != 0 for j in range(k + 1, n)):
                return False
            continue
        for i in range(k + 1, n):
            if A[i][k]:
                f = A[i][k] / piv
                for j in range(k, n):
                    A[i][j] -= f * A[k][j]
    return True


# -- SOS ------------------------------------------------------------------------

@dataclass
class GramDecomposition:
    basis: list[Mono]
    Q: np.ndarray
    residual: float
    squares: list[dict]
    min_eig: float
    status: str = SOS

    def to_json(self) -> dict:
        return {"status": self.status, "basis": [list(m) for m in self.basis], "Q": self.Q.tolist(),
                "residual": self.residual, "min_eig": self.min_eig}


@dataclass
class NotSos:
    status: str  # NOT_SOS or INDETERMINATE
    functional: dict | None = None  # moment-style separating functional
    message: str = ""

    def to_json(self) -> dict:
        out = {"status": self.status, "message": self.message}
        if self.functional is not None:
            out["functional"] = [{"monomial": list(m), "value": v} for m, v in sorted(self.functional.items())]
        return out


def newton_basis(p: Polynomial) -> list[Mono]:
    """Monomials m with 2m in the Newton polytope of p.

    A box and degree prefilter cuts the candidates; hull membership of each
    survivor is then an LP feasibility question (convex weights on the support).
    """
    terms = list(p.terms)
    n = p.n
    if not terms:
        return []
    top = [max(m[i] for m in terms) for i in range(n)]
    lo = min(sum(m) for m in terms)
    hi = max(sum(m) for m in terms)
    cands = [m for m in monomials_up_to(n, hi // 2)
             if all(2 * m[i] <= top[i] for i in range(n)) and 2 * sum(m) >= lo]
    pts = np.array(terms, dtype=float).T
    A_eq = np.vstack([pts, np.ones(len(terms))])
    out = []
    for m in cands:
        b_eq = np.concatenate([2 * np.array(m, dtype=float), [1.0]])
        res = linprog(np.zeros(len(terms)), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        if res.status == 0:
            out.append(m)
    return out


def sos_check(p: Polynomial, basis: Sequence[Mono] | None = None, prune: bool = True,
              psd_tol: float = PSD_TOL, res_tol: float = RES_TOL, opts: dict | None = None):
    """Find a PSD Gram matrix Q with p = z^T Q z by maximizing lambda_min(Q)."""
    target = _exact(p)
    if basis is None:
        z = newton_basis(p) if prune else monomials_up_to(p.n, max(p.degree, 0) // 2)
    else:
        z = [tuple(m) for m in basis]
    if not target:
        N = len(z)
        return GramDecomposition(z, np.zeros((N, N)), 0.0, [], 0.0)
    out = _sos_solve(target, z, psd_tol, res_tol, opts)
    if out.status == NOT_SOS and basis is None and prune:
        full = monomials_up_to(p.n, max(p.degree, 0) // 2)
        if len(full) > len(z):
            out = _sos_solve(target, full, psd_tol, res_tol, opts)
    return out


def _sos_solve(target: dict, z: list[Mono], psd_tol: float, res_tol: float, opts: dict | None = None):
    N = len(z)
    monos = set(target)
    for a in z:
        for b in z:
            monos.add(_madd(a, b))
    order = sorted(monos)
    if N == 0:
        return NotSos(NOT_SOS, message="no Gram basis can represent the polynomial")
    # X blocks: Q' (N x N) and a 1x1 slack; free: lambda.  Q = Q' + lambda I, lambda <= 1.
    prob = SdpProblem([N, 1], nfree=1, cost_free=np.array([1.0]))
    for g in order:
        entries = {}
        ndiag = 0
        for i, a in enumerate(z):
            for j in range(i, N):
                if _madd(a, z[j]) == g:
                    entries[(0, i, j)] = 1.0 if i == j else 2.0
                    ndiag += i == j
        prob.add_constraint(entries, float(target.get(g, 0)), {0: float(ndiag)} if ndiag else None)
    prob.add_constraint({(1, 0, 0): 1.0}, 1.0, {0: 1.0})
    res = sdp_solve(prob, **(opts or {}))
    if res.status == PRIMAL_INFEASIBLE:
        return NotSos(NOT_SOS, {g: float(-v) for g, v in zip(order, res.ray)}, "coefficient constraints admit no PSD Gram matrix")
    if res.status != OPTIMAL:
        return NotSos(INDETERMINATE, message=f"solver status {res.status} ({res.message})")
    lam = float(res.w[0])
    if lam < -psd_tol:
        return NotSos(NOT_SOS, {g: float(v) for g, v in zip(order, res.y)}, f"max lambda_min = {lam:.3e}")
    Q = res.X[0] + lam * np.eye(N)
    Q = (Q + Q.T) / 2
    return _decompose(target, z, Q, psd_tol, res_tol)


def _decompose(target: dict, z: list[Mono], Q: np.ndarray, psd_tol: float, res_tol: float):
    vals, vecs = np.linalg.eigh(Q)
    squares = []
    for lam, v in zip(vals, vecs.T):
        if lam > psd_tol:
            s = np.sqrt(lam) * v
            squares.append({m: float(c) for m, c in zip(z, s) if abs(c) > 1e-15})
    total: dict = {}
    for q in squares:
        total = _padd(total, _pmul(q, q))
    diff = _padd({m: float(c) for m, c in target.items()}, total, -1)
    residual = max((abs(c) for c in diff.values()), default=0.0)
    if residual > res_tol:
        return NotSos(INDETERMINATE, message=f"square extraction residual {residual:.3e} above {res_tol}")
    return GramDecomposition(list(z), Q, residual, squares, float(vals[0]) if len(vals) else 0.0)


def verify_gram_exact(p: Polynomial, basis: Sequence[Mono], Q) -> tuple[bool, str]:
    """Exact check that Q (rational entries) is symmetric, PSD and reproduces p."""
    Qf = [[Fraction(v) for v in row] for row in Q]
    if any(Qf[i][j] != Qf[j][i] for i in range(len(Qf)) for j in range(len(Qf))):
        return False, "not symmetric"
    if _padd(_gram_poly([tuple(m) for m in basis], Qf), _exact(p), -1):
        return False, "z^T Q z differs from p"
    if not exact_psd(Qf):
        return False, "not positive semidefinite"
    return True, "ok"


# -- Positivstellensatz ------------------------------------------------------------

@dataclass
class SosBlock:
    alpha: tuple[int, ...]
    basis: list[Mono]
    Q: list  # rows of floats, or Fractions once rationalized


@dataclass
class PsatzCertificate:
    degree: int
    beta: list[dict]  # monomial -> coefficient, one per equation
    blocks: list[SosBlock]
    rationalized: bool = False
    exact: "PsatzCertificate | None" = None

    def to_json(self) -> dict:
        src = self.exact or self

        def num(v):
            return str(v) if isinstance(v, Fraction) else float(v)

        return {
            "type": "positivstellensatz",
            "degree": self.degree,
            "beta": [[{"coeff": num(c), "monomial": list(m)} for m, c in sorted(b.items())] for b in src.beta],
            "sos_blocks": [{"alpha": list(b.alpha), "basis": [list(m) for m in b.basis],
                            "Q": [[num(v) for v in row] for row in b.Q]} for b in src.blocks],
            "rationalized": self.rationalized,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PsatzCertificate":
        if obj.get("type") != "positivstellensatz":
            raise ValueError("not a Positivstellensatz certificate")

        def num(v):
            return Fraction(v) if isinstance(v, str) else float(v)

        beta = [{tuple(t["monomial"]): num(t["coeff"]) for t in b} for b in obj["beta"]]
        blocks = [SosBlock(tuple(b["alpha"]), [tuple(m) for m in b["basis"]], [[num(v) for v in row] for row in b["Q"]])
                  for b in obj["sos_blocks"]]
        return cls(int(obj["degree"]), beta, blocks, bool(obj.get("rationalized", False)))


@dataclass
class PsatzOutcome:
    status: str
    certificate: PsatzCertificate | None = None
    degree: int | None = None
    bound: int = 0
    residual: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"status": self.status, "bound": self.bound}
        if self.certificate is not None:
            out.update(degree=self.degree, residual=self.residual, certificate=self.certificate.to_json())
        if self.notes:
            out["notes"] = self.notes
        return out


def _arity(eqs, ineqs, n):
    polys = list(eqs) + list(ineqs)
    if n is None:
        if not polys:
            raise ValueError("cannot infer the number of variables")
        n = polys[0].n
    for f in polys:
        if f.n != n:
            raise ValueError("arity mismatch")
    return n


def certificate_identity(eqs, ineqs, cert: PsatzCertificate, n: int, exact: bool = False) -> dict:
    """sum beta_i f_i + sum s_alpha g^alpha, as a coefficient dictionary."""
    conv = (lambda f: _exact(f)) if exact else (lambda f: {m: float(c) for m, c in _exact(f).items()})
    F = [conv(f) for f in eqs]
    G = [conv(g) for g in ineqs]
    one = {tuple([0] * n): (Fraction(1) if exact else 1.0)}
    total: dict = {}
    for b, f in zip(cert.beta, F):
        total = _padd(total, _pmul(b, f))
    for blk in cert.blocks:
        g = one
        for a, gi in zip(blk.alpha, G):
            if a:
                g = _pmul(g, gi)
        total = _padd(total, _pmul(_gram_poly(blk.basis, blk.Q), g))
    return total


def psatz_residual(eqs, ineqs, cert: PsatzCertificate, n: int) -> float:
    total = certificate_identity(eqs, ineqs, cert, n)
    total = _padd(total, {tuple([0] * n): 1.0})
    return max((abs(c) for c in total.values()), default=0.0)


def verify_psatz(eqs, ineqs, cert: PsatzCertificate, n: int | None = None, tol: float = CERT_TOL) -> bool:
    n = _arity(eqs, ineqs, n)
    if len(cert.beta) != len(eqs):
        return False
    if not all(psd_check(np.array(b.Q, dtype=float), PSD_TOL) for b in cert.blocks):
        return False
    return psatz_residual(eqs, ineqs, cert, n) <= tol


def verify_psatz_exact(eqs, ineqs, cert: PsatzCertificate, n: int | None = None) -> bool:
    """-1 = sum beta_i f_i + sum s_alpha g^alpha identically over Q, every block exactly PSD."""
    n = _arity(eqs, ineqs, n)
    if len(cert.beta) != len(eqs):
        return False
    try:
        beta = [{m: Fraction(c) for m, c in b.items()} for b in cert.beta]
        blocks = [SosBlock(b.alpha, b.basis, [[Fraction(v) for v in row] for row in b.Q]) for b in cert.blocks]
    except (TypeError, ValueError):
        return False
    if not all(exact_psd(b.Q) for b in blocks):
        return False
    ex = PsatzCertificate(cert.degree, beta, blocks)
    total = certificate_identity(eqs, ineqs, ex, n, exact=True)
    return _padd(total, {tuple([0] * n): Fraction(1)}) == {}


class _PsatzSystem:
    """Unknowns and coefficient equations of the degree-d certificate search."""

    def __init__(self, eqs, ineqs, n: int, d: int):
        self.n, self.d = n, d
        self._neqs = len(eqs)
        F = [_exact(f) for f in eqs]
        G = [_exact(g) for g in ineqs]
        self.targets = monomials_up_to(n, d)
        self.tindex = {m: i for i, m in enumerate(self.targets)}
        self.free: list[tuple[int, Mono]] = []
        for i, f in enumerate(F):
            room = d - _deg(f)
            if room >= 0:
                self.free += [(i, m) for m in monomials_up_to(n, room)]
        self.blocks: list[tuple[tuple[int, ...], list[Mono], dict]] = []
        one = {tuple([0] * n): Fraction(1)}
        for alpha in itertools.product((0, 1), repeat=len(G)):
            g = one
            for a, gi in zip(alpha, G):
                if a:
                    g = _pmul(g, gi)
            room = d - _deg(g)
            if room >= 0:
                self.blocks.append((alpha, monomials_up_to(n, room // 2), g))
        # exact sparse rows: target monomial -> {var key: coefficient}
        rows: dict[Mono, dict] = {m: {} for m in self.targets}
        for j, (i, delta) in enumerate(self.free):
            for mu, c in F[i].items():
                g_ = _madd(delta, mu)
                rows[g_][("f", j)] = rows[g_].get(("f", j), 0) + c
        for k, (_, z, g) in enumerate(self.blocks):
            for a in range(len(z)):
                for b in range(a, len(z)):
                    ab = _madd(z[a], z[b])
                    w = 1 if a == b else 2
                    for mu, c in g.items():
                        g_ = _madd(ab, mu)
                        key = ("q", k, a, b)
                        rows[g_][key] = rows[g_].get(key, 0) + w * c
        self.rows = rows
        self.rhs = {m: Fraction(-1 if sum(m) == 0 else 0) for m in self.targets}

    def problem(self) -> SdpProblem:
        prob = SdpProblem([len(z) for _, z, _ in self.blocks], nfree=len(self.free))
        for m in self.targets:
            entries, free = {}, {}
            for key, c in self.rows[m].items():
                if key[0] == "f":
                    free[key[1]] = float(c)
                else:
                    _, k, a, b = key
                    entries[(k, a, b)] = float(c)
            prob.add_constraint(entries, float(self.rhs[m]), free)
        return prob

    def certificate(self, w, Xs) -> PsatzCertificate:
        beta: list[dict] = [dict() for _ in range(self._neqs)]
        for j, (i, delta) in enumerate(self.free):
            if w[j] != 0:
                beta[i][delta] = float(w[j])
        blocks = [SosBlock(alpha, z, X.tolist()) for (alpha, z, _), X in zip(self.blocks, Xs)]
        return PsatzCertificate(self.d, beta, blocks)

    def rationalize(self, cert: PsatzCertificate) -> PsatzCertificate | None:
        """Round, project exactly onto the coefficient equations, and re-check PSD exactly."""
        keys = [("f", j) for j in range(len(self.free))]
        for k, (_, z, _) in enumerate(self.blocks):
            keys += [("q", k, a, b) for a in range(len(z)) for b in range(a, len(z))]
        if len(keys) > 400:
            return None
        pos = {key: t for t, key in enumerate(keys)}
        vals = []
        for key in keys:
            if key[0] == "f":
                i, delta = self.free[key[1]]
                vals.append(cert.beta[i].get(delta, 0.0))
            else:
                _, k, a, b = key
                vals.append(cert.blocks[k].Q[a][b])
        A = [[Fraction(0)] * len(keys) for _ in self.targets]
        for r, m in enumerate(self.targets):
            for key, c in self.rows[m].items():
                A[r][pos[key]] = Fraction(c)
        bvec = [self.rhs[m] for m in self.targets]
        A, bvec = _independent_exact(A, bvec)
        if A is None:
            return None
        for den in _DENOMINATORS:
            v = [Fraction(x).limit_denominator(den) for x in vals]
            v = _project(A, bvec, v)
            ex = self._from_vector(keys, v)
            if all(exact_psd(b.Q) for b in ex.blocks):
                return ex
        return None

    def _from_vector(self, keys, v) -> PsatzCertificate:
        beta: list[dict] = [dict() for _ in range(self._neqs)]
        Qs = [[[Fraction(0)] * len(z) for _ in z] for _, z, _ in self.blocks]
        for key, x in zip(keys, v):
            if key[0] == "f":
                i, delta = self.free[key[1]]
                if x != 0:
                    beta[i][delta] = x
            else:
                _, k, a, b = key
                Qs[k][a][b] = Qs[k][b][a] = x
        return PsatzCertificate(self.d, beta, [SosBlock(al, z, Q) for (al, z, _), Q in zip(self.blocks, Qs)])


def _independent_exact(A, b):
    """Drop dependent rows (exact); None if the system is inconsistent."""
    rows = [list(r) + [bi] for r, bi in zip(A, b)]
    ncol = len(A[0]) if A else 0
    basis: list[tuple[int, list]] = []  # (pivot col, reduced row)
    keep = []
    for idx, r in enumerate(rows):
        r = list(r)
        for c, br in basis:
            if r[c] != 0:
                f = r[c]
                r = [x - f * y for x, y in zip(r, br)]
        piv = next((c for c in range(ncol) if r[c] != 0), None)
        if piv is None:
            if r[ncol] != 0:
                return None, None
            continue
        inv = 1 / r[piv]
        basis.append((piv, [x * inv for x in r]))
        keep.append(idx)
    return [A[i] for i in keep], [b[i] for i in keep]


def _project(A, b, v):
    """Exact orthogonal projection of v onto {x : A x = b} (A full row rank)."""
    m = len(A)
    if m == 0:
        return v
    r = [sum((a * x for a, x in zip(row, v) if a), Fraction(0)) - bi for row, bi in zip(A, b)]
    AAt = [[sum((x * y for x, y in zip(A[i], A[j]) if x and y), Fraction(0)) for j in range(m)] for i in range(m)]
    t = _solve_exact(AAt, r)
    out = list(v)
    for i in range(m):
        if t[i]:
            for j, a in enumerate(A[i]):
                if a:
                    out[j] -= a * t[i]
    return out


def _solve_exact(M, rhs):
    n = len(M)
    R = [list(M[i]) + [rhs[i]] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if R[r][c] != 0)
        R[c], R[piv] = R[piv], R[c]
        inv = 1 / R[c][c]
        R[c] = [x * inv for x in R[c]]
        for r in range(n):
            if r != c and R[r][c] != 0:
                f = R[r][c]
                R[r] = [x - f * y for x, y in zip(R[r], R[c])]
    return [R[i][n] for i in range(n)]


def psatz_search(eqs: Sequence[Polynomial], ineqs: Sequence[Polynomial], D: int, n: int | None = None,
                 rationalize: bool = True, cert_tol: float = CERT_TOL, opts: dict | None = None) -> PsatzOutcome:
    """Degree-by-degree search for -1 = sum beta_i f_i + sum_alpha s_alpha g^alpha."""
    eqs, ineqs = list(eqs), list(ineqs)
    n = _arity(eqs, ineqs, n)
    if len(ineqs) > 12:
        raise ValueError("at most 12 inequalities (2^k SOS blocks)")
    if D < 0:
        raise ValueError("degree bound must be >= 0")
    notes = []
    undecided = False
    for d in range(D + 1):
        sysd = _PsatzSystem(eqs, ineqs, n, d)
        if not sysd.blocks and not sysd.free:
            continue
        res = sdp_solve(sysd.problem(), **(opts or {}))
        if res.status == PRIMAL_INFEASIBLE:
            continue
        if res.status != OPTIMAL:
            undecided = True
            notes.append(f"d={d}: solver {res.status} ({res.message})")
            continue
        cert = sysd.certificate(res.w, res.X)
        resid = psatz_residual(eqs, ineqs, cert, n)
        if resid > cert_tol:
            undecided = True
            notes.append(f"d={d}: identity residual {resid:.2e} above {cert_tol}")
            continue
        if rationalize:
            ex = sysd.rationalize(cert)
            if ex is not None and verify_psatz_exact(eqs, ineqs, ex, n):
                cert.rationalized = True
                cert.exact = ex
            else:
                notes.append(f"d={d}: rationalization did not produce an exact certificate")
        return PsatzOutcome(INFEASIBLE, cert, d, D, resid, notes)
    return PsatzOutcome(INDETERMINATE if undecided else BOUND_REACHED, bound=D, notes=notes)


# -- moment relaxation -------------------------------------------------------------

@dataclass
class MomentRelaxation:
    D: int
    n: int
    monomials: list[Mono]  # lambda variables (free), degree <= D
    basis: list[Mono]  # moment-matrix rows, degree <= D // 2
    localizers: list[tuple[tuple[int, ...], list[Mono]]]
    problem: SdpProblem


@dataclass
class MomentResult:
    status: str  # FEASIBLE | INFEASIBLE | INDETERMINATE
    lam: dict | None = None
    ray: np.ndarray | None = None
    sdp_status: str = ""

    def to_json(self) -> dict:
        out = {"status": self.status, "sdp_status": self.sdp_status}
        if self.lam is not None:
            out["lambda"] = [{"monomial": list(m), "value": v} for m, v in sorted(self.lam.items())]
        if self.ray is not None:
            out["ray"] = [float(v) for v in self.ray]
        return out


def moment_relax(eqs: Sequence[Polynomial], ineqs: Sequence[Polynomial], D: int, n: int | None = None) -> MomentRelaxation:
    """Moment matrix, localizing blocks for square-free products g^alpha, linearized x^delta f = 0, lambda_1 = 1."""
    eqs, ineqs = list(eqs), list(ineqs)
    n = _arity(eqs, ineqs, n) if (eqs or ineqs) else (n if n is not None else 1)
    F = [_exact(f) for f in eqs]
    G = [_exact(g) for g in ineqs]
    if max((_deg(f) for f in F + G), default=0) > D:
        raise ValueError("relaxation degree below the constraint degree")
    lams = monomials_up_to(n, D)
    lidx = {m: i for i, m in enumerate(lams)}
    basis = monomials_up_to(n, D // 2)
    locs = []
    one = {tuple([0] * n): Fraction(1)}
    for alpha in itertools.product((0, 1), repeat=len(G)):
        if not any(alpha):
            continue
        g = one
        for a, gi in zip(alpha, G):
            if a:
                g = _pmul(g, gi)
        room = D - _deg(g)
        if room >= 0:
            locs.append((alpha, monomials_up_to(n, room // 2), g))
    sizes = [len(basis)] + [len(z) for _, z, _ in locs]
    prob = SdpProblem(sizes, nfree=len(lams))
    prob.cost[0] = -np.eye(len(basis))  # prefer the smallest trace among feasible moment matrices
    for a in range(len(basis)):
        for b in range(a, len(basis)):
            prob.add_constraint({(0, a, b): 1.0}, 0.0, {lidx[_madd(basis[a], basis[b])]: -1.0})
    for k, (_, z, g) in enumerate(locs, start=1):
        for a in range(len(z)):
            for b in range(a, len(z)):
                free = {}
                for mu, c in g.items():
                    j = lidx[_madd(_madd(z[a], z[b]), mu)]
                    free[j] = free.get(j, 0.0) - float(c)
                prob.add_constraint({(k, a, b): 1.0}, 0.0, free)
    for f in F:
        for delta in monomials_up_to(n, D - _deg(f)):
            free = {}
            for mu, c in f.items():
                j = lidx[_madd(delta, mu)]
                free[j] = free.get(j, 0.0) + float(c)
            prob.add_constraint({}, 0.0, free)
    prob.add_constraint({}, 1.0, {lidx[tuple([0] * n)]: 1.0})
    return MomentRelaxation(D, n, lams, basis, [(al, z) for al, z, _ in locs], prob)


def moment_solve(rel: MomentRelaxation, opts: dict | None = None) -> MomentResult:
    res = sdp_solve(rel.problem, **(opts or {}))
    if res.status == PRIMAL_INFEASIBLE and verify_ray(rel.problem, res.ray):
        return MomentResult(INFEASIBLE, ray=res.ray, sdp_status=res.status)
    if res.status == OPTIMAL:
        return MomentResult(FEASIBLE, lam={m: float(v) for m, v in zip(rel.monomials, res.w)}, sdp_status=res.status)
    return MomentResult(INDETERMINATE, sdp_status=res.status)


# -- TH_1 for stable sets --------------------------------------------------------

@dataclass
class ThetaResult:
    status: str
    value: float | None
    M: np.ndarray | None


def theta1_optimize(G: Graph, weights: Sequence[float] | None = None, opts: dict | None = None) -> ThetaResult:
    """max sum w_i y_i over M PSD, M_00 = 1, M_0i = M_ii = y_i, M_ij = 0 on edges."""
    n = G.n
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise ValueError("one weight per vertex")
    prob = SdpProblem([n + 1])
    prob.cost[0] = np.diag(np.concatenate([[0.0], w]))
    prob.add_constraint({(0, 0, 0): 1.0}, 1.0)
    for i in range(1, n + 1):
        prob.add_constraint({(0, 0, i): 1.0, (0, i, i): -1.0}, 0.0)
    for i, j in G.edges:
        prob.add_constraint({(0, i + 1, j + 1): 1.0}, 0.0)
    res = sdp_solve(prob, **(opts or {}))
    if res.status != OPTIMAL:
        return ThetaResult(INDETERMINATE, None, None)
    return ThetaResult(OPTIMAL, float(res.objective), res.X[0])
