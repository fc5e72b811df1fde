"""Dense semidefinite programs in equality standard form.

Primal:   maximize  <C, X> + c_f . w
          subject to <A_i, X> + a_i . w = b_i,  X = diag(X_1, ..., X_r) PSD,  w free.
Dual:     minimize  b . y
          subject to sum_i y_i A_i - C PSD,  sum_i y_i a_i = c_f.

The interior-point work is done by cvxopt's ``conelp`` (homogeneous
self-dual embedding, Nesterov-Todd scaling) applied to the dual.  Its cone
multiplier is our X and its equality multiplier is -w.  Everything around
it is ours: constraint-rank cleanup, the status decision from independently
recomputed residuals, and verification of infeasibility rays.

A primal infeasibility ray is a y with ``-sum y_i A_i`` PSD, ``sum y_i a_i = 0``
and ``b . y = 1``: for any feasible X it would force ``1 = <sum y_i A_i, X> <= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

import cvxopt
from cvxopt import solvers

OPTIMAL = "OPTIMAL"
PRIMAL_INFEASIBLE = "PRIMAL_INFEASIBLE"
DUAL_INFEASIBLE = "DUAL_INFEASIBLE_OR_UNBOUNDED"
INDETERMINATE = "INDETERMINATE"

GAP_TOL = 1e-8
FEAS_TOL = 1e-8
RAY_TOL = 1e-7
MAX_ITERS = 200
MAX_DIM = 20000  # total number of symmetric-matrix entries across blocks


class SdpError(ValueError):
    pass


@dataclass
class Constraint:
    blocks: list[np.ndarray]  # one symmetric matrix per PSD block
    free: np.ndarray  # coefficients on the free variables
    rhs: float


@dataclass
class SdpProblem:
    sizes: list[int]
    nfree: int = 0
    cost: list[np.ndarray] | None = None
    cost_free: np.ndarray | None = None
    constraints: list[Constraint] = field(default_factory=list)
    sense: str = "maximize"  # or "feasibility"

    def __post_init__(self):
        if self.cost is None:
            self.cost = [np.zeros((s, s)) for s in self.sizes]
        if self.cost_free is None:
            self.cost_free = np.zeros(self.nfree)

    def add_constraint(self, entries: dict, rhs: float, free: dict | None = None):
        """``entries`` maps (block, row, col) -> value; off-diagonal entries are mirrored.

        The coefficient on a symmetric pair is split so that ``<A, X>`` picks
        ``value * X[row, col]`` once, whatever the orientation of the key.
        """
        mats = [np.zeros((s, s)) for s in self.sizes]
        for (k, r, c), v in entries.items():
            if r == c:
                mats[k][r, r] += v
            else:
                mats[k][r, c] += v / 2
                mats[k][c, r] += v / 2
        fv = np.zeros(self.nfree)
        for j, v in (free or {}).items():
            fv[j] += v
        self.constraints.append(Constraint(mats, fv, float(rhs)))

    @property
    def m(self) -> int:
        return len(self.constraints)

    def validate(self):
        if sum(s * s for s in self.sizes) > MAX_DIM:
            raise SdpError("problem exceeds the dense size cap")
        for con in self.constraints:
            if len(con.blocks) != len(self.sizes) or len(con.free) != self.nfree:
                raise SdpError("constraint shape does not match the block structure")
            for A, s in zip(con.blocks, self.sizes):
                if A.shape != (s, s) or not np.allclose(A, A.T, atol=1e-12):
                    raise SdpError("constraint data must be symmetric and block-shaped")
        for Cb, s in zip(self.cost, self.sizes):
            if Cb.shape != (s, s) or not np.allclose(Cb, Cb.T, atol=1e-12):
                raise SdpError("cost blocks must be symmetric and block-shaped")

    def dump(self) -> str:
        """Plain-text sparse form: ``constraint block row col value`` (constraint 0 = cost, rows 1-based).

        Free-variable coefficients use block index ``F``.  Right-hand sides
        follow on ``b i value`` lines.
        """
        lines = [f"* sizes {' '.join(map(str, self.sizes))} free {self.nfree} m {self.m}"]
        mats = [(0, self.cost, self.cost_free)] + [(i + 1, c.blocks, c.free) for i, c in enumerate(self.constraints)]
        for i, blocks, fv in mats:
            for k, A in enumerate(blocks):
                for r, c in zip(*np.nonzero(np.triu(A))):
                    lines.append(f"{i} {k + 1} {r + 1} {c + 1} {float(A[r, c])!r}")
            for j in np.nonzero(fv)[0]:
                lines.append(f"{i} F {j + 1} 0 {float(fv[j])!r}")
        for i, c in enumerate(self.constraints):
            lines.append(f"b {i + 1} {float(c.rhs)!r}")
        return "\n".join(lines) + "\n"


@dataclass
class SdpResult:
    status: str
    X: list[np.ndarray] | None = None
    w: np.ndarray | None = None
    y: np.ndarray | None = None
    S: list[np.ndarray] | None = None
    objective: float | None = None
    gap: float | None = None
    ray: np.ndarray | None = None
    residual: float | None = None
    iterations: int = 0
    message: str = ""


@dataclass
class PsdCheck:
    ok: bool
    min_eig: float

    def __bool__(self):
        return self.ok


def psd_check(M, tol: float = 1e-8) -> PsdCheck:
    """PSD test by Cholesky of ``M + tol I``; min eigenvalue by factorization bisection.

    ``M`` is symmetrized first.
    """
    M = np.asarray(M, dtype=float)
    M = (M + M.T) / 2
    n = M.shape[0]
    if n == 0:
        return PsdCheck(True, 0.0)
    eye = np.eye(n)

    def factors(shift):
        try:
            np.linalg.cholesky(M - shift * eye)
            return True
        except np.linalg.LinAlgError:
            return False

    ok = factors(-tol)
    # bisection: lo always factors (shift below lambda_min), hi never does
    bound = float(np.abs(M).sum(axis=1).max()) + 1.0
    lo, hi = -bound, bound
    for _ in range(80):
        mid = (lo + hi) / 2
        if factors(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, bound):
            break
    return PsdCheck(ok, (lo + hi) / 2)


def _vec(A: np.ndarray) -> np.ndarray:
    return A.reshape(-1, order="F")


def _independent_rows(R: np.ndarray, tol: float = 1e-10) -> list[int]:
    if R.shape[0] == 0:
        return []
    _, Rq, piv = scipy.linalg.qr(R.T, mode="economic", pivoting=True)
    d = np.abs(np.diag(Rq))
    if d.size == 0 or d[0] == 0:
        return []
    keep = int(np.sum(d > tol * d[0]))
    return sorted(piv[:keep].tolist())


def _ray_ok(p: SdpProblem, y: np.ndarray, tol: float) -> tuple[bool, float]:
    """Check -sum y_i A_i PSD, sum y_i a_i = 0, b.y > 0 (after scaling b.y to 1)."""
    by = sum(yi * c.rhs for yi, c in zip(y, p.constraints))
    if by <= 0:
        return False, float("inf")
    y = y / by
    worst = 0.0
    for k in range(len(p.sizes)):
        Z = -sum(yi * c.blocks[k] for yi, c in zip(y, p.constraints))
        worst = min(worst, psd_check(Z, tol).min_eig)
    fr = sum(yi * c.free for yi, c in zip(y, p.constraints)) if p.nfree else np.zeros(0)
    fres = float(np.abs(fr).max()) if fr.size else 0.0
    return worst >= -tol and fres <= tol, max(-worst, fres)


def verify_ray(p: SdpProblem, y, tol: float = RAY_TOL) -> bool:
    """Independent check of a primal-infeasibility ray."""
    return _ray_ok(p, np.asarray(y, dtype=float), tol)[0]


def sdp_solve(p: SdpProblem, gap_tol: float = GAP_TOL, feas_tol: float = FEAS_TOL,
              ray_tol: float = RAY_TOL, max_iters: int = MAX_ITERS) -> SdpResult:
    p.validate()
    m = p.m
    sizes = p.sizes
    rows = np.array([np.concatenate([_vec(A) for A in c.blocks] + [c.free]) for c in p.constraints]) \
        if m else np.zeros((0, sum(s * s for s in sizes) + p.nfree))
    keep = _independent_rows(rows)
    b_all = np.array([c.rhs for c in p.constraints])
    if len(keep) < m:
        # dependent constraints must be consistent; otherwise a least-squares ray exists
        sub = rows[keep]
        coef, *_ = np.linalg.lstsq(sub.T, rows.T, rcond=None)
        implied = coef.T @ b_all[keep]
        bad = np.abs(implied - b_all) > 1e-9 * (1 + np.abs(b_all))
        if bad.any():
            i = int(np.nonzero(bad)[0][0])
            y = np.zeros(m)
            y[i] = 1.0
            y[keep] -= coef[:, i]
            y *= np.sign(y @ b_all)
            ok, res = _ray_ok(p, y, ray_tol)
            if ok:
                return SdpResult(PRIMAL_INFEASIBLE, ray=y / (y @ b_all), residual=res,
                                 message="inconsistent linear constraints")
    cons = [p.constraints[i] for i in keep]
    b = b_all[keep]
    mk = len(cons)
    if mk == 0:
        return _trivial(p)
    # free variables whose coefficient columns are dependent carry no extra freedom
    Fm = np.array([c.free for c in cons]).reshape(mk, p.nfree)
    fkeep = _independent_rows(Fm.T) if p.nfree else []
    if len(fkeep) < p.nfree:
        coef, *_ = np.linalg.lstsq(Fm[:, fkeep], Fm, rcond=None)
        if np.abs(coef.T @ p.cost_free[fkeep] - p.cost_free).max() > 1e-9 * (1 + np.abs(p.cost_free).max()):
            return SdpResult(DUAL_INFEASIBLE, message="unbounded free direction")
    G = cvxopt.matrix(-np.array([np.concatenate([_vec(A) for A in c.blocks]) for c in cons]).T)
    h = cvxopt.matrix(-np.concatenate([_vec(Cb) for Cb in p.cost]))
    c_obj = cvxopt.matrix(b.astype(float))
    dims = {"l": 0, "q": [], "s": list(sizes)}
    kw = {}
    if fkeep:
        kw["A"] = cvxopt.matrix(np.ascontiguousarray(Fm[:, fkeep].T).astype(float))
        kw["b"] = cvxopt.matrix(p.cost_free[fkeep].astype(float))
    opts = {"show_progress": False, "maxiters": max_iters, "abstol": gap_tol * 1e-1,
            "reltol": gap_tol * 1e-1, "feastol": feas_tol * 1e-1, "refinement": 2}
    try:
        sol = solvers.conelp(c_obj, G, h, dims, options=opts, **kw)
    except (ValueError, ArithmeticError) as exc:
        return SdpResult(INDETERMINATE, message=f"solver failure: {exc}")
    status = sol["status"]
    its = int(sol.get("iterations", 0))
    if status == "dual infeasible":
        x = np.array(sol["x"]).ravel()
        y = np.zeros(m)
        y[keep] = -x
        by = y @ b_all
        if by > 0:
            y = y / by
            ok, res = _ray_ok(p, y, ray_tol)
            if ok:
                return SdpResult(PRIMAL_INFEASIBLE, ray=y, residual=res, iterations=its)
        return SdpResult(INDETERMINATE, iterations=its, message="unverified infeasibility ray")
    if status == "primal infeasible":
        return SdpResult(DUAL_INFEASIBLE, iterations=its)
    x = np.array(sol["x"]).ravel()
    z = np.array(sol["z"]).ravel()
    Xs, off = [], 0
    for s in sizes:
        Z = z[off:off + s * s].reshape((s, s), order="F")
        Xs.append((Z + Z.T) / 2)
        off += s * s
    w = np.zeros(p.nfree)
    if fkeep:
        w[fkeep] = -np.array(sol["y"]).ravel()
    y = np.zeros(m)
    y[keep] = x
    Ss = [sum(yi * c.blocks[k] for yi, c in zip(y, p.constraints)) - p.cost[k] for k in range(len(sizes))]
    res = max(abs(sum(float(np.sum(A * X)) for A, X in zip(c.blocks, Xs)) + float(c.free @ w) - c.rhs)
              for c in p.constraints)
    if p.nfree:
        fr = sum(yi * c.free for yi, c in zip(y, p.constraints)) - p.cost_free
        res = max(res, float(np.abs(fr).max()))
    pobj = sum(float(np.sum(Cb * X)) for Cb, X in zip(p.cost, Xs)) + float(p.cost_free @ w)
    dobj = float(y @ b_all)
    gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
    scale = 1 + float(np.abs(b_all).max(initial=0))
    psd_ok = all(psd_check(X, feas_tol * scale) for X in Xs) and all(psd_check(S, feas_tol * scale) for S in Ss)
    ok = res <= feas_tol * scale and gap <= gap_tol and psd_ok
    return SdpResult(OPTIMAL if ok else INDETERMINATE, X=Xs, w=w, y=y, S=Ss, objective=pobj, gap=gap,
                     residual=res, iterations=its, message=status)


def _trivial(p: SdpProblem) -> SdpResult:
    """No constraints: X = 0 is optimal iff the cost is negative semidefinite."""
    if p.nfree and np.any(p.cost_free != 0):
        return SdpResult(DUAL_INFEASIBLE, message="unbounded free direction")
    for Cb in p.cost:
        if Cb.size and psd_check(-Cb, 0.0).min_eig < -FEAS_TOL:
            return SdpResult(DUAL_INFEASIBLE, message="unbounded PSD direction")
    Xs = [np.zeros((s, s)) for s in p.sizes]
    return SdpResult(OPTIMAL, X=Xs, w=np.zeros(p.nfree), y=np.zeros(0), S=[-Cb for Cb in p.cost],
                     objective=0.0, gap=0.0, residual=0.0)
