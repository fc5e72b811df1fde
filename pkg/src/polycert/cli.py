"""Command-line driver and the G(n, p) phase-transition harness.

Every subcommand prints one JSON document (CSV for ``experiment``) on success.
Exit codes: 0 when a decision was reached, 2 for BOUND_REACHED or
INDETERMINATE, 1 for usage or data errors (message on stderr, nothing on stdout).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

from .cyclecert import CycleCertError, parse_cycle_cert, search_cycle_cert, verify_cycle_cert
from .encodings import Graph, GraphError, encode_coloring, encode_maxcut_membership, encode_stable_set, parse_dimacs, random_graph
from .fields import QQ, FieldError, FieldSpec
from .fpnulla import COUNTED, fpnulla_run
from .nulla import BOUND_REACHED, INFEASIBLE, NullCertificate, PolySystem, nulla_run, verify_null_cert
from .polys import parse_poly

CSV_SCHEMA = "polycert-experiment/1"
METHODS = ("NULLA_D1", "FPNULLA_D1", "EXACT_ORACLE")
ORACLE_CAP = 64
COLOR_NAMES = ("red", "green", "blue")


class CliError(Exception):
    pass


# -- input helpers -------------------------------------------------------------------

def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _json(path: str | None) -> dict:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON in {path or 'stdin'}: {exc}") from None


def _graph(path: str | None) -> Graph:
    text = _read(path)
    if text.lstrip().startswith("{"):
        return Graph.from_json(json.loads(text))
    return parse_dimacs(text)


def _system(path: str | None) -> PolySystem:
    return PolySystem.from_json(_json(path))


def _real_problem(path: str | None):
    """``{"variables": [...], "eqs": ["..."], "ineqs": ["..."]}`` over Q."""
    obj = _json(path)
    names = [str(v) for v in obj.get("variables", [])]
    if not names:
        raise CliError("real problem needs a non-empty 'variables' list")
    eqs = [parse_poly(t, QQ, names) for t in obj.get("eqs", [])]
    ineqs = [parse_poly(t, QQ, names) for t in obj.get("ineqs", [])]
    return names, eqs, ineqs


def _sdp_opts(args) -> dict:
    return {"gap_tol": args.tol_gap, "feas_tol": args.tol_feas}


# -- subcommands ---------------------------------------------------------------------

def cmd_encode(args):
    G = _graph(args.graph)
    if args.kind == "coloring":
        sysm = encode_coloring(G, args.k, args.field, args.symmetry_break, args.anchor)
    elif args.kind == "stable-set":
        sysm = encode_stable_set(G, args.k)
    else:
        sysm = encode_maxcut_membership(G, cap=args.cycle_cap)
    return sysm.to_json(), 0


def cmd_nulla(args):
    out = nulla_run(_system(args.system), args.max_degree)
    return out.to_json(), 0 if out.status == INFEASIBLE else 2


def cmd_fpnulla(args):
    out = fpnulla_run(_system(args.system), args.max_degree)
    return out.to_json(), 2 if out.status == BOUND_REACHED else 0


def _color_names(sysm: PolySystem, roots) -> list[list[str]] | None:
    if sysm.provenance.get("recipe") != "coloring" or sysm.provenance.get("k") != 3:
        return None
    E = roots.field
    one = E.one
    if E.is_finite and E.order in (2, 4):
        w = E.generator().raw if E.kind == "extension" else None
        table = {one: COLOR_NAMES[0]}
        if w is not None:
            table[w] = COLOR_NAMES[1]
            table[E.mul(w, w)] = COLOR_NAMES[2]
        return [[table.get(c.raw, "?") for c in r] for r in roots.roots]
    return None


def cmd_solve(args):
    from .recover import RecoveryError, recover_roots

    sysm = _system(args.system)
    out = fpnulla_run(sysm, args.max_degree)
    doc = {"status": out.status, "degree": out.degree, "passes": out.passes}
    if out.status == INFEASIBLE:
        doc["certificate"] = out.certificate.to_json()
        return doc, 0
    if out.status != COUNTED:
        return doc, 2
    doc["count"] = out.solution_count
    try:
        roots = recover_roots(sysm, out, seed=args.seed)
    except RecoveryError as exc:
        doc.update(recovery_error=exc.code, message=str(exc))
        return doc, 2
    doc.update(roots.to_json())
    names = _color_names(sysm, roots)
    if names is not None:
        doc["colors"] = names
    return doc, 0


def _unwrap(obj: dict) -> dict:
    return obj["certificate"] if "type" not in obj and isinstance(obj.get("certificate"), dict) else obj


def cmd_check_cert(args):
    cert = _unwrap(_json(args.certificate))
    kind = cert.get("type")
    if kind == "nullstellensatz":
        if args.system is None:
            raise CliError("--system is required for a Nullstellensatz certificate")
        sysm = _system(args.system)
        c = NullCertificate.from_json(cert, sysm.n)
        if c.spec != sysm.spec:
            raise CliError("certificate field differs from the system field")
        if not verify_null_cert(sysm, c):
            raise CliError("identity residual nonzero")
        return {"type": kind, "valid": True, "degree": c.degree}, 0
    if kind == "cycle3color":
        if args.graph is None:
            raise CliError("--graph is required for a cycle certificate")
        rep = verify_cycle_cert(_graph(args.graph), parse_cycle_cert(cert))
        if not rep.ok:
            raise CliError(f"cycle certificate rejected: condition1={rep.condition1} condition2={rep.condition2}")
        return {"type": kind, "valid": True, "report": rep.to_json()}, 0
    if kind == "positivstellensatz":
        from .possatz import PsatzCertificate, psatz_residual, verify_psatz, verify_psatz_exact

        if args.system is None:
            raise CliError("--system (real problem JSON) is required for a Positivstellensatz certificate")
        names, eqs, ineqs = _real_problem(args.system)
        c = PsatzCertificate.from_json(cert)
        exact = c.rationalized and verify_psatz_exact(eqs, ineqs, c, len(names))
        if not exact and not verify_psatz(eqs, ineqs, c, len(names)):
            raise CliError("identity residual nonzero")
        return {"type": kind, "valid": True, "exact": exact,
                "residual": psatz_residual(eqs, ineqs, c, len(names))}, 0
    raise CliError(f"unknown certificate type {kind!r}")


def cmd_cycle_cert(args):
    G = _graph(args.graph)
    cert = search_cycle_cert(G)
    if cert is None:
        return {"status": "NO_CERTIFICATE", "graph_hash": G.digest()}, 0
    doc = cert.to_json()
    doc["graph_hash"] = G.digest()
    return doc, 0


def cmd_psatz(args):
    from .possatz import INDETERMINATE, moment_relax, moment_solve, psatz_search

    names, eqs, ineqs = _real_problem(args.system)
    if len(ineqs) >= 4:
        print(f"warning: {len(ineqs)} inequalities give {2 ** len(ineqs)} SOS blocks", file=sys.stderr)
    if args.moment:
        res = moment_solve(moment_relax(eqs, ineqs, args.max_degree, len(names)), _sdp_opts(args))
        return res.to_json(), 2 if res.status == INDETERMINATE else 0
    out = psatz_search(eqs, ineqs, args.max_degree, len(names), opts=_sdp_opts(args))
    return out.to_json(), 0 if out.status == INFEASIBLE else 2


def cmd_sos_check(args):
    from .possatz import INDETERMINATE, sos_check

    if args.poly is not None:
        names = args.vars.split(",") if args.vars else None
        if not names:
            raise CliError("--vars is required with --poly")
        text = args.poly
    else:
        obj = _json(args.system)
        names, text = [str(v) for v in obj["variables"]], obj["poly"]
    out = sos_check(parse_poly(text, QQ, names), opts=_sdp_opts(args))
    return out.to_json(), 2 if out.status == INDETERMINATE else 0


def cmd_theta1(args):
    from .possatz import theta1_optimize

    G = _graph(args.graph)
    w = [float(x) for x in args.weights.split(",")] if args.weights else None
    res = theta1_optimize(G, w, _sdp_opts(args))
    if res.value is None:
        return {"status": res.status}, 2
    return {"status": res.status, "value": res.value, "M": res.M.tolist()}, 0


# -- experiment harness ----------------------------------------------------------------

@dataclass
class ExperimentSpec:
    n: int
    ps: list[float]
    trials: int
    seed: int
    methods: tuple[str, ...] = METHODS
    k: int = 3  # fixed: 3-coloring over F_2

    def __post_init__(self):
        if self.trials < 1:
            raise CliError("trials must be >= 1")
        if any(not 0.0 <= p <= 1.0 for p in self.ps):
            raise CliError("edge probabilities must lie in [0, 1]")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise CliError(f"unknown methods {sorted(bad)}")
        if "EXACT_ORACLE" in self.methods and self.n > ORACLE_CAP:
            raise CliError(f"exact oracle capped at n <= {ORACLE_CAP}")


@dataclass
class CellResult:
    p_index: int
    trial: int
    proven: dict = field(default_factory=dict)  # method -> bool (non-3-colorable shown)
    seconds: dict = field(default_factory=dict)


def cell_seed(seed: int, p_index: int, trial: int) -> int:
    h = hashlib.sha256(f"{seed}:{p_index}:{trial}".encode()).digest()
    return int.from_bytes(h[:8], "big")


def parse_grid(text: str) -> list[float]:
    """``a:b:step`` (inclusive) or a comma list."""
    try:
        if ":" in text:
            a, b, s = (Fraction(x) for x in text.split(":"))
            if s <= 0 or b < a:
                raise CliError(f"bad grid {text!r}")
            count = int((b - a) / s) + 1
            return [float(a + i * s) for i in range(count)]
        return [float(x) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise CliError(f"bad grid {text!r}") from None


def three_colorable(G: Graph) -> bool:
    """Backtracking search, most-constrained vertex first."""
    adj = [sorted(a) for a in G.adjacency()]
    colors = [-1] * G.n

    def pick():
        best, best_key = -1, None
        for v in range(G.n):
            if colors[v] >= 0:
                continue
            used = {colors[u] for u in adj[v] if colors[u] >= 0}
            key = (len(used), len(adj[v]))
            if best_key is None or key > best_key:
                best, best_key = v, key
        return best

    def go(left):
        if left == 0:
            return True
        v = pick()
        used = {colors[u] for u in adj[v] if colors[u] >= 0}
        for c in range(3):
            if c not in used:
                colors[v] = c
                if go(left - 1):
                    return True
        colors[v] = -1
        return False

    return go(G.n)


def run_cell(spec: ExperimentSpec, p_index: int, trial: int) -> CellResult:
    from .gf2kernel import fpnulla_decide, nulla_degree1_decide

    G = random_graph(spec.n, spec.ps[p_index], cell_seed(spec.seed, p_index, trial))
    sysm = encode_coloring(G, spec.k, "f2", symmetry_break=True, anchor=0) if G.n else None
    res = CellResult(p_index, trial)
    for m in spec.methods:
        t0 = time.perf_counter()
        if sysm is None:
            hit = False
        elif m == "NULLA_D1":
            hit = nulla_degree1_decide(sysm) is not None
        elif m == "FPNULLA_D1":
            hit = fpnulla_decide(sysm, sysm.degree)[0] == INFEASIBLE
        else:
            hit = not three_colorable(G)
        res.seconds[m] = time.perf_counter() - t0
        res.proven[m] = hit
    return res


def _cell_star(a):
    return run_cell(*a)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list[CellResult]:
    jobs = [(spec, pi, t) for pi in range(len(spec.ps)) for t in range(spec.trials)]
    if workers <= 1:
        cells = [run_cell(*j) for j in jobs]
    else:
        with ProcessPoolExecutor(workers) as ex:
            cells = list(ex.map(_cell_star, jobs, chunksize=8))
    return sorted(cells, key=lambda c: (c.p_index, c.trial))


def aggregate(spec: ExperimentSpec, cells: list[CellResult]) -> list[dict]:
    rows = []
    for pi, p in enumerate(spec.ps):
        mine = [c for c in cells if c.p_index == pi]
        for m in spec.methods:
            rows.append({
                "p": p, "method": m,
                "proven_infeasible_fraction": sum(c.proven[m] for c in mine) / len(mine),
                "mean_runtime": sum(c.seconds[m] for c in mine) / len(mine),
            })
    return rows


def check_dominance(spec: ExperimentSpec, cells: list[CellResult], rows: list[dict]) -> list[str]:
    """FPNulLA >= NulLA per grid point, soundness against the oracle, per-cell implication chain."""
    problems = []
    frac = {(r["p"], r["method"]): r["proven_infeasible_fraction"] for r in rows}
    for p in spec.ps:
        if ("FPNULLA_D1" in spec.methods and "NULLA_D1" in spec.methods
                and frac[(p, "FPNULLA_D1")] < frac[(p, "NULLA_D1")]):
            problems.append(f"p={p}: FPNULLA_D1 fraction below NULLA_D1")
        if "EXACT_ORACLE" in spec.methods:
            for m in ("NULLA_D1", "FPNULLA_D1"):
                if m in spec.methods and frac[(p, m)] > frac[(p, "EXACT_ORACLE")]:
                    problems.append(f"p={p}: {m} fraction above the exact oracle")
    chain = [m for m in ("NULLA_D1", "FPNULLA_D1", "EXACT_ORACLE") if m in spec.methods]
    for c in cells:
        for a, b in zip(chain, chain[1:]):
            if c.proven[a] and not c.proven[b]:
                problems.append(f"p index {c.p_index}, trial {c.trial}: {a} proved infeasible but {b} did not")
    return problems


def format_csv(spec: ExperimentSpec, rows: list[dict], timestamp: bool = True, timing: bool = True) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {CSV_SCHEMA}\n")
    buf.write(f"# n={spec.n} trials={spec.trials} seed={spec.seed} k={spec.k} field=f2 symmetry_break=1\n")
    if timestamp:
        buf.write(f"# generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "method", "proven_infeasible_fraction", "mean_runtime"])
    for r in rows:
        w.writerow([f"{r['p']:.6g}", r["method"], f"{r['proven_infeasible_fraction']:.6f}",
                    f"{r['mean_runtime']:.6f}" if timing else "NA"])
    return buf.getvalue()


def cmd_experiment(args):
    methods = tuple(m.strip().upper() for m in args.methods.split(",")) if args.methods else METHODS
    spec = ExperimentSpec(args.n, parse_grid(args.p), args.trials, args.seed, methods)
    cells = run_experiment(spec, args.workers)
    rows = aggregate(spec, cells)
    if args.assert_dominance:
        problems = check_dominance(spec, cells, rows)
        if problems:
            raise CliError("dominance check failed: " + "; ".join(problems[:5]))
    if args.format == "json":
        if not args.no_timing:
            return {"schema": CSV_SCHEMA, "rows": rows}, 0
        return {"schema": CSV_SCHEMA, "rows": [{**r, "mean_runtime": None} for r in rows]}, 0
    return format_csv(spec, rows, not args.no_timestamp, not args.no_timing), 0


# -- argument parsing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polycert", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", "-o", help="write here instead of stdout")
        return p

    def sdp_flags(p):
        p.add_argument("--tol-gap", type=float, default=1e-8)
        p.add_argument("--tol-feas", type=float, default=1e-8)

    p = add("encode", cmd_encode, "graph -> polynomial system JSON")
    p.add_argument("--graph", help="DIMACS or graph JSON (default stdin)")
    p.add_argument("--kind", choices=("coloring", "stable-set", "maxcut"), default="coloring")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--field", default="f2", help="f2 | q for coloring")
    p.add_argument("--symmetry-break", action="store_true")
    p.add_argument("--anchor", type=int, default=0)
    p.add_argument("--cycle-cap", type=int, default=9)

    for name, fn, h in (("nulla", cmd_nulla, "Nullstellensatz certificate search"),
                        ("fpnulla", cmd_fpnulla, "fixed-point refinement and solution count"),
                        ("solve", cmd_solve, "fixed-point refinement plus root recovery")):
        p = add(name, fn, h)
        p.add_argument("--system", help="system JSON (default stdin)")
        p.add_argument("--max-degree", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)

    p = add("check-cert", cmd_check_cert, "verify a certificate")
    p.add_argument("certificate", help="certificate JSON (or a result containing one)")
    p.add_argument("--system")
    p.add_argument("--graph")

    p = add("cycle-cert", cmd_cycle_cert, "search for an oriented-cycle non-3-colorability certificate")
    p.add_argument("--graph")

    p = add("psatz", cmd_psatz, "bounded-degree Positivstellensatz search")
    p.add_argument("--system", help='{"variables": [...], "eqs": [...], "ineqs": [...]}')
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--moment", action="store_true", help="solve the dual moment relaxation instead")
    sdp_flags(p)

    p = add("sos-check", cmd_sos_check, "sum-of-squares test via a Gram matrix")
    p.add_argument("--poly")
    p.add_argument("--vars", help="comma-separated variable names for --poly")
    p.add_argument("--system", help='{"variables": [...], "poly": "..."}')
    sdp_flags(p)

    p = add("theta1", cmd_theta1, "TH_1 bound on the stable-set number")
    p.add_argument("--graph")
    p.add_argument("--weights", help="comma-separated vertex weights")
    sdp_flags(p)

    p = add("experiment", cmd_experiment, "G(n, p) phase-transition sweep")
    p.set_defaults(format="csv")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", required=True, help="a:b:step or comma list")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", help="subset of " + ",".join(METHODS))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--no-timing", action="store_true", help="write NA runtimes so re-runs are byte-identical")
    p.add_argument("--assert-dominance", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc, code = args.fn(args)
    except (CliError, GraphError, FieldError, CycleCertError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"polycert {args.command}: {msg}", file=sys.stderr)
        return 1
    text = doc if isinstance(doc, str) else json.dumps(doc, indent=1) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
