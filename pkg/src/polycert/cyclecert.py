"""Non-3-colorability certificates from oriented partial 3-cycles and chordless 4-cycles.

A set C of oriented gadgets certifies that G has no 3-coloring when every edge
is covered an even number of times by arcs of C (ignoring direction), while
the arcs that agree with a fixed reference orientation appear an odd number
of times in total.  Such a C exists exactly when the F_2 coloring encoding has
NulLA degree one, and finding one is an F_2 linear system over the gadgets.

Tuple notation: ``(i, j, k)`` is the partial 3-cycle with arcs (i,j), (j,k);
``(i, j, k, l)`` is the 4-cycle with arcs (i,j), (j,l), (l,k), (k,i), so the
vertices in cyclic order are i, j, l, k.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Sequence

from .encodings import Graph
from .exactla import FieldMatrix, solve_linear
from .fields import F2

P3 = "p3"
C4 = "c4"


class CycleCertError(ValueError):
    pass


@dataclass(frozen=True)
class OrientedCycle:
    kind: str
    verts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "verts", tuple(int(v) for v in self.verts))
        want = {P3: 3, C4: 4}.get(self.kind)
        if want is None:
            raise CycleCertError(f"unknown cycle kind {self.kind!r}")
        if len(self.verts) != want or len(set(self.verts)) != want:
            raise CycleCertError(f"{self.kind} needs {want} distinct vertices, got {self.verts}")

    @classmethod
    def from_cyclic(cls, order: Sequence[int]) -> "OrientedCycle":
        """4-cycle given by its vertices in traversal order a -> b -> c -> d -> a."""
        a, b, c, d = order
        return cls(C4, (a, b, d, c))

    def arcs(self) -> list[tuple[int, int]]:
        if self.kind == P3:
            i, j, k = self.verts
            return [(i, j), (j, k)]
        i, j, k, l = self.verts
        return [(i, j), (j, l), (l, k), (k, i)]

    def check(self, G: Graph):
        for a, b in self.arcs():
            if not G.has_edge(a, b):
                raise CycleCertError(f"{self}: arc ({a},{b}) is not an edge")
        if self.kind == P3:
            i, _, k = self.verts
            if not G.has_edge(k, i):
                raise CycleCertError(f"{self}: closing edge ({k},{i}) missing, not a 3-cycle")
        else:
            i, j, k, l = self.verts
            for a, b in ((j, k), (i, l)):
                if G.has_edge(a, b):
                    raise CycleCertError(f"{self}: chord ({a},{b}) present")

    def to_json(self) -> dict:
        return {"kind": self.kind, "verts": list(self.verts)}

    @classmethod
    def from_json(cls, obj) -> "OrientedCycle":
        return cls(obj["kind"], tuple(obj["verts"]))

    def __str__(self):
        return f"{self.kind}{self.verts}"


@dataclass
class CycleReport:
    ok: bool
    condition1: bool
    condition2: bool
    odd_edges: list[tuple[int, int]]  # edges covered an odd number of times
    arc_counts: dict[tuple[int, int], int]  # |C_(i,j)| for arcs of the reference orientation
    total: int

    def to_json(self) -> dict:
        return {
            "ok": self.ok, "condition1": self.condition1, "condition2": self.condition2,
            "odd_edges": [list(e) for e in self.odd_edges],
            "arc_counts": {f"{i}-{j}": c for (i, j), c in sorted(self.arc_counts.items())},
            "total": self.total,
        }


@dataclass
class CycleCertificate:
    graph: Graph
    cycles: list[OrientedCycle] = field(default_factory=list)

    def __post_init__(self):
        report = verify_cycle_cert(self.graph, self.cycles)
        if not report.ok:
            raise CycleCertError(f"not a certificate: condition 1 {report.condition1}, condition 2 {report.condition2}")

    def to_json(self) -> dict:
        return {"type": "cycle3color", "cycles": [c.to_json() for c in self.cycles]}


def parse_cycle_cert(obj: dict) -> list[OrientedCycle]:
    if obj.get("type") != "cycle3color":
        raise CycleCertError("not a cycle certificate")
    return [OrientedCycle.from_json(c) for c in obj["cycles"]]


def verify_cycle_cert(G: Graph, C: Iterable[OrientedCycle],
                      orientation: Iterable[tuple[int, int]] | None = None) -> CycleReport:
    """Check both parity conditions for the multiset C.

    ``orientation`` picks the reference arc for each edge in condition 2
    (default: the arc (i, j) with i < j).  The report's arc counts always use
    the i < j normalization.
    """
    C = list(C)
    for c in C:
        c.check(G)
    uses = Counter(a for c in C for a in c.arcs())
    cover = Counter()
    for (a, b), k in uses.items():
        cover[(min(a, b), max(a, b))] += k
    odd = sorted(e for e in G.edges if cover[e] % 2)
    if orientation is None:
        ref = list(G.edges)
    else:
        ref = list(orientation)
        if sorted((min(a, b), max(a, b)) for a, b in ref) != list(G.edges):
            raise CycleCertError("orientation must pick exactly one arc per edge")
    total = sum(uses[a] for a in ref)
    counts = {e: uses[e] for e in G.edges if uses[e]}
    c1 = not odd
    c2 = total % 2 == 1
    return CycleReport(c1 and c2, c1, c2, odd, counts, total)


def oriented_partial_3_cycles(G: Graph) -> list[OrientedCycle]:
    """All 6 oriented partial 3-cycles on every triangle."""
    adj = G.adjacency()
    out = []
    for a, b in G.edges:
        for c in sorted(adj[a] & adj[b]):
            if c > b:
                out += [OrientedCycle(P3, t) for t in permutations((a, b, c))]
    return out


def chordless_quadrilaterals(G: Graph) -> list[tuple[int, int, int, int]]:
    """Chordless 4-cycles as cyclic vertex orders, one per quadrilateral."""
    adj = G.adjacency()
    seen = set()
    out = []
    for a in range(G.n):
        for c in range(a + 1, G.n):
            if c in adj[a]:
                continue
            common = sorted(adj[a] & adj[c])
            for b, d in combinations(common, 2):
                if d in adj[b]:
                    continue
                key = frozenset((a, b, c, d)), frozenset(((a, c), (b, d)))
                if key in seen:
                    continue
                seen.add(key)
                out.append((a, b, c, d))
    return out


def oriented_chordless_4_cycles(G: Graph) -> list[OrientedCycle]:
    """All 8 orientations (4 starts x 2 directions) of every chordless quadrilateral."""
    out = []
    for q in chordless_quadrilaterals(G):
        for seq in (q, q[::-1]):
            for s in range(4):
                out.append(OrientedCycle.from_cyclic(seq[s:] + seq[:s]))
    return out


def search_cycle_cert(G: Graph) -> CycleCertificate | None:
    """Solve the F_2 system for a gadget set meeting both conditions, or None.

    One unknown per gadget; one parity equation per edge plus the odd-total
    equation.  Gadgets with identical columns are merged first.
    """
    gadgets = oriented_partial_3_cycles(G) + oriented_chordless_4_cycles(G)
    if not gadgets:
        return None
    eidx = {e: t for t, e in enumerate(G.edges)}
    columns = {}
    for g in gadgets:
        col = [0] * (G.m + 1)
        for a, b in g.arcs():
            col[eidx[(min(a, b), max(a, b))]] ^= 1
            if a < b:
                col[G.m] ^= 1
        columns.setdefault(tuple(col), g)
    reps = list(columns.values())
    cols = list(columns)
    rows = [[c[r] for c in cols] for r in range(G.m + 1)]
    rhs = [0] * G.m + [1]
    sol = solve_linear(FieldMatrix(F2, rows, len(cols)), rhs)
    if not sol.feasible:
        return None
    chosen = [g for g, v in zip(reps, sol.x) if v]
    return CycleCertificate(G, chosen)
