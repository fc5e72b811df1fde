"""Graphs, DIMACS input, G(n, p) sampling, and the polynomial encodings.

Stable set and k-coloring over C are materialized over Q (their coefficients are
integers and Q-bar = C is what the Nullstellensatz speaks about).  Coloring over
F_2 needs odd k.  Every emitted system carries a provenance block with the recipe
and a digest of the graph.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from dataclasses import field as dc_field
from typing import Iterable, Sequence

from .fields import F2, QQ, FieldSpec
from .nulla import PolySystem
from .polys import Polynomial


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[str, ...] | None = None

    def __init__(self, n: int, edges: Iterable[Sequence[int]], labels: Sequence[str] | None = None):
        if n < 0:
            raise GraphError("negative vertex count")
        canon = set()
        for e in edges:
            i, j = int(e[0]), int(e[1])
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge ({i}, {j}) references a vertex outside 0..{n - 1}")
            if i == j:
                raise GraphError(f"loop at vertex {i}")
            canon.add((min(i, j), max(i, j)))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        if labels is not None and len(labels) != n:
            raise GraphError("label count differs from vertex count")
        object.__setattr__(self, "labels", tuple(labels) if labels is not None else None)

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list[set[int]]:
        adj = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self._edge_set()

    def _edge_set(self):
        cached = self.__dict__.get("_es")
        if cached is None:
            cached = frozenset(self.edges)
            object.__setattr__(self, "_es", cached)
        return cached

    def digest(self) -> str:
        text = f"{self.n};" + ",".join(f"{i}-{j}" for i, j in self.edges)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def complement(self) -> "Graph":
        es = self._edge_set()
        return Graph(self.n, [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if (i, j) not in es])

    def to_dimacs(self) -> str:
        lines = [f"p edge {self.n} {self.m}"]
        lines += [f"e {i + 1} {j + 1}" for i, j in self.edges]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, obj) -> "Graph":
        return cls(obj["n"], obj["edges"])


def parse_dimacs(text: str) -> Graph:
    """Parse DIMACS ``.col`` text; vertices are shifted to 0-based."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise GraphError(f"line {lineno}: malformed header {line!r}")
            try:
                n = int(parts[2])
                int(parts[3])
            except ValueError:
                raise GraphError(f"line {lineno}: malformed header {line!r}") from None
        elif parts[0] == "e":
            if n is None:
                raise GraphError(f"line {lineno}: edge before the 'p edge' header")
            if len(parts) != 3:
                raise GraphError(f"line {lineno}: malformed edge {line!r}")
            i, j = int(parts[1]), int(parts[2])
            if not (1 <= i <= n and 1 <= j <= n):
                raise GraphError(f"line {lineno}: edge references a vertex outside 1..{n}")
            if i != j:
                edges.append((i - 1, j - 1))
        else:
            raise GraphError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise GraphError("missing 'p edge N M' header")
    return Graph(n, edges)


def random_graph(n: int, p: float, seed: int) -> Graph:
    """G(n, p): each pair i < j (in lexicographic order) kept with probability p."""
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"edge probability {p} outside [0, 1]")
    rng = random.Random(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph(n, edges)


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def groetzsch_graph() -> Graph:
    """Mycielski graph of C5 on vertices 0..10 (labels 1..11).

    Outer cycle 1-2-3-4-5, shadow i+5 adjacent to the cycle neighbours of i,
    hub 11 adjacent to 6..10.
    """
    edges = []
    for i in range(1, 6):
        j = i % 5 + 1
        edges.append((i, j))
    for i in range(1, 6):
        left = (i - 2) % 5 + 1
        right = i % 5 + 1
        edges += [(i + 5, left), (i + 5, right), (i + 5, 11)]
    return Graph(11, [(a - 1, b - 1) for a, b in edges], labels=[str(v) for v in range(1, 12)])


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EncodingRecipe:
    kind: str  # stable_set | coloring | maxcut
    k: int | None = None
    field: str = "q"
    symmetry_break: bool = False
    anchor: int = 0
    params: dict = dc_field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        if self.kind == "coloring" and self.field == "f2" and (self.k is None or self.k % 2 == 0):
            raise GraphError("coloring over F_2 needs an odd k")
        if self.kind not in ("stable_set", "coloring", "maxcut"):
            raise GraphError(f"unknown encoding {self.kind!r}")

    def encode(self, G: Graph) -> PolySystem:
        if self.kind == "stable_set":
            return encode_stable_set(G, self.k)
        if self.kind == "coloring":
            return encode_coloring(G, self.k, self.field, self.symmetry_break, self.anchor)
        return encode_maxcut_membership(G, **self.params)


def _names(n: int) -> list[str]:
    return [f"x{i}" for i in range(n)]


def _var(spec: FieldSpec, n: int, i: int, e: int = 1) -> Polynomial:
    m = [0] * n
    m[i] = e
    return Polynomial.monomial(spec, m)


def encode_stable_set(G: Graph, k: int) -> PolySystem:
    """x_i^2 - x_i, x_i x_j on edges, sum x_i - k over Q."""
    if not 1 <= k <= G.n:
        raise GraphError(f"stable-set size {k} outside 1..{G.n}")
    n = G.n
    gens = [_var(QQ, n, i, 2) - _var(QQ, n, i) for i in range(n)]
    for i, j in G.edges:
        m = [0] * n
        m[i] = m[j] = 1
        gens.append(Polynomial.monomial(QQ, m))
    total = Polynomial.zero(QQ, n)
    for i in range(n):
        total = total + _var(QQ, n, i)
    gens.append(total - k)
    prov = {"recipe": "stable_set", "k": k, "graph_hash": G.digest(), "vertices": n, "radical": True}
    return PolySystem(QQ, _names(n), gens, prov)


def encode_coloring(G: Graph, k: int = 3, field: str | FieldSpec = "f2", symmetry_break: bool = False,
                    anchor: int = 0) -> PolySystem:
    """x_i^k - 1 per vertex and sum_s x_i^(k-1-s) x_j^s per edge.

    ``field`` is ``"f2"`` (odd k only) or ``"q"``.  With ``symmetry_break`` the
    anchor vertex is pinned by ``x_anchor - 1``.
    """
    spec = field if isinstance(field, FieldSpec) else FieldSpec.parse(field)
    if k < 2:
        raise GraphError("need k >= 2 colors")
    if spec == F2 and k % 2 == 0:
        raise GraphError("coloring over F_2 needs an odd k")
    if spec not in (F2, QQ):
        raise GraphError("coloring encodes over f2 or q")
    n = G.n
    gens = [_var(spec, n, i, k) - 1 for i in range(n)]
    for i, j in G.edges:
        terms = {}
        for s in range(k):
            m = [0] * n
            m[i] += k - 1 - s
            m[j] += s
            terms[tuple(m)] = spec.one
        gens.append(Polynomial(spec, n, terms))
    if symmetry_break:
        if not 0 <= anchor < n:
            raise GraphError("anchor vertex out of range")
        gens.append(_var(spec, n, anchor) - 1)
    prov = {
        "recipe": "coloring", "k": k, "field": str(spec), "symmetry_break": symmetry_break,
        "anchor": anchor if symmetry_break else None, "graph_hash": G.digest(), "vertices": n,
        "radical": True,
    }
    return PolySystem(spec, _names(n), gens, prov)


def chordless_odd_cycles(G: Graph, cap: int = 9) -> tuple[list[tuple[int, ...]], bool]:
    """Chordless cycles of odd length <= cap, plus a completeness flag.

    The flag is False when some chordless path could still have been extended
    beyond the cap (so longer chordless odd cycles may exist).
    """
    adj = G.adjacency()
    found = []
    complete = True

    def extend(path: list[int]):
        nonlocal complete
        s, u = path[0], path[-1]
        for v in sorted(adj[u]):
            if v <= s or v in path:
                continue
            if any(v in adj[w] for w in path[1:-1]):
                continue  # chord to an interior vertex
            if len(path) >= 2 and s in adj[v]:
                # v closes the cycle; count each cycle in one direction only
                if path[1] < v and (len(path) + 1) % 2 == 1 and len(path) + 1 <= cap:
                    found.append(tuple(path + [v]))
                continue
            if len(path) + 2 > cap:
                complete = False
                continue
            path.append(v)
            extend(path)
            path.pop()

    for s in range(G.n):
        extend([s])
    return sorted(found), complete


def encode_maxcut_membership(G: Graph, cap: int = 9) -> PolySystem:
    """x_e^2 - x_e per edge and prod_{e in T} x_e per chordless odd cycle T."""
    n = G.m
    index = {e: t for t, e in enumerate(G.edges)}
    gens = []
    for t in range(n):
        gens.append(_var(QQ, n, t, 2) - _var(QQ, n, t))
    cycles, complete = chordless_odd_cycles(G, cap)
    for cyc in cycles:
        m = [0] * n
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            m[index[(min(a, b), max(a, b))]] = 1
        gens.append(Polynomial.monomial(QQ, m))
    names = [f"e{i}_{j}" for i, j in G.edges]
    prov = {"recipe": "maxcut", "cap": cap, "cycles": len(cycles), "complete": complete,
            "graph_hash": G.digest(), "vertices": G.n, "radical": True}
    if not gens:
        raise GraphError("max-cut membership needs at least one edge")
    return PolySystem(QQ, names, gens, prov)
