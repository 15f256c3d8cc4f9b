"""Graphs, multigraphs, connectivity and the 2-separator toolkit.

Vertices are dense integers ``0..n-1``. Edges of a :class:`SimpleGraph` are
stored as sorted pairs ``(u, v)`` with ``u < v``. A :class:`Multigraph` keeps
an ordered tuple of edge copies so that every copy has an identity (its
index), which the packing code relies on.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import GraphFormatError, InputError

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class SimpleGraph:
    n: int
    edges: frozenset

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "SimpleGraph":
        seen = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) out of range for n={n}")
            key = _norm(u, v)
            if key in seen:
                raise InputError(f"parallel edge {key} in a simple graph")
            seen.add(key)
        return cls(n, frozenset(seen))

    @cached_property
    def adj(self) -> tuple[frozenset, ...]:
        nbrs: list[set] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> frozenset:
        return self.adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def is_complete(self) -> bool:
        return self.m == self.n * (self.n - 1) // 2

    def add_edges(self, edges: Iterable[Sequence[int]]) -> "SimpleGraph":
        new = set(self.edges)
        for u, v in edges:
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            new.add(_norm(u, v))
        return SimpleGraph(self.n, frozenset(new))

    def remove_edge(self, u: int, v: int) -> "SimpleGraph":
        e = _norm(u, v)
        if e not in self.edges:
            raise InputError(f"edge {e} not in graph")
        return SimpleGraph(self.n, self.edges - {e})

    def delete_vertices(self, vs: Iterable[int]) -> "SimpleGraph":
        """Delete vertices; the survivors are renumbered in increasing order."""
        gone = set(vs)
        keep = [x for x in range(self.n) if x not in gone]
        return self.induced(keep)[0]

    def delete_vertex(self, v: int) -> "SimpleGraph":
        return self.delete_vertices([v])

    def induced(self, vertices: Iterable[int]) -> tuple["SimpleGraph", list[int]]:
        """Induced subgraph on ``vertices`` (sorted) and the map new -> old."""
        vmap = sorted(set(vertices))
        index = {old: i for i, old in enumerate(vmap)}
        edges = [
            (index[u], index[v])
            for u, v in self.edges
            if u in index and v in index
        ]
        return SimpleGraph(len(vmap), frozenset(_norm(a, b) for a, b in edges)), vmap

    def relabel(self, perm: Sequence[int]) -> "SimpleGraph":
        return SimpleGraph(self.n, frozenset(_norm(perm[u], perm[v]) for u, v in self.edges))

    def to_multigraph(self) -> "Multigraph":
        return Multigraph(self.n, self.sorted_edges)

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges], "multi": False}

    def __repr__(self) -> str:
        return f"SimpleGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class Multigraph:
    """Edge multiset with per-copy identity.

    ``tags`` optionally labels each copy, e.g. ``(parent_index, copy_index)``
    for graphs produced by :func:`rigikit.packing.multiplicity_expand`.
    """

    n: int
    edges: tuple
    tags: tuple | None = None

    def __post_init__(self):
        norm = []
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"edge ({u}, {v}) out of range for n={self.n}")
            norm.append(_norm(u, v))
        object.__setattr__(self, "edges", tuple(norm))
        if self.tags is not None and len(self.tags) != len(norm):
            raise InputError("tags must label every edge copy")

    @property
    def m(self) -> int:
        return len(self.edges)

    def multiplicity(self) -> Counter:
        return Counter(self.edges)

    def degree(self, v: int) -> int:
        return sum((u == v) + (w == v) for u, w in self.edges)

    def remove_copy(self, index: int) -> "Multigraph":
        edges = self.edges[:index] + self.edges[index + 1:]
        tags = None if self.tags is None else self.tags[:index] + self.tags[index + 1:]
        return Multigraph(self.n, edges, tags)

    def underlying(self) -> SimpleGraph:
        return SimpleGraph(self.n, frozenset(self.edges))

    def simple(self) -> SimpleGraph:
        """Return the same graph as a :class:`SimpleGraph`; parallel edges are an error."""
        dup = [e for e, c in self.multiplicity().items() if c > 1]
        if dup:
            raise InputError(f"parallel edges not allowed here: {sorted(dup)}")
        return self.underlying()

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges], "multi": True}


# -- small constructors -----------------------------------------------------

def complete_graph(n: int) -> SimpleGraph:
    return SimpleGraph(n, frozenset(itertools.combinations(range(n), 2)))


def cycle_graph(n: int) -> SimpleGraph:
    return SimpleGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> SimpleGraph:
    return SimpleGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_multipartite(*sizes: int) -> SimpleGraph:
    part = [i for i, s in enumerate(sizes) for _ in range(s)]
    n = len(part)
    return SimpleGraph(
        n,
        frozenset((u, v) for u, v in itertools.combinations(range(n), 2) if part[u] != part[v]),
    )


def complete_bipartite(a: int, b: int) -> SimpleGraph:
    return complete_multipartite(a, b)


def octahedron() -> SimpleGraph:
    return complete_multipartite(2, 2, 2)


# -- connectivity -----------------------------------------------------------

@dataclass(frozen=True)
class SeparationWitness:
    separator: frozenset
    side: frozenset


def components(G: SimpleGraph, removed: Iterable[int] = ()) -> list[list[int]]:
    """Connected components of ``G - removed``, each sorted, ordered by least vertex."""
    gone = set(removed)
    seen = set(gone)
    comps = []
    for s in range(G.n):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in G.adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        comps.append(sorted(comp))
    return comps


def is_connected(G: SimpleGraph) -> bool:
    return G.n <= 1 or len(components(G)) == 1


def _local_connectivity(adj, n: int, s: int, t: int, bound: int):
    """Max number of internally disjoint s-t paths, capped at ``bound``.

    Vertex splitting: vertex x becomes in-node 2x and out-node 2x+1 joined by
    a unit arc (unbounded for s and t). Returns the flow value and, when the
    flow is below ``bound``, a minimum vertex separator.
    """
    big = n + 1
    cap: dict[int, dict[int, int]] = {i: {} for i in range(2 * n)}
    for x in range(n):
        cap[2 * x][2 * x + 1] = big if x in (s, t) else 1
        cap[2 * x + 1].setdefault(2 * x, 0)
        for y in adj[x]:
            cap[2 * x + 1][2 * y] = big
            cap[2 * y].setdefault(2 * x + 1, 0)
    source, sink = 2 * s + 1, 2 * t
    flow = 0
    while flow < bound:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            a = queue.popleft()
            for b, c in cap[a].items():
                if c > 0 and b not in parent:
                    parent[b] = a
                    queue.append(b)
        if sink not in parent:
            break
        b = sink
        while parent[b] is not None:
            a = parent[b]
            cap[a][b] -= 1
            cap[b][a] += 1
            b = a
        flow += 1
    if flow >= bound:
        return flow, None
    reach = {source}
    queue = deque([source])
    while queue:
        a = queue.popleft()
        for b, c in cap[a].items():
            if c > 0 and b not in reach:
                reach.add(b)
                queue.append(b)
    sep = frozenset(x for x in range(n) if 2 * x in reach and 2 * x + 1 not in reach)
    return flow, sep


def vertex_connectivity(G: SimpleGraph, bound: int | None = None):
    """Vertex connectivity and a minimum separator.

    Returns ``(k, witness)``. ``witness`` is ``None`` for complete graphs.
    With ``bound`` given the search stops as soon as the answer is known to
    be at least ``bound`` and returns ``(bound, None)`` in that case.
    """
    n = G.n
    if n < 2:
        raise InputError("vertex connectivity is undefined for fewer than 2 vertices")
    if G.is_complete():
        k = n - 1
        return (min(k, bound), None) if bound is not None else (k, None)
    adj = G.adj
    v0 = min(range(n), key=lambda x: (len(adj[x]), x))
    best = len(adj[v0])
    witness_sep = adj[v0]
    witness_side = v0
    if bound is not None and best >= bound:
        best = bound
        witness_sep = None
    i = 0
    while i <= best and i < n:
        for j in range(i + 1, n):
            if j in adj[i]:
                continue
            f, sep = _local_connectivity(adj, n, i, j, best)
            if f < best:
                best, witness_sep, witness_side = f, sep, i
        i += 1
    if witness_sep is None:
        return best, None
    side = next(c for c in components(G, witness_sep) if witness_side in c)
    return best, SeparationWitness(frozenset(witness_sep), frozenset(side))


def is_k_connected(G: SimpleGraph, k: int) -> bool:
    if G.n < k + 1:
        return False
    if k <= 0:
        return True
    return vertex_connectivity(G, bound=k)[0] >= k


def cut_vertices(G: SimpleGraph) -> list[int]:
    base = len(components(G))
    return [v for v in range(G.n) if len(components(G, [v])) > base]


# -- 2-separators -----------------------------------------------------------

def fragments(G: SimpleGraph) -> list[tuple[frozenset, frozenset]]:
    """All fragments of a 2-connected graph with their separators.

    A fragment is a non-empty vertex set X with exactly two neighbours outside
    it and at least one vertex outside X and its neighbourhood; these are the
    proper non-empty unions of components of ``G - {a, b}`` for a 2-separator
    ``{a, b}``. Sorted by (separator, fragment).
    """
    if G.n < 3 or not is_connected(G):
        raise InputError("fragments require a 2-connected graph")
    cuts = cut_vertices(G)
    if cuts:
        raise InputError(f"graph is not 2-connected: cut vertex {cuts[0]}")
    out = []
    for a, b in itertools.combinations(range(G.n), 2):
        comps = components(G, (a, b))
        if len(comps) < 2:
            continue
        for r in range(1, len(comps)):
            for chosen in itertools.combinations(comps, r):
                out.append((frozenset((a, b)), frozenset(itertools.chain(*chosen))))
    out.sort(key=lambda t: (sorted(t[0]), sorted(t[1])))
    return out


def two_sum(G1: SimpleGraph, G2: SimpleGraph, e1: Edge, e2: Edge) -> SimpleGraph:
    """2-sum along ``e1=(a1,b1)`` of G1 and ``e2=(a2,b2)`` of G2.

    G1 keeps its labels; a2 and b2 are identified with a1 and b1; the other
    vertices of G2 follow as ``G1.n, G1.n+1, ...`` in increasing order.
    """
    a1, b1 = e1
    a2, b2 = e2
    if not G1.has_edge(a1, b1):
        raise InputError(f"edge {e1} not in first graph")
    if not G2.has_edge(a2, b2):
        raise InputError(f"edge {e2} not in second graph")
    vmap = {a2: a1, b2: b1}
    nxt = G1.n
    for x in range(G2.n):
        if x not in vmap:
            vmap[x] = nxt
            nxt += 1
    edges = set(G1.edges - {_norm(a1, b1)})
    for u, v in G2.edges - {_norm(a2, b2)}:
        edges.add(_norm(vmap[u], vmap[v]))
    return SimpleGraph(nxt, frozenset(edges))


@dataclass(frozen=True)
class Cleavage:
    graph: SimpleGraph
    vmap: tuple  # local vertex -> vertex of the cleaved graph


def cleave(G: SimpleGraph, separator: Sequence[int]) -> tuple[Cleavage, Cleavage]:
    """Cleave G along a 2-separator ``{a, b}``.

    The first side is the component of ``G - {a, b}`` with the least vertex;
    the second side holds every other component. Both cleavage graphs carry
    the edge ab.
    """
    a, b = sorted(separator)
    comps = components(G, (a, b))
    if len(comps) < 2:
        raise InputError(f"{{{a}, {b}}} is not a 2-separator")
    sides = [set(comps[0]), set(itertools.chain(*comps[1:]))]
    out = []
    for side in sides:
        sub, vmap = G.induced(side | {a, b})
        la, lb = vmap.index(a), vmap.index(b)
        if not sub.has_edge(la, lb):
            sub = sub.add_edges([(la, lb)])
        out.append(Cleavage(sub, tuple(vmap)))
    return out[0], out[1]


# -- rooted minors ----------------------------------------------------------

def verify_rooted_minor(
    G: SimpleGraph,
    X: Iterable[int],
    H_edges: Iterable[Sequence[int]],
    witness: Mapping[int, int],
    vertices: Iterable[int] | None = None,
) -> bool:
    """Check a rooted-minor witness ``witness: vertex -> root``.

    ``vertices`` is the vertex set the partition must cover (all of G by
    default). Raises :class:`InputError` when the partition does not cover it.
    """
    X = set(X)
    V = set(range(G.n)) if vertices is None else set(vertices)
    missing = V - set(witness)
    if missing:
        raise InputError(f"partition does not cover vertices {sorted(missing)}")
    if not X <= V:
        raise InputError("roots must be vertices of G")
    blocks: dict[int, set] = {x: set() for x in X}
    for w, root in witness.items():
        if w not in V:
            raise InputError(f"vertex {w} not in G")
        if root not in X:
            return False
        blocks[root].add(w)
    for root, block in blocks.items():
        if witness.get(root) != root:
            return False
        # connectivity of the induced block
        seen = {root}
        stack = [root]
        while stack:
            x = stack.pop()
            for y in G.adj[x]:
                if y in block and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != block:
            return False
    for u, v in H_edges:
        bu, bv = blocks[u], blocks[v]
        if not any(G.adj[x] & bv for x in bu):
            return False
    return True


# -- file formats -----------------------------------------------------------

def parse_graph(text: str) -> Multigraph:
    """Parse the text format (``n m`` then ``u v`` lines) or the JSON format."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc.msg}", exc.lineno) from None
        if "n" not in data or "edges" not in data:
            raise GraphFormatError("JSON graph needs 'n' and 'edges'")
        try:
            return Multigraph(int(data["n"]), tuple(tuple(e) for e in data["edges"]))
        except (TypeError, ValueError, IndexError) as exc:
            raise GraphFormatError(str(exc)) from None
    lines = [
        (i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())
    ]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty graph file", 1)
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise GraphFormatError("header must be 'n m'", lineno)
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphFormatError("header must hold two integers", lineno) from None
    if n < 0 or m < 0:
        raise GraphFormatError("negative counts in header", lineno)
    body = lines[1:]
    if len(body) != m:
        raise GraphFormatError(f"expected {m} edge lines, found {len(body)}", lineno)
    edges = []
    for lineno, ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError("edge line must be 'u v'", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError("edge endpoints must be integers", lineno) from None
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex out of range 0..{n - 1}", lineno)
        edges.append((u, v))
    return Multigraph(n, tuple(edges))


def format_graph(G: SimpleGraph | Multigraph) -> str:
    edges = G.sorted_edges if isinstance(G, SimpleGraph) else G.edges
    lines = [f"{G.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"
