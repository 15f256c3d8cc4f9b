"""Exact planar rigidity: the (2,3) pebble game and what it buys.

The pebble game decides independence in the generic 2-dimensional rigidity
matroid. When it rejects an edge uv, the vertices reachable from u and v in
the pebble orientation form the smallest tight set containing both, and
the accepted edges inside that set together with uv are the fundamental
circuit of uv. M-components, circuit tests and ear decompositions are all
built from these fundamental circuits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError, InvariantFault
from .graph_core import SimpleGraph, is_k_connected


class PebbleGame:
    """Incremental (2,3) pebble game over a fixed vertex set."""

    def __init__(self, n: int):
        self.n = n
        self.pebbles = [2] * n
        self.out: list[dict] = [{} for _ in range(n)]  # tail -> {edge id: head}
        self.accepted: list[int] = []

    def copy(self) -> "PebbleGame":
        g = PebbleGame.__new__(PebbleGame)
        g.n = self.n
        g.pebbles = list(self.pebbles)
        g.out = [dict(o) for o in self.out]
        g.accepted = list(self.accepted)
        return g

    def _fetch(self, root: int, blocked: int) -> bool:
        """Move one free pebble to ``root`` along a reversed directed path avoiding ``blocked``."""
        parent = {root: None, blocked: None}
        stack = [root]
        while stack:
            x = stack.pop()
            for eid, y in self.out[x].items():
                if y in parent:
                    continue
                parent[y] = (x, eid)
                if self.pebbles[y] > 0:
                    self.pebbles[y] -= 1
                    while parent[y] is not None:
                        x, eid = parent[y]
                        del self.out[x][eid]
                        self.out[y][eid] = x
                        y = x
                    self.pebbles[root] += 1
                    return True
                stack.append(y)
        return False

    def reach(self, roots: Iterable[int]) -> set:
        seen = set(roots)
        stack = list(seen)
        while stack:
            x = stack.pop()
            for y in self.out[x].values():
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def insert(self, eid: int, u: int, v: int):
        """Try to accept edge ``eid = uv``.

        Returns ``None`` when accepted, otherwise the edge ids of the
        fundamental circuit (including ``eid``).
        """
        while self.pebbles[u] < 2 and self._fetch(u, v):
            pass
        while self.pebbles[v] < 2 and self._fetch(v, u):
            pass
        if self.pebbles[u] + self.pebbles[v] == 4:
            self.pebbles[u] -= 1
            self.out[u][eid] = v
            self.accepted.append(eid)
            return None
        region = self.reach((u, v))
        circuit = {eid}
        for x in region:
            circuit.update(self.out[x])
        return circuit


def _edge_list(G: SimpleGraph, edges: Iterable[Sequence[int]] | None = None):
    return list(G.sorted_edges if edges is None else edges)


def pebble_rank(G: SimpleGraph, edges: Iterable[Sequence[int]] | None = None):
    """Rank of an edge set in the planar rigidity matroid, with a maximum independent subset."""
    edges = _edge_list(G, edges)
    game = PebbleGame(G.n)
    indep = []
    for i, (u, v) in enumerate(edges):
        if game.insert(i, u, v) is None:
            indep.append((u, v))
    return len(indep), indep


def is_laman_rigid(G: SimpleGraph) -> bool:
    if G.n <= 1:
        return True
    return pebble_rank(G)[0] == 2 * G.n - 3


def is_circuit_r2(G: SimpleGraph) -> bool:
    """|E| = 2|V| - 2 and every proper subgraph H has |E(H)| <= 2|V(H)| - 3."""
    edges = G.sorted_edges
    if G.n < 2 or len(edges) != 2 * G.n - 2:
        return False
    game = PebbleGame(G.n)
    circuits = []
    for i, (u, v) in enumerate(edges):
        c = game.insert(i, u, v)
        if c is not None:
            circuits.append(c)
    return len(circuits) == 1 and len(circuits[0]) == len(edges)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _components_and_circuits(G: SimpleGraph):
    edges = G.sorted_edges
    game = PebbleGame(G.n)
    uf = _UnionFind(len(edges))
    in_circuit = [False] * len(edges)
    for i, (u, v) in enumerate(edges):
        c = game.insert(i, u, v)
        if c is not None:
            for j in c:
                uf.union(i, j)
                in_circuit[j] = True
    return edges, uf, in_circuit


def m_components(G: SimpleGraph) -> list[frozenset]:
    """Connected components of the planar rigidity matroid, as edge sets."""
    edges, uf, _ = _components_and_circuits(G)
    classes: dict[int, set] = {}
    for i, e in enumerate(edges):
        classes.setdefault(uf.find(i), set()).add(e)
    return sorted((frozenset(c) for c in classes.values()), key=lambda c: min(c))


def is_m_connected(G: SimpleGraph) -> bool:
    if G.m == 0:
        return False
    return len(m_components(G)) == 1


def redundantly_rigid_2d(G: SimpleGraph):
    """Exact planar redundant rigidity: ``(True, None)`` or ``(False, failing edge)``.

    G - e is rigid for every e iff G is rigid and no edge is a coloop, and an
    edge is a coloop iff it lies on no fundamental circuit.
    """
    edges, _, in_circuit = _components_and_circuits(G)
    if not edges:
        return True, None
    if G.n <= 3:
        return False, edges[0]
    if not is_laman_rigid(G):
        return False, edges[0]
    for i, e in enumerate(edges):
        if not in_circuit[i]:
            return False, e
    return True, None


# -- ear decompositions -----------------------------------------------------

@dataclass(frozen=True)
class EarDecomposition:
    ears: tuple  # tuple of frozensets of edges

    def prefix_unions(self) -> list[frozenset]:
        out, acc = [], frozenset()
        for c in self.ears:
            acc = acc | c
            out.append(acc)
        return out

    def to_dict(self) -> dict:
        return {"ears": [[list(e) for e in sorted(c)] for c in self.ears]}


def ear_decomposition(G: SimpleGraph) -> EarDecomposition:
    """Greedy ear decomposition of an M-connected graph.

    Each new ear is a circuit C meeting the current union D whose new part
    C - D is a circuit of the contraction by D, so no circuit meeting D has
    a strictly smaller new part. Among the candidates the smallest new part
    wins, ties broken lexicographically.
    """
    if not is_m_connected(G):
        raise InputError("graph is not M-connected")
    edges = list(G.sorted_edges)
    game = PebbleGame(G.n)
    first = None
    for i, (u, v) in enumerate(edges):
        first = game.insert(i, u, v)
        if first is not None:
            break
    if first is None:
        raise InputError("graph has no rigidity circuit")
    ears = [frozenset(edges[j] for j in first)]
    D = set(first)
    while len(D) < len(edges):
        base = PebbleGame(G.n)
        for j in sorted(D):
            base.insert(j, *edges[j])
        rest = [j for j in range(len(edges)) if j not in D]
        best = None
        for f in rest:
            game = base.copy()
            for j in rest:
                if j != f:
                    game.insert(j, *edges[j])
            circ = game.insert(f, *edges[f])
            if circ is None:
                raise InvariantFault("edge is a coloop of an M-connected graph")
            if not (circ & D):
                continue
            new = sorted(circ - D)
            key = (len(new), new)
            if best is None or key < best[0]:
                best = (key, circ)
        if best is None:
            raise InvariantFault("no ear extends the partial decomposition")
        circ = best[1]
        ears.append(frozenset(edges[j] for j in circ))
        D |= circ
    return EarDecomposition(tuple(ears))


# -- reductions -------------------------------------------------------------

@dataclass(frozen=True)
class Reduction:
    kind: str  # "Degree3Vertex" or "RemovableEdge"
    vertex: int | None = None
    edge: tuple | None = None

    def to_dict(self) -> dict:
        if self.kind == "Degree3Vertex":
            return {"kind": self.kind, "vertex": self.vertex}
        return {"kind": self.kind, "edge": list(self.edge)}


def is_3c_redundant_2d(G: SimpleGraph) -> bool:
    return is_k_connected(G, 3) and redundantly_rigid_2d(G)[0]


def find_reduction(G: SimpleGraph) -> Reduction:
    """A degree-3 vertex, or an edge whose deletion keeps G 3-connected and redundantly rigid."""
    if G.n < 5:
        raise InputError("reduction search needs at least 5 vertices")
    if not is_3c_redundant_2d(G):
        raise InputError("graph is not 3-connected and redundantly rigid in the plane")
    for v in range(G.n):
        if G.degree(v) == 3:
            return Reduction("Degree3Vertex", vertex=v)
    for e in G.sorted_edges:
        H = G.remove_edge(*e)
        if is_3c_redundant_2d(H):
            return Reduction("RemovableEdge", edge=e)
    raise InvariantFault("no degree-3 vertex and no removable edge")
