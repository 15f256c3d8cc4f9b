"""Edge-disjoint spanning trees by graphic matroid union.

``tree_packing`` grows k forests greedily, inserting each edge copy along a
shortest augmenting path in the exchange graph. When the union stops
short of k(n-1) edges, the copies reachable from the uncovered ones span
a vertex partition with fewer than k(|P|-1) crossing copies, which is the
dual certificate.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import comb

from .errors import InputError
from .graph_core import Multigraph


@dataclass(frozen=True)
class TreePacking:
    k: int
    assignment: tuple  # tree index in 1..k per edge copy, 0 if unused

    def trees(self) -> list[list[int]]:
        out = [[] for _ in range(self.k)]
        for i, t in enumerate(self.assignment):
            if t:
                out[t - 1].append(i)
        return out

    def to_dict(self, H: Multigraph | None = None) -> dict:
        d = {"kind": "TreePacking", "k": self.k, "assignment": list(self.assignment)}
        if H is not None:
            d["trees"] = [[list(H.edges[i]) for i in t] for t in self.trees()]
        return d


@dataclass(frozen=True)
class PartitionWitness:
    k: int
    parts: tuple  # tuple of sorted vertex tuples
    crossing: int

    def to_dict(self, H: Multigraph | None = None) -> dict:
        return {
            "kind": "PartitionWitness",
            "k": self.k,
            "parts": [list(p) for p in self.parts],
            "crossing": self.crossing,
            "required": self.k * (len(self.parts) - 1),
        }


def _tree_path(adj: dict, s: int, t: int):
    """Edge ids on the path from s to t in a forest, or None when disconnected."""
    prev = {s: None}
    q = deque([s])
    while q:
        x = q.popleft()
        if x == t:
            break
        for y, eid in adj.get(x, ()):
            if y not in prev:
                prev[y] = (x, eid)
                q.append(y)
    if t not in prev:
        return None
    path = []
    while prev[t] is not None:
        t, eid = prev[t]
        path.append(eid)
    return path


class _ForestUnion:
    def __init__(self, H: Multigraph, k: int):
        self.H = H
        self.k = k
        self.owner = [0] * H.m  # forest index 1..k, 0 = uncovered
        self._adj = None

    def _adjacency(self):
        if self._adj is None:
            adj = [dict() for _ in range(self.k + 1)]
            for eid, f in enumerate(self.owner):
                if f:
                    u, v = self.H.edges[eid]
                    adj[f].setdefault(u, []).append((v, eid))
                    adj[f].setdefault(v, []).append((u, eid))
            self._adj = adj
        return self._adj

    def search(self, sources):
        """BFS in the exchange graph. Returns (path, labeled)."""
        adj = self._adjacency()
        label = {s: None for s in sources}
        q = deque(sources)
        while q:
            x = q.popleft()
            u, v = self.H.edges[x]
            for f in range(1, self.k + 1):
                if f == self.owner[x]:
                    continue
                cyc = _tree_path(adj[f], u, v)
                if cyc is None:
                    return (x, f), label
                for y in sorted(cyc):
                    if y not in label:
                        label[y] = (x, f)
                        q.append(y)
        return None, label

    def augment(self, end, label):
        x, f = end
        while True:
            prev = label[x]
            self.owner[x] = f
            if prev is None:
                break
            x, f = prev
        self._adj = None


def tree_packing(H: Multigraph, k: int):
    """k edge-disjoint spanning trees of H, or a partition certifying there are none."""
    if k <= 0:
        raise InputError("tree count k must be positive")
    union = _ForestUnion(H, k)
    size = 0
    target = k * (H.n - 1)
    for eid in range(H.m):
        if size == target:
            break
        end, label = union.search([eid])
        if end is not None:
            union.augment(end, label)
            size += 1
    if size == target:
        return TreePacking(k, tuple(union.owner))
    uncovered = [i for i, f in enumerate(union.owner) if not f]
    _, label = union.search(uncovered)
    return _partition_from(H, k, set(label))


def _partition_from(H: Multigraph, k: int, span: set) -> PartitionWitness:
    parent = list(range(H.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for eid in span:
        a, b = (find(x) for x in H.edges[eid])
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[int, list] = {}
    for v in range(H.n):
        groups.setdefault(find(v), []).append(v)
    parts = tuple(sorted(tuple(g) for g in groups.values()))
    crossing = sum(find(u) != find(v) for u, v in H.edges)
    return PartitionWitness(k, parts, crossing)


def verify_tree_packing(H: Multigraph, packing: TreePacking) -> bool:
    """Each class must be a spanning tree of H."""
    if len(packing.assignment) != H.m:
        return False
    for tree in packing.trees():
        if len(tree) != H.n - 1:
            return False
        parent = list(range(H.n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for eid in tree:
            a, b = (find(x) for x in H.edges[eid])
            if a == b:
                return False
            parent[a] = b
    return True


def verify_partition_witness(H: Multigraph, w: PartitionWitness) -> bool:
    where = {}
    for i, part in enumerate(w.parts):
        for v in part:
            if v in where:
                return False
            where[v] = i
    if sorted(where) != list(range(H.n)):
        return False
    crossing = sum(where[u] != where[v] for u, v in H.edges)
    return crossing == w.crossing and crossing < w.k * (len(w.parts) - 1)


# -- multiplicity graphs ----------------------------------------------------

def _resolve_edge(H: Multigraph, e) -> int:
    if isinstance(e, int):
        if not 0 <= e < H.m:
            raise InputError(f"edge index {e} out of range")
        return e
    pair = tuple(sorted(e))
    for i, f in enumerate(H.edges):
        if f == pair:
            return i
    raise InputError(f"edge {pair} not in graph")


def multiplicity_expand(H: Multigraph, base: int, special=None) -> Multigraph:
    """Replace every edge copy by ``base`` parallel copies; ``special = (e, mult)`` overrides one.

    ``e`` is an edge index into ``H.edges`` or a vertex pair (its first copy).
    Copies are tagged ``(parent index, copy index)``.
    """
    if base < 0:
        raise InputError("base multiplicity must be non-negative")
    target, mult = None, None
    if special is not None:
        target, mult = _resolve_edge(H, special[0]), special[1]
        if mult < 0:
            raise InputError("special multiplicity must be non-negative")
    edges, tags = [], []
    for i, e in enumerate(H.edges):
        c = mult if i == target else base
        for j in range(c):
            edges.append(e)
            tags.append((i, j))
    return Multigraph(H.n, tuple(edges), tuple(tags))


def _parallel_representatives(H: Multigraph) -> list[int]:
    seen, reps = set(), []
    for i, e in enumerate(H.edges):
        if e not in seen:
            seen.add(e)
            reps.append(i)
    return reps


@dataclass(frozen=True)
class PackingCheck:
    ok: bool
    certificate: object  # TreePacking | PartitionWitness
    graph: Multigraph

    def to_dict(self) -> dict:
        return {"ok": self.ok, "certificate": self.certificate.to_dict(self.graph)}


@dataclass(frozen=True)
class GlobalPackingCheck:
    ok: bool
    base: PackingCheck
    per_edge: tuple  # ((edge index, PackingCheck), ...)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "rigid": self.base.to_dict(),
            "per_edge": [
                {"edge_index": i, **c.to_dict()} for i, c in self.per_edge
            ],
        }


def _check(G: Multigraph, k: int) -> PackingCheck:
    cert = tree_packing(G, k)
    return PackingCheck(isinstance(cert, TreePacking), cert, G)


def body_bar_rigid_check(H: Multigraph, d: int) -> PackingCheck:
    return _check(H, comb(d + 1, 2))


def body_bar_global_check(H: Multigraph, d: int) -> GlobalPackingCheck:
    """H - e packs (d+1 choose 2) spanning trees for every edge copy e.

    One copy per parallel class is tested. H itself must also pack, which
    only matters when H has no edges.
    """
    k = comb(d + 1, 2)
    base = _check(H, k)
    per_edge = []
    ok = base.ok
    if ok:
        for i in _parallel_representatives(H):
            c = _check(H.remove_copy(i), k)
            per_edge.append((i, c))
            if not c.ok:
                ok = False
                break
    return GlobalPackingCheck(ok, base, tuple(per_edge))


def body_hinge_rigid_check(H: Multigraph, d: int) -> PackingCheck:
    D = comb(d + 1, 2)
    return _check(multiplicity_expand(H, D - 1), D)


def hinge_deletion_graph(H: Multigraph, d: int, e) -> Multigraph:
    """(D-1)(H-e) + (D-3)e with D = (d+1 choose 2)."""
    if d < 2:
        raise InputError("body-hinge frameworks need d >= 2")
    D = comb(d + 1, 2)
    return multiplicity_expand(H, D - 1, special=(e, D - 3))


def body_hinge_global_check(H: Multigraph, d: int) -> GlobalPackingCheck:
    if d < 2:
        raise InputError("body-hinge frameworks need d >= 2")
    D = comb(d + 1, 2)
    base = body_hinge_rigid_check(H, d)
    per_edge = []
    ok = base.ok
    if ok:
        for i in _parallel_representatives(H):
            c = _check(hinge_deletion_graph(H, d, i), D)
            per_edge.append((i, c))
            if not c.ok:
                ok = False
                break
    return GlobalPackingCheck(ok, base, tuple(per_edge))
