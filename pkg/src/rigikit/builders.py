"""Graph constructions: body-bar and body-hinge graphs, k-chains, extensions.

Layout vertex numbering is fixed: bodies come first in H-vertex order, and
inside a body-bar body the d+1 core vertices precede the bar ends (in
H-edge order). Body-hinge hinge vertices follow all bodies, in H-edge
order, d-1 per edge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import InputError
from .graph_core import Multigraph, SimpleGraph, _norm
from .packing import TreePacking, hinge_deletion_graph, tree_packing
from .rigidity_alg import Framework, infinitesimal_rigidity_exact


@dataclass(frozen=True)
class BodyBarLayout:
    graph: SimpleGraph
    dim: int
    body_map: tuple  # body_map[v] = tuple of G_H vertices
    bar_map: tuple  # bar_map[i] = G_H edge for H edge copy i

    def to_dict(self) -> dict:
        return {
            "kind": "BodyBar",
            "dim": self.dim,
            "graph": self.graph.to_dict(),
            "bodies": [list(b) for b in self.body_map],
            "bars": [list(e) for e in self.bar_map],
        }


@dataclass(frozen=True)
class BodyHingeLayout:
    graph: SimpleGraph
    dim: int
    body_map: tuple
    hinge_map: tuple  # hinge_map[i] = tuple of d-1 hinge vertices for H edge copy i

    def to_dict(self) -> dict:
        return {
            "kind": "BodyHinge",
            "dim": self.dim,
            "graph": self.graph.to_dict(),
            "bodies": [list(b) for b in self.body_map],
            "hinges": [list(h) for h in self.hinge_map],
        }


def _as_multigraph(H) -> Multigraph:
    if isinstance(H, Multigraph):
        return H
    return H.to_multigraph()


def body_bar_graph(H, d: int) -> BodyBarLayout:
    """Each vertex v becomes a clique on d+1+deg(v) vertices; each edge copy becomes one bar."""
    H = _as_multigraph(H)
    if d < 1:
        raise InputError("dimension must be at least 1")
    bodies, ends = [], {}
    nxt = 0
    for v in range(H.n):
        core = list(range(nxt, nxt + d + 1))
        nxt += d + 1
        body = list(core)
        for i, e in enumerate(H.edges):
            if v in e:
                ends[(i, v)] = nxt
                body.append(nxt)
                nxt += 1
        bodies.append(tuple(body))
    edges = set()
    for body in bodies:
        edges.update(itertools.combinations(body, 2))
    bars = []
    for i, (u, v) in enumerate(H.edges):
        bar = _norm(ends[(i, u)], ends[(i, v)])
        bars.append(bar)
        edges.add(bar)
    return BodyBarLayout(SimpleGraph(nxt, frozenset(edges)), d, tuple(bodies), tuple(bars))


def body_hinge_graph(H, d: int) -> BodyHingeLayout:
    """Bodies are (d+1)-cliques; each edge copy adds d-1 hinge vertices joined to both bodies."""
    H = _as_multigraph(H)
    if d < 2:
        raise InputError("body-hinge graphs need d >= 2")
    bodies = [tuple(range(v * (d + 1), (v + 1) * (d + 1))) for v in range(H.n)]
    nxt = H.n * (d + 1)
    edges = set()
    for body in bodies:
        edges.update(itertools.combinations(body, 2))
    hinges = []
    for u, v in H.edges:
        hinge = tuple(range(nxt, nxt + d - 1))
        nxt += d - 1
        hinges.append(hinge)
        for h in hinge:
            for b in bodies[u] + bodies[v]:
                edges.add((b, h))
    return BodyHingeLayout(SimpleGraph(nxt, frozenset(edges)), d, tuple(bodies), tuple(hinges))


# -- standard-basis body-hinge realization ----------------------------------

@dataclass(frozen=True)
class StandardConfig:
    framework: Framework
    layout: BodyHingeLayout
    edge: int | None  # H edge copy whose last hinge vertex was removed
    removed: int | None  # G_H vertex removed
    pairs: dict  # (k, l) -> tree index of the packing
    hinge_pairs: dict  # H edge copy -> (k, l) missed by it

    def to_dict(self) -> dict:
        return {
            "edge_index": self.edge,
            "removed_vertex": self.removed,
            "graph": self.framework.graph.to_dict(),
            "config": [[str(x) for x in p] for p in self.framework.config],
            "tree_pairs": {f"{k},{l}": t for (k, l), t in sorted(self.pairs.items())},
            "hinge_pairs": {str(i): list(p) for i, p in sorted(self.hinge_pairs.items())},
        }


def _basis_point(i: int, d: int) -> tuple:
    """Point e_i for 1 <= i <= d, and the origin for i = d+1."""
    return tuple(Fraction(int(j == i - 1)) for j in range(d))


def standard_body_hinge_config(H, d: int, e=None, packing: TreePacking | None = None) -> StandardConfig:
    """Exact configuration of G_H minus the last hinge vertex of ``e``.

    Body vertex v_i sits at e_i (e_{d+1} is the origin). The trees of a
    packing of (D-1)(H-e) + (D-3)e are matched to index pairs (k, l) so that
    the three pairs among {d-1, d, d+1} get trees avoiding e's copies; each
    other hinge f sits on the basis points outside the first pair whose tree
    misses f, and e keeps d-2 hinge vertices on e_1..e_{d-2}.
    """
    H = _as_multigraph(H)
    if d < 2:
        raise InputError("body-hinge frameworks need d >= 2")
    if e is None:
        if H.m:
            raise InputError("an edge must be chosen when H has edges")
        layout = body_hinge_graph(H, d)
        pts = [_basis_point(i + 1, d) for _ in range(H.n) for i in range(d + 1)]
        F = Framework(layout.graph, d, pts, modulus=None)
        return StandardConfig(F, layout, None, None, {}, {})
    if isinstance(e, int):
        ei = e
        if not 0 <= ei < H.m:
            raise InputError(f"edge index {e} out of range")
    else:
        pair = tuple(sorted(e))
        if pair not in H.edges:
            raise InputError(f"edge {pair} not in graph")
        ei = H.edges.index(pair)
    D = comb(d + 1, 2)
    X = hinge_deletion_graph(H, d, ei)
    if packing is None:
        packing = tree_packing(X, D)
        if not isinstance(packing, TreePacking):
            raise InputError("expanded graph has no packing of (d+1 choose 2) spanning trees for this edge")
    if packing.k != D or len(packing.assignment) != X.m:
        raise InputError("packing does not match the expanded graph")
    parents_in = [set() for _ in range(D + 1)]
    for c, t in enumerate(packing.assignment):
        if t:
            parents_in[t].add(X.tags[c][0])
    avoid = [t for t in range(1, D + 1) if ei not in parents_in[t]]
    if len(avoid) < 3:
        raise InputError("no three trees avoid the copies of the chosen edge")
    special = [(d - 1, d), (d - 1, d + 1), (d, d + 1)]
    all_pairs = list(itertools.combinations(range(1, d + 2), 2))
    pairs = dict(zip(special, avoid[:3]))
    rest = [t for t in range(1, D + 1) if t not in avoid[:3]]
    pairs.update(zip([p for p in all_pairs if p not in special], rest))

    layout = body_hinge_graph(H, d)
    G = layout.graph
    config = [None] * G.n
    for v, body in enumerate(layout.body_map):
        for i, x in enumerate(body):
            config[x] = _basis_point(i + 1, d)
    hinge_pairs = {}
    for f, hinge in enumerate(layout.hinge_map):
        if f == ei:
            idx = list(range(1, d - 1))
        else:
            kl = next((p for p in all_pairs if f not in parents_in[pairs[p]]), None)
            if kl is None:
                raise InputError(f"every tree uses a copy of edge {f}")
            hinge_pairs[f] = kl
            idx = [i for i in range(1, d + 2) if i not in kl]
        for x, i in zip(hinge, idx):
            config[x] = _basis_point(i, d)
    removed = layout.hinge_map[ei][-1]
    G1 = G.delete_vertex(removed)
    pts = [config[x] for x in range(G.n) if x != removed]
    F = Framework(G1, d, pts, modulus=None)
    return StandardConfig(F, layout, ei, removed, pairs, hinge_pairs)


def verify_standard_config_rigid(F) -> bool:
    if isinstance(F, StandardConfig):
        F = F.framework
    return infinitesimal_rigidity_exact(F)[0]


# -- extensions and small families ------------------------------------------

def zero_extension(G: SimpleGraph, d: int, nbrs) -> SimpleGraph:
    nbrs = list(nbrs)
    if len(nbrs) != d or len(set(nbrs)) != d:
        raise InputError(f"0-extension needs {d} distinct neighbours")
    if any(not 0 <= v < G.n for v in nbrs):
        raise InputError("neighbour out of range")
    new = G.n
    return SimpleGraph(G.n + 1, G.edges | {(v, new) for v in nbrs})


def one_extension(G: SimpleGraph, d: int, e, extra) -> SimpleGraph:
    u, v = sorted(e)
    extra = list(extra)
    if not G.has_edge(u, v):
        raise InputError(f"edge ({u}, {v}) not in graph")
    if len(extra) != d - 1 or len(set(extra)) != d - 1 or {u, v} & set(extra):
        raise InputError(f"1-extension needs {d - 1} distinct extra neighbours other than {u}, {v}")
    if any(not 0 <= w < G.n for w in extra):
        raise InputError("neighbour out of range")
    new = G.n
    edges = (G.edges - {(u, v)}) | {(w, new) for w in [u, v, *extra]}
    return SimpleGraph(G.n + 1, edges)


@dataclass(frozen=True)
class ChainSpec:
    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if len(sizes) < 2 or min(sizes) < 1:
            raise InputError("a chain needs at least two parts, each non-empty")
        object.__setattr__(self, "sizes", sizes)

    def parts(self) -> list[range]:
        out, start = [], 0
        for s in self.sizes:
            out.append(range(start, start + s))
            start += s
        return out


def k_chain(spec: ChainSpec) -> SimpleGraph:
    parts = spec.parts()
    edges = set()
    for a, b in zip(parts, parts[1:]):
        edges.update((x, y) for x in a for y in b)
    return SimpleGraph(sum(spec.sizes), frozenset(edges))


def vertex_clique_replace(G: SimpleGraph, v: int) -> SimpleGraph:
    """G - v with the neighbourhood of v completed; survivors keep their relative order."""
    if not 0 <= v < G.n:
        raise InputError(f"vertex {v} out of range")
    nbrs = sorted(G.neighbors(v))
    H = G.add_edges(itertools.combinations(nbrs, 2))
    return H.delete_vertex(v)
