"""Graph corpora for sweeps: exhaustive small graphs, multigraphs up to isomorphism, random families."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

import networkx as nx
import numpy as np

from .builders import one_extension
from .graph_core import Multigraph, SimpleGraph, complete_graph, is_k_connected
from .rigidity_alg import is_vertex_redundantly_rigid


def _from_nx(g) -> SimpleGraph:
    return SimpleGraph.from_edges(g.number_of_nodes(), g.edges())


@lru_cache(maxsize=None)
def atlas_graphs(max_n: int = 7) -> tuple:
    """Every graph on at most ``max_n`` (<= 7) vertices, one per isomorphism class."""
    if max_n > 7:
        raise ValueError("the graph atlas stops at 7 vertices")
    return tuple(_from_nx(g) for g in nx.graph_atlas_g()[1:] if g.number_of_nodes() <= max_n)


def three_connected_graphs(min_n: int = 4, max_n: int = 7) -> list[SimpleGraph]:
    return [G for G in atlas_graphs(max_n) if G.n >= min_n and is_k_connected(G, 3)]


# -- multigraphs ------------------------------------------------------------

def _multiplicity_vectors(pairs: int, max_total: int, max_mult: int) -> np.ndarray:
    vecs = np.zeros((1, 0), dtype=np.int64)
    for _ in range(pairs):
        totals = vecs.sum(axis=1)
        blocks = []
        for c in range(max_mult + 1):
            ok = totals + c <= max_total
            if not ok.any():
                continue
            sub = vecs[ok]
            blocks.append(np.hstack([sub, np.full((len(sub), 1), c, dtype=np.int64)]))
        vecs = np.vstack(blocks)
    return vecs


def multigraphs_up_to_iso(n: int, max_total: int, max_mult: int | None = None) -> list[Multigraph]:
    """All loopless multigraphs on n labeled-up-to-isomorphism vertices with at most
    ``max_total`` edge copies (and at most ``max_mult`` copies per pair)."""
    pairs = list(itertools.combinations(range(n), 2))
    if not pairs:
        return [Multigraph(n, ())]
    cap = max_total if max_mult is None else min(max_mult, max_total)
    vecs = _multiplicity_vectors(len(pairs), max_total, cap)
    base = cap + 1
    weights = base ** np.arange(len(pairs) - 1, -1, -1, dtype=np.int64)
    index = {p: i for i, p in enumerate(pairs)}
    cols = [np.ascontiguousarray(vecs[:, j]) for j in range(len(pairs))]
    canon = None
    for perm in itertools.permutations(range(n)):
        # position i of the permuted vector holds the multiplicity of the preimage pair
        src = np.empty(len(pairs), dtype=np.int64)
        for i, (a, b) in enumerate(pairs):
            src[index[tuple(sorted((perm[a], perm[b])))]] = i
        code = np.zeros(len(vecs), dtype=np.int64)
        for i, j in enumerate(src):
            code += cols[j] * weights[i]
        canon = code if canon is None else np.minimum(canon, code)
    _, first = np.unique(canon, return_index=True)
    out = []
    for row in vecs[np.sort(first)]:
        edges = [p for p, c in zip(pairs, row) for _ in range(int(c))]
        out.append(Multigraph(n, tuple(edges)))
    return out


# -- random families --------------------------------------------------------

def random_graph(n: int, p: float, rng: random.Random) -> SimpleGraph:
    return SimpleGraph(n, frozenset(e for e in itertools.combinations(range(n), 2) if rng.random() < p))


def random_vertex_redundant(d: int, rng: random.Random, max_n: int = 10, seed: int = 0, attempts: int = 500):
    """Union of random cliques plus random edges, kept once it is vertex-redundantly rigid."""
    for _ in range(attempts):
        n = rng.randint(d + 2, max_n)
        edges = set()
        while True:
            size = rng.randint(d + 1, min(n, d + 3))
            clique = rng.sample(range(n), size)
            edges.update(tuple(sorted(e)) for e in itertools.combinations(clique, 2))
            covered = {v for e in edges for v in e}
            if len(covered) == n and rng.random() < 0.5:
                break
        for e in itertools.combinations(range(n), 2):
            if rng.random() < 0.15:
                edges.add(e)
        G = SimpleGraph(n, frozenset(edges))
        if is_vertex_redundantly_rigid(G, d, seed)[0]:
            return G
    raise RuntimeError("no vertex-redundantly rigid graph found")


def random_one_extensions(d: int, length: int, rng: random.Random) -> SimpleGraph:
    """A random sequence of 1-extensions starting from K_{d+2}."""
    G = complete_graph(d + 2)
    for _ in range(length):
        u, v = rng.choice(G.sorted_edges)
        extra = rng.sample([x for x in range(G.n) if x not in (u, v)], d - 1)
        G = one_extension(G, d, (u, v), extra)
    return G


def random_m_connected(rng: random.Random, max_n: int = 10) -> SimpleGraph:
    """Random M-connected graph: a 1-extension chain from K4 with a few extra edges."""
    from .sparsity2d import is_m_connected

    while True:
        n = rng.randint(4, max_n)
        G = random_one_extensions(2, n - 4, rng)
        missing = [e for e in itertools.combinations(range(G.n), 2) if e not in G.edges]
        extra = rng.sample(missing, min(len(missing), rng.randint(0, 3)))
        G = G.add_edges(extra)
        if is_m_connected(G):
            return G
