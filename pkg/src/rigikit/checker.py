"""Independent re-verification of certificates.

Everything here reads only step payloads and recomputes each claim from
scratch with the algebraic rank tests (never the pebble game), at its own
random configurations. A positive rigidity claim confirmed at a random
point is certain; rank deficits carry the usual one-sided error.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .builders import ChainSpec, body_bar_graph, body_hinge_graph, k_chain, vertex_clique_replace
from .graph_core import Multigraph, SimpleGraph, components, verify_rooted_minor, vertex_connectivity
from .packing import (
    PartitionWitness,
    TreePacking,
    hinge_deletion_graph,
    multiplicity_expand,
    verify_partition_witness,
    verify_tree_packing,
)
from .rigidity_alg import (
    generic_rank,
    ght_global_rigidity_test,
    is_redundantly_rigid,
    is_rigid,
)
from .sparsity2d import EarDecomposition, Reduction

CHECK_SEED = 104729

TERMINAL = {"CompleteSmall", "VertexRedundant", "D2Characterization", "KChain", "Combination", "BodyBar", "BodyHinge"}


@dataclass
class CheckReport:
    ok: bool = True
    messages: list = field(default_factory=list)

    def fail(self, msg: str):
        self.ok = False
        self.messages.append(msg)

    def require(self, cond: bool, msg: str):
        if not cond:
            self.fail(msg)
        return cond


def _graph(p: dict) -> SimpleGraph:
    return SimpleGraph.from_edges(p["n"], p["edges"])


def _same(G: SimpleGraph, H: SimpleGraph) -> bool:
    return G.n == H.n and G.edges == H.edges


def _kappa_at_least(G: SimpleGraph, k: int) -> bool:
    return G.n >= k + 1 and vertex_connectivity(G, bound=k)[0] >= k


def _all_vertices_rigid(G: SimpleGraph, d: int, seed: int) -> bool:
    return all(is_rigid(G.delete_vertex(v), d, seed) for v in range(G.n))


# -- single steps -----------------------------------------------------------

def check_step(step, seed: int = CHECK_SEED, report: CheckReport | None = None) -> CheckReport:
    """Re-verify the claims a step makes about its own payload."""
    r = report or CheckReport()
    p = step.payload if hasattr(step, "payload") else step["payload"]
    rule = step.rule if hasattr(step, "rule") else step["rule"]
    d = p.get("dim")
    if rule == "CompleteSmall":
        G = _graph(p["graph"])
        r.require(G.is_complete() and G.n <= d + 1, "CompleteSmall: graph not complete on <= d+1 vertices")
    elif rule == "VertexRedundant":
        G = _graph(p["graph"])
        r.require(G.n >= 2 and _all_vertices_rigid(G, d, seed), "VertexRedundant: some G - v is not rigid")
    elif rule == "D2Characterization":
        G = _graph(p["graph"])
        r.require(d == 2, "D2Characterization outside the plane")
        r.require(G.n >= 4 and _kappa_at_least(G, 3), "D2Characterization: not 3-connected")
        r.require(is_redundantly_rigid(G, 2, seed)[0], "D2Characterization: not redundantly rigid")
    elif rule == "VertexRemovalLemma":
        G, after, v = _graph(p["graph_before"]), _graph(p["graph_after"]), p["vertex"]
        r.require(G.degree(v) > d, f"VertexRemovalLemma: degree of {v} is at most d")
        r.require(is_rigid(G.delete_vertex(v), d, seed), f"VertexRemovalLemma: G - {v} not rigid")
        r.require(_same(vertex_clique_replace(G, v), after), "VertexRemovalLemma: wrong replacement graph")
    elif rule == "EdgeDeletion":
        G, after = _graph(p["graph_before"]), _graph(p["graph_after"])
        e = tuple(p["edge"])
        r.require(G.has_edge(*e) and _same(G.remove_edge(*e), after), "EdgeDeletion: graph_after != G - e")
    elif rule == "HendricksonFail":
        _check_hendrickson_fail(p, seed, r)
    elif rule == "KChain":
        _check_kchain(p, seed, r)
    elif rule == "StressRank":
        G = _graph(p["graph"])
        res = ght_global_rigidity_test(G, d, p["seed"], p["trials"])
        r.require(res.status == p["status"], "StressRank: re-run disagrees")
    elif rule == "Combination":
        _check_combination(p, seed, r)
    elif rule in ("BodyBar", "BodyHinge"):
        _check_body(rule, p, r)
    else:
        r.fail(f"unknown rule {rule}")
    return r


def _check_hendrickson_fail(p, seed, r):
    G, d = _graph(p["graph"]), p["dim"]
    reason = p["reason"]
    if reason == "not_rigid":
        u, v = p["missing_edge"]
        r.require(G.n <= d + 1 and not G.has_edge(u, v), "HendricksonFail: small graph is complete")
    elif reason == "not_connected":
        sep = p["separator"]
        r.require(G.n >= d + 2, "HendricksonFail: too few vertices")
        r.require(len(sep) <= d, "HendricksonFail: separator larger than d")
        r.require(len(components(G, sep)) >= 2, "HendricksonFail: separator does not disconnect")
    elif reason == "not_redundantly_rigid":
        e = tuple(p["edge"])
        r.require(G.has_edge(*e), "HendricksonFail: edge missing")
        r.require(not is_rigid(G.remove_edge(*e), d, seed), "HendricksonFail: G - e is rigid")
    else:
        r.fail(f"HendricksonFail: unknown reason {reason}")


def _check_kchain(p, seed, r):
    G, d, v = _graph(p["graph"]), p["dim"], p["vertex"]
    r.require(_same(k_chain(ChainSpec(tuple(p["sizes"]))), G), "KChain: graph is not the chain")
    r.require(_kappa_at_least(G, d + 1), "KChain: not (d+1)-connected")
    r.require(is_rigid(G.delete_vertex(v), d, seed), "KChain: G - v not rigid")
    R = _graph(p["graph_after"])
    r.require(_same(vertex_clique_replace(G, v), R), "KChain: wrong replacement graph")
    clique = set(p["clique"])
    r.require(len(clique) >= d + 1, "KChain: clique too small")
    r.require(all(R.has_edge(a, b) for a, b in itertools.combinations(sorted(clique), 2)), "KChain: start is not a clique")
    placed = set(clique)
    for x in p["order"]:
        if not r.require(len(R.adj[x] & placed) >= d + 1, f"KChain: vertex {x} has too few earlier neighbours"):
            break
        placed.add(x)
    r.require(placed == set(range(R.n)), "KChain: order does not cover the graph")


def _check_combination(p, seed, r):
    from .certify import Piece  # payload shape only

    d = p["dim"]
    G1 = Piece.make(p["g1"]["vertices"], p["g1"]["edges"])
    G2 = Piece.make(p["g2"]["vertices"], p["g2"]["edges"])
    X = set(p["x"])
    H = [tuple(e) for e in p["h"]]
    r.require(X == set(G1.vertices & G2.vertices), "Combination: X is not the common vertex set")
    r.require(len(X) >= d + 1, "Combination: |X| < d+1")
    r.require(is_rigid(G1.local(), d, seed), "Combination: G1 not rigid")
    N = max(G1.vertices | G2.vertices) + 1
    w = {int(k): v for k, v in p["witness"].items()}
    r.require(verify_rooted_minor(SimpleGraph(N, G2.edges), X, H, w, vertices=G2.vertices), "Combination: bad rooted minor")
    KX = list(itertools.combinations(sorted(X), 2))
    if p.get("pairing") == "g1+h,g2+kx":
        targets = (G1.local(H), G2.local(KX))
    else:
        targets = (G1.local(KX), G2.local(H))
    for G, v in zip(targets, p["verdicts"]):
        sub = verify_verdict_dict(G, v, seed)
        r.require(sub.ok and v["status"] in ("GloballyRigid", "ProbablyGloballyRigid"), "Combination: sub-verdict fails")
        r.messages.extend(sub.messages)


def _packing_from(d: dict, k: int):
    if d["kind"] == "TreePacking":
        return TreePacking(k, tuple(d["assignment"]))
    return PartitionWitness(k, tuple(tuple(x) for x in d["parts"]), d["crossing"])


def _check_body(rule, p, r):
    H = Multigraph(p["h"]["n"], tuple(tuple(e) for e in p["h"]["edges"]))
    d = p["dim"]
    from math import comb

    D = comb(d + 1, 2)
    base = multiplicity_expand(H, D - 1) if rule == "BodyHinge" else H
    cert = _packing_from(p["rigid"]["certificate"], D)
    ok = isinstance(cert, TreePacking)
    r.require(
        (verify_tree_packing if ok else verify_partition_witness)(base, cert),
        f"{rule}: base certificate invalid",
    )
    all_ok = ok
    for entry in p["per_edge"]:
        i = entry["edge_index"]
        G = hinge_deletion_graph(H, d, i) if rule == "BodyHinge" else H.remove_copy(i)
        c = _packing_from(entry["certificate"], D)
        good = isinstance(c, TreePacking)
        all_ok = all_ok and good
        r.require(
            (verify_tree_packing if good else verify_partition_witness)(G, c),
            f"{rule}: certificate for edge {i} invalid",
        )
    if p["ok"]:
        reps = {e: i for i, e in reversed(list(enumerate(H.edges)))}
        covered = {entry["edge_index"] for entry in p["per_edge"]}
        r.require(all_ok and set(reps.values()) <= covered, f"{rule}: not every edge class certified")
    else:
        r.require(not all_ok, f"{rule}: failure claimed but every certificate packs")


# -- chains -----------------------------------------------------------------

def verify_verdict_dict(G: SimpleGraph, v: dict, seed: int = CHECK_SEED) -> CheckReport:
    from .certify import CertificateStep, Verdict

    steps = tuple(CertificateStep(s["rule"], s["payload"]) for s in v["steps"])
    return verify_verdict(G, Verdict(v["status"], v["dim"], steps, v.get("seed", 0), v.get("error_bound", "0")), seed)


def _step_graph(step) -> SimpleGraph | None:
    p = step.payload
    for key in ("graph_before", "graph"):
        if key in p:
            return _graph(p[key])
    return None


def verify_verdict(G: SimpleGraph, verdict, seed: int = CHECK_SEED) -> CheckReport:
    """Re-check a verdict for G from its steps alone."""
    r = CheckReport()
    status, steps = verdict.status, verdict.steps
    if status == "Unknown":
        return r
    if not steps:
        r.fail(f"{status} without steps")
        return r
    if status in ("ProbablyGloballyRigid", "ProbablyNot") and steps[-1].rule == "StressRank":
        p = steps[-1].payload
        r.require(_same(_graph(p["graph"]), G), "StressRank: graph mismatch")
        check_step(steps[-1], seed, r)
        r.require(p["status"] == status, "StressRank: status mismatch")
        return r
    if status == "NotGloballyRigid":
        step = steps[0]
        r.require(len(steps) == 1 and step.rule in ("HendricksonFail", "BodyBar"), "NotGloballyRigid needs one necessary-condition step")
        if step.rule == "HendricksonFail":
            r.require(_same(_graph(step.payload["graph"]), G), "HendricksonFail: graph mismatch")
        else:
            r.require(_same(body_bar_graph(_multi(step.payload["h"]), verdict.dim).graph, G), "BodyBar: graph mismatch")
        check_step(step, seed, r)
        return r
    # positive chains
    current = G
    for i, step in enumerate(steps):
        last = i == len(steps) - 1
        if step.rule in ("VertexRemovalLemma", "EdgeDeletion"):
            r.require(_same(_graph(step.payload["graph_before"]), current), f"step {i}: chain broken")
            if step.rule == "EdgeDeletion":
                r.fail("EdgeDeletion is a deconstruction step, not a verdict step")
            check_step(step, seed, r)
            current = _graph(step.payload["graph_after"])
            r.require(not last, "chain ends without a terminal rule")
        elif step.rule in TERMINAL:
            r.require(last, f"step {i}: terminal rule {step.rule} is not last")
            if step.rule == "Combination":
                r.require(_same(_combination_union(step.payload), current), "Combination: union mismatch")
            elif step.rule == "BodyBar":
                r.require(_same(body_bar_graph(_multi(step.payload["h"]), verdict.dim).graph, current), "BodyBar: graph mismatch")
            elif step.rule == "BodyHinge":
                r.require(_same(body_hinge_graph(_multi(step.payload["h"]), verdict.dim).graph, current), "BodyHinge: graph mismatch")
            else:
                r.require(_same(_step_graph(step), current), f"{step.rule}: graph mismatch")
            check_step(step, seed, r)
        else:
            r.fail(f"step {i}: rule {step.rule} cannot back {status}")
    if status == "ProbablyGloballyRigid":
        r.require(steps[-1].rule == "Combination", "ProbablyGloballyRigid chain must end in a stress test or combination")
    return r


def _multi(p) -> Multigraph:
    return Multigraph(p["n"], tuple(tuple(e) for e in p["edges"]))


def _combination_union(p) -> SimpleGraph:
    from .certify import Piece

    V = sorted(set(p["g1"]["vertices"]) | set(p["g2"]["vertices"]))
    U = Piece.make(V, [tuple(e) for e in p["g1"]["edges"]] + [tuple(e) for e in p["g2"]["edges"]])
    return U.local()


def verify_deconstruction(G: SimpleGraph, steps, seed: int = CHECK_SEED) -> CheckReport:
    """Every step valid, every graph 3-connected and redundantly rigid, ending at K4."""
    r = CheckReport()
    current = G
    r.require(_kappa_at_least(G, 3) and is_redundantly_rigid(G, 2, seed)[0], "start graph not 3-connected redundantly rigid")
    for i, step in enumerate(steps):
        r.require(step.rule in ("VertexRemovalLemma", "EdgeDeletion"), f"step {i}: unexpected rule {step.rule}")
        r.require(_same(_graph(step.payload["graph_before"]), current), f"step {i}: chain broken")
        check_step(step, seed, r)
        after = _graph(step.payload["graph_after"])
        r.require(
            _kappa_at_least(after, 3) and is_redundantly_rigid(after, 2, seed)[0],
            f"step {i}: result not 3-connected redundantly rigid",
        )
        r.require((after.n, after.m) < (current.n, current.m), f"step {i}: no progress")
        current = after
    r.require(current.n == 4 and current.is_complete(), "deconstruction does not end at K4")
    return r


# -- matroid structure ------------------------------------------------------

def _rank_of(n: int, edges, seed: int) -> int:
    return generic_rank(SimpleGraph(n, frozenset(edges)), 2, seed) if edges else 0


def _is_circuit(n: int, C, seed: int) -> bool:
    C = list(C)
    if _rank_of(n, C, seed) != len(C) - 1:
        return False
    return all(_rank_of(n, C[:i] + C[i + 1:], seed) == len(C) - 1 for i in range(len(C)))


def verify_ear_decomposition(G: SimpleGraph, ears: EarDecomposition, seed: int = CHECK_SEED) -> CheckReport:
    """Each ear a circuit meeting the previous union with new edges, whose new part
    is a circuit of the contraction by that union; the ears cover E."""
    r = CheckReport()
    n = G.n
    D: set = set()
    for i, C in enumerate(ears.ears):
        C = set(C)
        r.require(C <= G.edges, f"ear {i}: edges outside G")
        r.require(_is_circuit(n, C, seed), f"ear {i}: not a circuit")
        if i == 0:
            D = set(C)
            continue
        r.require(bool(C & D), f"ear {i}: does not meet the previous union")
        new = sorted(C - D)
        r.require(bool(new), f"ear {i}: adds no edges")
        rD = _rank_of(n, D, seed)
        # new part dependent in the contraction, every proper subset independent
        r.require(_rank_of(n, D | set(new), seed) - rD < len(new), f"ear {i}: new part independent mod D")
        for j in range(len(new)):
            rest = new[:j] + new[j + 1:]
            r.require(
                _rank_of(n, D | set(rest), seed) - rD == len(rest),
                f"ear {i}: new part is not minimal mod D",
            )
        D |= C
    r.require(D == set(G.edges), "ears do not cover E")
    return r


def verify_reduction(G: SimpleGraph, red: Reduction, seed: int = CHECK_SEED) -> CheckReport:
    r = CheckReport()
    if red.kind == "Degree3Vertex":
        r.require(G.degree(red.vertex) == 3, "Degree3Vertex: degree is not 3")
    else:
        H = G.remove_edge(*red.edge)
        r.require(_kappa_at_least(H, 3), "RemovableEdge: G - e not 3-connected")
        r.require(is_redundantly_rigid(H, 2, seed)[0], "RemovableEdge: G - e not redundantly rigid")
    return r
