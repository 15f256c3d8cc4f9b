"""Global rigidity verdicts with re-checkable certificate chains.

A verdict is exact (``GloballyRigid`` / ``NotGloballyRigid``) only when a
chain of theorem applications backs it; stress-rank evidence yields the
``Probably*`` states and never upgrades to an exact one.

Certificate chains are linear: a ``VertexRemovalLemma`` step hands its
replacement graph to the next step, and the chain ends in a terminal rule
(``CompleteSmall``, ``VertexRedundant``, ``D2Characterization``). Every
payload carries the graphs it talks about so that :mod:`rigikit.checker`
can re-verify a chain without engine state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from .errors import InputError, InvariantFault
from .graph_core import Multigraph, SimpleGraph, verify_rooted_minor, vertex_connectivity
from .rigidity_alg import (
    DEFAULT_TRIALS,
    INAPPLICABLE,
    PROBABLY_GR,
    ght_global_rigidity_test,
    is_redundantly_rigid,
    is_rigid,
    is_vertex_redundantly_rigid,
)
from .builders import ChainSpec, k_chain, vertex_clique_replace
from .packing import body_bar_global_check, body_hinge_global_check
from .sparsity2d import find_reduction, is_3c_redundant_2d, is_laman_rigid, redundantly_rigid_2d

GLOBALLY_RIGID = "GloballyRigid"
NOT_GLOBALLY_RIGID = "NotGloballyRigid"
PROBABLY_GLOBALLY_RIGID = PROBABLY_GR
PROBABLY_NOT = "ProbablyNot"
UNKNOWN = "Unknown"

EXACT = {GLOBALLY_RIGID, NOT_GLOBALLY_RIGID}

RULES = (
    "CompleteSmall",
    "HendricksonFail",
    "D2Characterization",
    "EdgeDeletion",
    "VertexRemovalLemma",
    "VertexRedundant",
    "Combination",
    "KChain",
    "BodyBar",
    "BodyHinge",
    "StressRank",
)


def graph_payload(G: SimpleGraph) -> dict:
    return {"n": G.n, "edges": [list(e) for e in G.sorted_edges]}


def graph_from_payload(p: dict) -> SimpleGraph:
    return SimpleGraph.from_edges(p["n"], p["edges"])


@dataclass(frozen=True)
class CertificateStep:
    rule: str
    payload: dict

    def __post_init__(self):
        if self.rule not in RULES:
            raise InputError(f"unknown rule {self.rule!r}")

    def to_dict(self) -> dict:
        return {"rule": self.rule, "payload": self.payload}


@dataclass(frozen=True)
class Verdict:
    status: str
    dim: int
    steps: tuple = ()
    seed: int = 0
    error_bound: str = "0"

    @property
    def exact(self) -> bool:
        return self.status in EXACT

    @property
    def rules(self) -> list[str]:
        return [s.rule for s in self.steps]

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "dim": self.dim,
            "steps": [s.to_dict() for s in self.steps],
            "seed": self.seed,
            "error_bound": self.error_bound,
        }


@dataclass
class EngineOptions:
    depth: int = 8
    node_budget: int = 400
    trials: int = DEFAULT_TRIALS
    use_2d: bool = True  # exact planar characterization when d == 2
    use_ght: bool = True


def _randomized_bound(n: int, d: int, trials: int) -> str:
    # a rank deficit seen at random points: each trial errs with prob <= deg/p
    return f"<= (({d * n}) / 2^61)^{trials} per negative rank claim"


# -- Hendrickson ------------------------------------------------------------

@dataclass(frozen=True)
class HendricksonResult:
    passed: bool
    reason: str | None = None
    witness: dict = field(default_factory=dict)
    randomized: bool = False

    def to_dict(self) -> dict:
        return {"passed": self.passed, "reason": self.reason, "witness": self.witness}


def hendrickson_check(G: SimpleGraph, d: int, seed: int = 0, trials: int = DEFAULT_TRIALS) -> HendricksonResult:
    """(d+1)-connected and redundantly rigid, or complete on at most d+1 vertices."""
    if G.n <= d + 1:
        if G.is_complete():
            return HendricksonResult(True, "complete_small")
        missing = next(e for e in itertools.combinations(range(G.n), 2) if not G.has_edge(*e))
        return HendricksonResult(False, "not_rigid", {"missing_edge": list(missing)})
    # exact tests first: in the plane both are exact, so redundancy leads
    if d == 2:
        ok, edge = redundantly_rigid_2d(G)
        if not ok:
            return HendricksonResult(False, "not_redundantly_rigid", {"edge": list(edge)})
    k, sep = vertex_connectivity(G, bound=d + 1)
    if k < d + 1:
        return HendricksonResult(
            False, "not_connected", {"connectivity": k, "separator": sorted(sep.separator)}
        )
    if d != 2:
        ok, edge = is_redundantly_rigid(G, d, seed, trials)
        if not ok:
            return HendricksonResult(False, "not_redundantly_rigid", {"edge": list(edge)}, True)
    return HendricksonResult(True)


def _hendrickson_fail_step(G: SimpleGraph, d: int, h: HendricksonResult) -> CertificateStep:
    return CertificateStep(
        "HendricksonFail",
        {"graph": graph_payload(G), "dim": d, "reason": h.reason, **h.witness},
    )


# -- exact planar characterization -----------------------------------------

def _complete_small(G: SimpleGraph, d: int) -> CertificateStep:
    return CertificateStep("CompleteSmall", {"graph": graph_payload(G), "dim": d})


def global_rigidity_2d(G: SimpleGraph, seed: int = 0) -> Verdict:
    """Complete on at most three vertices, or 3-connected and redundantly rigid."""
    if G.n <= 3:
        if G.is_complete():
            return Verdict(GLOBALLY_RIGID, 2, (_complete_small(G, 2),), seed)
        h = hendrickson_check(G, 2, seed)
        return Verdict(NOT_GLOBALLY_RIGID, 2, (_hendrickson_fail_step(G, 2, h),), seed)
    h = hendrickson_check(G, 2, seed)
    if not h.passed:
        return Verdict(NOT_GLOBALLY_RIGID, 2, (_hendrickson_fail_step(G, 2, h),), seed)
    step = CertificateStep("D2Characterization", {"graph": graph_payload(G), "dim": 2})
    return Verdict(GLOBALLY_RIGID, 2, (step,), seed)


def deconstruction_certificate_2d(G: SimpleGraph) -> list[CertificateStep]:
    """Reduce a planar globally rigid graph to K4 by edge deletions and degree-3 vertex removals.

    Every intermediate graph is re-checked to be 3-connected and redundantly
    rigid, and every removed degree-3 vertex leaves a rigid graph.
    """
    if G.n < 4 or not is_3c_redundant_2d(G):
        raise InputError("deconstruction needs a globally rigid planar graph on at least 4 vertices")
    steps = []
    while G.n > 4:
        red = find_reduction(G)
        if red.kind == "Degree3Vertex":
            v = red.vertex
            if not is_laman_rigid(G.delete_vertex(v)):
                raise InvariantFault(f"G - {v} is not rigid for a degree-3 vertex")
            after = vertex_clique_replace(G, v)
            payload = {"graph_before": graph_payload(G), "vertex": v, "dim": 2}
        else:
            after = G.remove_edge(*red.edge)
            payload = {"graph_before": graph_payload(G), "edge": list(red.edge), "dim": 2}
        if not is_3c_redundant_2d(after):
            raise InvariantFault("reduced graph lost 3-connectivity or redundant rigidity")
        payload["graph_after"] = graph_payload(after)
        rule = "VertexRemovalLemma" if red.kind == "Degree3Vertex" else "EdgeDeletion"
        steps.append(CertificateStep(rule, payload))
        G = after
    if not G.is_complete():
        raise InvariantFault("deconstruction did not end at K4")
    return steps


# -- d >= 3 search ----------------------------------------------------------

class _Search:
    """Exact-rule certification with a memo keyed by the labeled edge set."""

    def __init__(self, d: int, seed: int, opts: EngineOptions):
        self.d = d
        self.seed = seed
        self.opts = opts
        self.memo: dict = {}
        self.nodes = 0
        self.exhausted = False
        self.depth_hit = False

    def certify(self, G: SimpleGraph, depth: int):
        key = (G.n, G.edges, depth)
        if key in self.memo:
            return self.memo[key]
        out = self._certify(G, depth)
        self.memo[key] = out
        return out

    def _certify(self, G: SimpleGraph, depth: int):
        d, seed, trials = self.d, self.seed, self.opts.trials
        if G.n <= d + 1:
            return [_complete_small(G, d)] if G.is_complete() else None
        if d == 2 and self.opts.use_2d:
            v = global_rigidity_2d(G, seed)
            return list(v.steps) if v.status == GLOBALLY_RIGID else None
        self.nodes += 1
        if self.nodes > self.opts.node_budget:
            self.exhausted = True
            return None
        if not hendrickson_check(G, d, seed, trials).passed:
            return None
        ok, _ = is_vertex_redundantly_rigid(G, d, seed, trials)
        if ok:
            return [CertificateStep("VertexRedundant", {"graph": graph_payload(G), "dim": d})]
        if depth <= 0:
            self.depth_hit = True
            return None
        for v in sorted(range(G.n), key=lambda x: (-G.degree(x), x)):
            sub = self.removal(G, v, depth)
            if sub is not None:
                return sub
        return None

    def removal(self, G: SimpleGraph, v: int, depth: int):
        """Steps certifying G through removal of v, or None."""
        d = self.d
        if G.degree(v) <= d:
            return None
        if not is_rigid(G.delete_vertex(v), d, self.seed, self.opts.trials):
            return None
        R = vertex_clique_replace(G, v)
        sub = self.certify(R, depth - 1)
        if sub is None:
            return None
        step = CertificateStep(
            "VertexRemovalLemma",
            {"graph_before": graph_payload(G), "vertex": v, "dim": d, "graph_after": graph_payload(R)},
        )
        return [step] + sub


@dataclass(frozen=True)
class LemmaCheck:
    applicable: bool
    reason: str | None = None
    steps: tuple = ()

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "reason": self.reason,
            "steps": [s.to_dict() for s in self.steps],
        }


def vertex_removal_lemma_check(
    G: SimpleGraph, d: int, v: int, seed: int = 0, opts: EngineOptions | None = None
) -> LemmaCheck:
    """Degree above d, G - v rigid, and G - v + K(N(v)) certified globally rigid by exact rules."""
    if not 0 <= v < G.n:
        raise InputError(f"vertex {v} out of range")
    opts = opts or EngineOptions()
    if G.degree(v) <= d:
        return LemmaCheck(False, f"degree {G.degree(v)} <= {d}")
    if not is_rigid(G.delete_vertex(v), d, seed, opts.trials):
        return LemmaCheck(False, f"G - {v} is not rigid")
    search = _Search(d, seed, opts)
    steps = search.removal(G, v, max(opts.depth, 1))
    if steps is None:
        return LemmaCheck(False, "replacement graph not certified globally rigid")
    return LemmaCheck(True, None, tuple(steps))


def global_rigidity_nd(
    G: SimpleGraph, d: int, opts: EngineOptions | None = None, seed: int = 0
) -> Verdict:
    """Decision pipeline: small complete graphs, Hendrickson, planar
    characterization, vertex redundancy and the vertex-removal search, then
    the stress-rank test."""
    if d < 1:
        raise InputError("dimension must be at least 1")
    opts = opts or EngineOptions()
    if G.n <= d + 1:
        if G.is_complete():
            return Verdict(GLOBALLY_RIGID, d, (_complete_small(G, d),), seed)
        h = hendrickson_check(G, d, seed, opts.trials)
        return Verdict(NOT_GLOBALLY_RIGID, d, (_hendrickson_fail_step(G, d, h),), seed)
    h = hendrickson_check(G, d, seed, opts.trials)
    if not h.passed:
        bound = _randomized_bound(G.n, d, opts.trials) if h.randomized else "0"
        return Verdict(NOT_GLOBALLY_RIGID, d, (_hendrickson_fail_step(G, d, h),), seed, bound)
    if d == 2 and opts.use_2d:
        return global_rigidity_2d(G, seed)
    search = _Search(d, seed, opts)
    steps = search.certify(G, opts.depth)
    if steps is not None:
        return Verdict(GLOBALLY_RIGID, d, tuple(steps), seed)
    if opts.use_ght:
        res = ght_global_rigidity_test(G, d, seed, opts.trials)
        if res.status != INAPPLICABLE:
            step = CertificateStep(
                "StressRank",
                {"graph": graph_payload(G), "dim": d, "seed": seed, "trials": opts.trials, **res.to_dict()},
            )
            return Verdict(res.status, d, (step,), seed, res.error_bound)
    reason = "node budget exhausted" if search.exhausted else (
        "depth limit reached" if search.depth_hit else "no exact rule applies"
    )
    return Verdict(UNKNOWN, d, (), seed, reason)


# -- combination ------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    """A graph on an explicit set of global vertex labels."""

    vertices: frozenset
    edges: frozenset

    @classmethod
    def make(cls, vertices, edges) -> "Piece":
        V = frozenset(int(v) for v in vertices)
        E = frozenset(tuple(sorted((int(u), int(v)))) for u, v in edges)
        for u, v in E:
            if u == v or u not in V or v not in V:
                raise InputError(f"edge ({u}, {v}) not on the vertex set")
        return cls(V, E)

    def local(self, extra_edges=()) -> SimpleGraph:
        order = sorted(self.vertices)
        idx = {v: i for i, v in enumerate(order)}
        edges = set(self.edges) | {tuple(sorted(e)) for e in extra_edges}
        return SimpleGraph.from_edges(len(order), sorted({tuple(sorted((idx[u], idx[v]))) for u, v in edges}))

    def to_dict(self) -> dict:
        return {"vertices": sorted(self.vertices), "edges": [list(e) for e in sorted(self.edges)]}


def combine_check(
    G1: Piece,
    G2: Piece,
    H_edges,
    X,
    witness: dict,
    d: int,
    seed: int = 0,
    opts: EngineOptions | None = None,
) -> Verdict:
    """Global rigidity of G1 u G2 from the two-piece combination conditions."""
    opts = opts or EngineOptions()
    X = frozenset(int(x) for x in X)
    if X != G1.vertices & G2.vertices:
        raise InputError("X must equal the common vertex set of the two pieces")
    H = sorted({tuple(sorted((int(u), int(v)))) for u, v in H_edges})
    if any(u not in X or v not in X for u, v in H):
        raise InputError("H must be a graph on X")
    witness = {int(k): int(v) for k, v in witness.items()}
    KX = list(itertools.combinations(sorted(X), 2))
    payload = {
        "dim": d,
        "g1": G1.to_dict(),
        "g2": G2.to_dict(),
        "x": sorted(X),
        "h": [list(e) for e in H],
        "witness": {str(k): v for k, v in sorted(witness.items())},
    }
    failures = []
    if len(X) < d + 1:
        failures.append(f"|X| = {len(X)} < {d + 1}")
    if not is_rigid(G1.local(), d, seed, opts.trials):
        failures.append("G1 is not rigid")
    N = max(G1.vertices | G2.vertices, default=-1) + 1
    G2global = SimpleGraph(N, G2.edges)
    if not verify_rooted_minor(G2global, X, H, witness, vertices=G2.vertices):
        failures.append("witness is not a rooted minor of G2")
    sub = None
    if not failures:
        for label, a, b in (("g1+h,g2+kx", G1.local(H), G2.local(KX)), ("g1+kx,g2+h", G1.local(KX), G2.local(H))):
            va = global_rigidity_nd(a, d, opts, seed)
            vb = global_rigidity_nd(b, d, opts, seed)
            if {va.status, vb.status} <= {GLOBALLY_RIGID, PROBABLY_GLOBALLY_RIGID}:
                sub = (label, va, vb)
                if va.status == vb.status == GLOBALLY_RIGID:
                    break
        if sub is None:
            failures.append("neither pairing is certified globally rigid")
    if failures:
        payload["failures"] = failures
        return Verdict(UNKNOWN, d, (CertificateStep("Combination", payload),), seed, "conditions not met")
    label, va, vb = sub
    payload["pairing"] = label
    payload["verdicts"] = [va.to_dict(), vb.to_dict()]
    step = CertificateStep("Combination", payload)
    if va.status == vb.status == GLOBALLY_RIGID:
        return Verdict(GLOBALLY_RIGID, d, (step,), seed)
    bound = next(v.error_bound for v in (va, vb) if v.status != GLOBALLY_RIGID)
    return Verdict(PROBABLY_GLOBALLY_RIGID, d, (step,), seed, bound)


# -- k-chains ---------------------------------------------------------------

def _addition_order(G: SimpleGraph, start, d: int):
    """Order adding the remaining vertices one by one, each with >= d+1 earlier neighbours."""
    placed = set(start)
    order = []
    rest = set(range(G.n)) - placed
    while rest:
        v = next((x for x in sorted(rest) if len(G.adj[x] & placed) >= d + 1), None)
        if v is None:
            return None
        order.append(v)
        placed.add(v)
        rest.discard(v)
    return order


def kchain_global_check(
    spec: ChainSpec, d: int, seed: int = 0, opts: EngineOptions | None = None
) -> Verdict:
    """Certify a k-chain through one end vertex, re-deriving every proof obligation.

    The removed vertex v comes from the smaller end part. G - v must be
    rigid, and G - v + K(N(v)) must grow from the clique on N(v) (at least
    d+1 vertices) by adding vertices with at least d+1 earlier neighbours.
    Any failed obligation defers to :func:`global_rigidity_nd`.
    """
    opts = opts or EngineOptions()
    G = k_chain(spec)
    parts = spec.parts()
    first, last = (parts[0], parts[1]) if spec.sizes[0] <= spec.sizes[-1] else (parts[-1], parts[-2])
    v = first[0]
    nbrs = sorted(last)
    k, _ = vertex_connectivity(G, bound=d + 1) if G.n >= 2 else (0, None)
    if k >= d + 1 and len(nbrs) >= d + 1 and is_rigid(G.delete_vertex(v), d, seed, opts.trials):
        R = vertex_clique_replace(G, v)
        start = [x - (x > v) for x in nbrs]
        order = _addition_order(R, start, d)
        if order is not None:
            step = CertificateStep(
                "KChain",
                {
                    "sizes": list(spec.sizes),
                    "dim": d,
                    "graph": graph_payload(G),
                    "vertex": v,
                    "threshold_binomial": comb(d + 1, 2),
                    "clique": start,
                    "order": order,
                    "graph_after": graph_payload(R),
                },
            )
            return Verdict(GLOBALLY_RIGID, d, (step,), seed)
    return global_rigidity_nd(G, d, opts, seed)


# -- body frameworks --------------------------------------------------------

def body_bar_verdict(H: Multigraph, d: int, seed: int = 0) -> Verdict:
    """Body-bar graphs are globally rigid exactly when H - e packs (d+1 choose 2) trees for every e."""
    chk = body_bar_global_check(H, d)
    payload = {"dim": d, "h": H.to_dict(), **chk.to_dict()}
    status = GLOBALLY_RIGID if chk.ok else NOT_GLOBALLY_RIGID
    return Verdict(status, d, (CertificateStep("BodyBar", payload),), seed)


def body_hinge_verdict(H: Multigraph, d: int, seed: int = 0) -> Verdict:
    """Sufficient packing condition for body-hinge graphs; failure is inconclusive."""
    chk = body_hinge_global_check(H, d)
    payload = {"dim": d, "h": H.to_dict(), **chk.to_dict()}
    step = CertificateStep("BodyHinge", payload)
    if chk.ok:
        return Verdict(GLOBALLY_RIGID, d, (step,), seed)
    return Verdict(UNKNOWN, d, (step,), seed, "packing condition fails; it is only sufficient")
