"""Rigidity matrices, generic rank, redundancy and the stress-matrix test.

"Generic" configurations are uniform random points of GF(p)^d with
``p = 2**61 - 1``. Because every minor of the rigidity matrix is an integer
polynomial in the coordinates, the rank at a prime-field point never
exceeds the generic rank. Positive answers that reach the combinatorial
upper bound are therefore certain; only rank-deficient answers carry the
Schwartz-Zippel error, and those are retried with independent seeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from typing import Sequence

from .algebra import (
    PRIME,
    SparseMatrix,
    bareiss_rank,
    rank_mod_p,
    rng_for,
    rref_mod_p,
    rref_rational,
)
from .errors import DegenerateError, InputError, InvariantFault, NoStressError
from .graph_core import SimpleGraph

DEFAULT_TRIALS = 3


@dataclass(frozen=True)
class Framework:
    """A graph with a point per vertex over GF(modulus), or over Q if modulus is None."""

    graph: SimpleGraph
    dim: int
    config: tuple
    modulus: int | None = PRIME

    def __post_init__(self):
        if self.dim < 1:
            raise InputError("dimension must be at least 1")
        if len(self.config) != self.graph.n:
            raise InputError("every vertex needs a point")
        pts = []
        for pt in self.config:
            if len(pt) != self.dim:
                raise InputError(f"point {pt} is not in dimension {self.dim}")
            if self.modulus is None:
                pts.append(tuple(Fraction(x) for x in pt))
            else:
                pts.append(tuple(int(x) % self.modulus for x in pt))
        object.__setattr__(self, "config", tuple(pts))


def trivial_motion_dim(d: int, span_dim: int) -> int:
    return comb(d + 1, 2) - comb(d - span_dim, 2)


def max_rank(n: int, d: int) -> int:
    """Largest possible rigidity-matrix rank for n points in general position."""
    if n == 0:
        return 0
    return d * n - trivial_motion_dim(d, min(n - 1, d))


def rigid_rank(n: int, d: int) -> int:
    return d * n - comb(d + 1, 2)


def random_config(n: int, d: int, seed: int, *salt, p: int = PRIME) -> list[tuple]:
    rng = rng_for(seed, "config", *salt)
    return [tuple(rng.randrange(p) for _ in range(d)) for _ in range(n)]


def _rows(G: SimpleGraph, d: int, config, p: int | None) -> list[dict]:
    rows = []
    for u, v in G.sorted_edges:
        pu, pv = config[u], config[v]
        row = {}
        for i in range(d):
            x = pu[i] - pv[i]
            if p is not None:
                x %= p
            if x:
                row[d * u + i] = x
                row[d * v + i] = -x if p is None else p - x
        rows.append(row)
    return rows


def _transpose_rows(rows: list[dict], ncols: int) -> list[dict]:
    out: list[dict] = [{} for _ in range(ncols)]
    for r, row in enumerate(rows):
        for c, v in row.items():
            out[c][r] = v
    return out


def rigidity_matrix(F: Framework) -> SparseMatrix:
    """|E| x dn matrix, rows in sorted edge order; the Jacobian's factor 2 is dropped."""
    rows = _rows(F.graph, F.dim, F.config, F.modulus)
    entries = {(r, c): v for r, row in enumerate(rows) for c, v in row.items()}
    return SparseMatrix(F.graph.m, F.dim * F.graph.n, entries, F.modulus)


def rank_at(G: SimpleGraph, d: int, config, p: int = PRIME) -> int:
    return rank_mod_p(_rows(G, d, config, p), d * G.n, p)


def generic_rank(G: SimpleGraph, d: int, seed: int = 0, trials: int = DEFAULT_TRIALS) -> int:
    """Rank of the generic rigidity matroid, estimated from random GF(p) configurations.

    The estimate is the maximum over ``trials`` independent configurations;
    sampling stops early once the rank meets its upper bound.
    """
    bound = min(G.m, max_rank(G.n, d))
    best = 0
    for t in range(trials):
        best = max(best, rank_at(G, d, random_config(G.n, d, seed, t)))
        if best >= bound:
            break
    return best


def is_rigid(G: SimpleGraph, d: int, seed: int = 0, trials: int = DEFAULT_TRIALS) -> bool:
    if G.is_complete():
        return True
    if G.n <= d:
        return False
    return generic_rank(G, d, seed, trials) == rigid_rank(G.n, d)


def _coloops(G: SimpleGraph, d: int, config, p: int = PRIME):
    """Rank and coloop edges of the rigidity matroid at ``config``.

    An edge is a coloop iff no equilibrium stress is non-zero on it, read off
    the reduced echelon form of the transposed rigidity matrix.
    """
    rowsT = _transpose_rows(_rows(G, d, config, p), d * G.n)
    piv = rref_mod_p(rowsT, G.m, p)
    free = set(range(G.m)) - set(piv)
    edges = G.sorted_edges
    coloops = [edges[c] for c, row in piv.items() if not any(k in free for k in row)]
    return len(piv), sorted(coloops)


def is_redundantly_rigid(G: SimpleGraph, d: int, seed: int = 0, trials: int = DEFAULT_TRIALS):
    """Return ``(True, None)`` if G - e is rigid for every edge, else ``(False, edge)``."""
    if G.m == 0:
        return True, None
    edges = G.sorted_edges
    if G.n <= d + 1:
        # G - e is a non-complete graph on at most d+1 vertices
        return False, edges[0]
    target = rigid_rank(G.n, d)
    failing = edges[0]
    for t in range(trials):
        r, coloops = _coloops(G, d, random_config(G.n, d, seed, "redundant", t))
        if r == target:
            if not coloops:
                return True, None
            failing = coloops[0]
    return False, failing


def is_vertex_redundantly_rigid(G: SimpleGraph, d: int, seed: int = 0, trials: int = DEFAULT_TRIALS):
    """Return ``(True, None)`` if G - v is rigid for every vertex, else ``(False, v)``."""
    if G.n < 2:
        raise InputError("vertex redundancy needs at least 2 vertices")
    for v in range(G.n):
        if not is_rigid(G.delete_vertex(v), d, seed, trials):
            return False, v
    return True, None


# -- exact infinitesimal rigidity -------------------------------------------

def affine_span_dim(points: Sequence[Sequence[Fraction]]) -> int:
    if not points:
        return -1
    base = points[0]
    diffs = [{i: Fraction(x) - Fraction(b) for i, (x, b) in enumerate(zip(pt, base))} for pt in points[1:]]
    return len(rref_rational(diffs, len(base)))


def trivial_motions(F: Framework) -> list[list[Fraction]]:
    """Spanning set of the trivial motions m(v) = S p_v + t, flattened."""
    n, d = F.graph.n, F.dim
    out = []
    for i in range(d):
        vec = [Fraction(0)] * (d * n)
        for v in range(n):
            vec[d * v + i] = Fraction(1)
        out.append(vec)
    for i in range(d):
        for j in range(i + 1, d):
            vec = [Fraction(0)] * (d * n)
            for v, pt in enumerate(F.config):
                vec[d * v + i] = pt[j]
                vec[d * v + j] = -pt[i]
            out.append(vec)
    return out


def _fast_full_rank(rows: list[dict], ncols: int, target: int) -> bool:
    """True when the GF(p) image already certifies rank ``target`` over Q."""
    p = PRIME
    img = []
    for row in rows:
        scale = lcm(*(v.denominator for v in row.values()))
        if scale % p == 0:
            return False
        img.append({k: int(v * scale) % p for k, v in row.items()})
    return rank_mod_p(img, ncols, p) >= target


def infinitesimal_rigidity_exact(F: Framework):
    """Exact infinitesimal rigidity over Q.

    Returns ``(True, None)`` or ``(False, motion)`` with ``motion`` a
    non-trivial infinitesimal motion, one d-vector per vertex. The trivial
    motions are counted from the affine span of the configuration.
    """
    if F.modulus is not None:
        raise InputError("exact infinitesimal rigidity needs a rational configuration")
    n, d = F.graph.n, F.dim
    if n == 0:
        return True, None
    k = affine_span_dim(F.config)
    if n >= 2 and k == 0:
        raise DegenerateError("all points coincide")
    target = d * n - trivial_motion_dim(d, k)
    rows = _rows(F.graph, d, F.config, None)
    if _fast_full_rank(rows, d * n, target):
        return True, None
    int_rows = []
    for row in rows:
        scale = lcm(*(v.denominator for v in row.values()))
        dense = [0] * (d * n)
        for c, v in row.items():
            dense[c] = int(v * scale)
        int_rows.append(dense)
    r = bareiss_rank(int_rows, d * n)
    if r == target:
        return True, None
    if r > target:
        raise InvariantFault("rigidity matrix rank exceeds the trivial-motion bound")
    piv = rref_rational(rows, d * n)
    free = [c for c in range(d * n) if c not in piv]
    triv = trivial_motions(F)
    triv_rank = len(rref_rational([dict(enumerate(t)) for t in triv], d * n))
    for f in free:
        x = [Fraction(0)] * (d * n)
        x[f] = Fraction(1)
        for c, row in piv.items():
            v = row.get(f)
            if v:
                x[c] = -v
        test = [dict(enumerate(t)) for t in triv] + [dict(enumerate(x))]
        if len(rref_rational(test, d * n)) > triv_rank:
            motion = tuple(tuple(x[d * v:d * v + d]) for v in range(n))
            return False, motion
    raise InvariantFault("kernel exceeds trivial motions but no witness found")


# -- stresses ---------------------------------------------------------------

@dataclass(frozen=True)
class StressSample:
    graph: SimpleGraph
    dim: int
    config: tuple
    omega: dict  # edge -> GF(p) value
    stress_dim: int
    rigidity_rank: int


def equilibrium_stress_sample(G: SimpleGraph, d: int, seed: int = 0, trial: int = 0) -> StressSample:
    """Random equilibrium stress at a random configuration, kept alongside it."""
    p = PRIME
    config = tuple(random_config(G.n, d, seed, "stress", trial))
    rows = _rows(G, d, config, p)
    rowsT = _transpose_rows(rows, d * G.n)
    piv = rref_mod_p(rowsT, G.m, p)
    free = [c for c in range(G.m) if c not in piv]
    if not free:
        raise NoStressError("edge set is independent: no non-zero stress")
    rng = rng_for(seed, "stress-coeffs", trial)
    while True:
        x = [0] * G.m
        for f in free:
            x[f] = rng.randrange(p)
        for c, row in piv.items():
            x[c] = -sum(v * x[k] for k, v in row.items() if k != c) % p
        if any(x):
            break
    # equilibrium at every vertex
    for r in rowsT:
        if sum(v * x[k] for k, v in r.items()) % p:
            raise InvariantFault("sampled stress is not in equilibrium")
    omega = {e: x[i] for i, e in enumerate(G.sorted_edges)}
    return StressSample(G, d, config, omega, len(free), len(piv))


def stress_matrix(n: int, omega: dict, p: int = PRIME) -> list[list[int]]:
    M = [[0] * n for _ in range(n)]
    for (u, v), w in omega.items():
        M[u][v] = (M[u][v] - w) % p
        M[v][u] = (M[v][u] - w) % p
        M[u][u] = (M[u][u] + w) % p
        M[v][v] = (M[v][v] + w) % p
    return M


def stress_matrix_rank(n: int, omega: dict, p: int = PRIME) -> int:
    rows = [{j: v for j, v in enumerate(r) if v} for r in stress_matrix(n, omega, p)]
    return rank_mod_p(rows, n, p)


PROBABLY_GR = "ProbablyGloballyRigid"
PROBABLY_NOT = "ProbablyNot"
INAPPLICABLE = "Inapplicable"


@dataclass(frozen=True)
class GhtResult:
    status: str
    ranks: tuple
    target: int
    error_bound: str

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "stress_ranks": list(self.ranks),
            "target": self.target,
            "error_bound": self.error_bound,
        }


def stress_error_bound(n: int, m: int, d: int, trials: int) -> str:
    r = min(m, d * n)
    k = max(n - d - 1, 0)
    deg = r + k * (r + 1)
    return (
        f"one-sided: stress rank can only be under-measured; "
        f"P(miss) <= ({deg}/p)^{trials} per verdict, p=2^61-1"
    )


def ght_global_rigidity_test(G: SimpleGraph, d: int, seed: int = 0, trials: int = DEFAULT_TRIALS) -> GhtResult:
    """Randomized stress-matrix rank test for generic global rigidity.

    Reports ``ProbablyGloballyRigid`` iff some sampled stress matrix reaches
    rank n - d - 1, and ``Inapplicable`` when G is not rigid.
    """
    n = G.n
    if n < d + 2:
        raise InputError(f"stress test needs at least d+2={d + 2} vertices")
    target = n - d - 1
    bound = stress_error_bound(n, G.m, d, trials)
    if not is_rigid(G, d, seed):
        return GhtResult(INAPPLICABLE, (), target, bound)
    ranks = []
    for t in range(trials):
        try:
            sample = equilibrium_stress_sample(G, d, seed, t)
        except NoStressError:
            ranks.append(0)
            continue
        r = stress_matrix_rank(n, sample.omega)
        if r > target:
            raise InvariantFault(f"stress matrix rank {r} exceeds n-d-1={target}")
        ranks.append(r)
        if r == target:
            break
    status = PROBABLY_GR if max(ranks) == target else PROBABLY_NOT
    return GhtResult(status, tuple(ranks), target, bound)
