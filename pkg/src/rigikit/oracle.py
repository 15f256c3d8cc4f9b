"""Floating-point exploration of equivalent realizations.

Random starts are driven to zero of the squared edge-length residual by
damped least squares; converged solutions are moved to a canonical frame
(vertex 0 at the origin, Gram-Schmidt frame built from the first affinely
independent vertices, which also fixes reflections) and clustered by their
vector of pairwise distances. Two labeled configurations are congruent
exactly when all pairwise distances agree, so the class count is a lower
bound on the number of congruence classes of equivalent frameworks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph_core import SimpleGraph
from .rigidity_alg import is_rigid

RESIDUAL_TOL = 1e-10
MERGE_TOL = 1e-6


@dataclass(frozen=True)
class RealizationClass:
    representative: np.ndarray
    fingerprint: np.ndarray
    hits: int = 1

    def to_dict(self) -> dict:
        return {
            "fingerprint": [round(float(x), 12) for x in self.fingerprint],
            "representative": [[round(float(x), 12) for x in row] for row in self.representative],
            "hits": self.hits,
        }


@dataclass(frozen=True)
class EnumerationReport:
    classes: tuple
    restarts: int
    converged: int
    tolerance: float
    merge_tolerance: float
    flexible_flag: bool
    seed: int

    @property
    def count(self) -> int:
        return len(self.classes)

    def to_dict(self) -> dict:
        return {
            "classes": [c.to_dict() for c in self.classes],
            "class_count": self.count,
            "restarts": self.restarts,
            "converged": self.converged,
            "tolerance": self.tolerance,
            "merge_tolerance": self.merge_tolerance,
            "flexible_flag": self.flexible_flag,
            "seed": self.seed,
        }


def fingerprint(q: np.ndarray) -> np.ndarray:
    """Pairwise distances in vertex-pair order."""
    n = len(q)
    return np.array([np.linalg.norm(q[i] - q[j]) for i, j in itertools.combinations(range(n), 2)])


def canonical_frame(q: np.ndarray, eps: float = 1e-9) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n, d = q.shape
    x = q - q[0]
    basis = []
    for v in x[1:]:
        w = v - sum(np.dot(v, b) * b for b in basis)
        norm = np.linalg.norm(w)
        if norm > eps * max(1.0, np.linalg.norm(v)):
            basis.append(w / norm)
            if len(basis) == d:
                break
    # complete with the standard axes for degenerate spans
    for axis in np.eye(d):
        if len(basis) == d:
            break
        w = axis - sum(np.dot(axis, b) * b for b in basis)
        if np.linalg.norm(w) > 1e-6:
            basis.append(w / np.linalg.norm(w))
    R = np.array(basis)
    return x @ R.T


def _batch_lm(edges: np.ndarray, target: np.ndarray, z: np.ndarray, n: int, d: int, tol: float, iters: int = 400):
    """Levenberg-Marquardt on all restarts at once; returns (solutions, max residuals)."""
    u, v = edges[:, 0], edges[:, 1]
    R, N = z.shape
    m = len(u)
    rows = np.arange(m)

    def resid(z):
        q = z.reshape(len(z), n, d)
        diff = q[:, u] - q[:, v]
        return np.einsum("rij,rij->ri", diff, diff) - target, diff

    r, diff = resid(z)
    cost = np.einsum("ri,ri->r", r, r)
    lam = np.full(R, 1e-3)
    active = np.ones(R, dtype=bool)
    eye = np.eye(N)
    for _ in range(iters):
        active &= np.abs(r).max(axis=1) >= tol * 1e-3
        idx = np.flatnonzero(active)
        if not idx.size:
            break
        J = np.zeros((idx.size, m, N))
        for k in range(d):
            J[:, rows, u * d + k] = 2 * diff[idx][:, :, k]
            J[:, rows, v * d + k] = -2 * diff[idx][:, :, k]
        Jt = J.transpose(0, 2, 1)
        A = Jt @ J + lam[idx, None, None] * eye
        g = (Jt @ r[idx][:, :, None])[:, :, 0]
        step = np.linalg.solve(A, g[:, :, None])[:, :, 0]
        z_new = z[idx] - step
        r_new, diff_new = resid(z_new)
        cost_new = np.einsum("ri,ri->r", r_new, r_new)
        better = cost_new < cost[idx]
        take = idx[better]
        z[take], r[take], diff[take], cost[take] = z_new[better], r_new[better], diff_new[better], cost_new[better]
        lam[take] = np.maximum(lam[take] / 3, 1e-12)
        worse = idx[~better]
        lam[worse] *= 4
        active[worse[lam[worse] > 1e12]] = False
    return z, np.abs(r).max(axis=1) if m else np.zeros(R)


def enumerate_equivalent(
    G: SimpleGraph,
    config,
    restarts: int = 200,
    tol: float = RESIDUAL_TOL,
    seed: int = 0,
    merge_tol: float = MERGE_TOL,
    check_rigid: bool = True,
) -> EnumerationReport:
    """Distinct congruence classes of frameworks equivalent to (G, config) found from random starts."""
    p = np.asarray(config, dtype=float)
    if p.ndim != 2 or p.shape[0] != G.n:
        raise InputError("configuration must be an n x d array")
    n, d = p.shape
    if check_rigid and not is_rigid(G, d, seed):
        return EnumerationReport((), 0, 0, tol, merge_tol, True, seed)
    edges = np.array(G.sorted_edges, dtype=int).reshape(-1, 2)
    scale = max(np.ptp(p, axis=0).max(), 1e-12) if n > 1 else 1.0
    ps = p / scale
    target = np.array([np.sum((ps[a] - ps[b]) ** 2) for a, b in edges])
    rng = np.random.default_rng(seed)
    starts = rng.normal(size=(restarts, n * d))
    if edges.size:
        sols, res = _batch_lm(edges, target, starts, n, d, tol)
    else:
        sols, res = starts, np.zeros(restarts)
    classes: list[list] = []  # [fingerprint, representative, hits]
    converged = 0
    for z, rmax in zip(sols, res):
        if rmax >= tol:
            continue
        converged += 1
        q = canonical_frame(z.reshape(n, d))
        fp = fingerprint(q)
        for c in classes:
            if fp.size == 0 or np.abs(c[0] - fp).max() < merge_tol:
                c[2] += 1
                break
        else:
            classes.append([fp, q, 1])
    classes.sort(key=lambda c: tuple(np.round(c[0], 9)))
    out = tuple(RealizationClass(c[1] * scale, c[0] * scale, c[2]) for c in classes)
    return EnumerationReport(out, restarts, converged, tol, merge_tol, False, seed)


def random_float_config(n: int, d: int, seed: int) -> np.ndarray:
    """A generic-looking configuration with coordinates rounded to 1/1000."""
    rng = np.random.default_rng(seed)
    return np.round(rng.uniform(-1, 1, size=(n, d)), 3)


@dataclass(frozen=True)
class ProbeResult:
    status: str  # "ConsistentWithGR" or "FoundSecondClass"
    config: np.ndarray
    witness: np.ndarray | None
    report: EnumerationReport

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "config": self.config.tolist(),
            "witness": None if self.witness is None else self.witness.tolist(),
            "report": self.report.to_dict(),
        }


def numeric_globally_rigid_probe(
    G: SimpleGraph, d: int, restarts: int = 200, seed: int = 0, tol: float = RESIDUAL_TOL
) -> ProbeResult:
    """Look for an equivalent but non-congruent framework at a random configuration."""
    if not is_rigid(G, d, seed):
        raise InputError("probe needs a rigid graph")
    p = random_float_config(G.n, d, seed)
    report = enumerate_equivalent(G, p, restarts, tol, seed, check_rigid=False)
    if report.count >= 2:
        own = fingerprint(canonical_frame(p))
        other = max(report.classes, key=lambda c: np.abs(c.fingerprint - own * 1.0).max())
        return ProbeResult("FoundSecondClass", p, other.representative, report)
    return ProbeResult("ConsistentWithGR", p, None, report)
