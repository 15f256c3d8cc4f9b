"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines appear in the
terminal summary) or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import random
import sys
import time
from functools import lru_cache
from math import comb
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES, k4_minus_edge  # noqa: E402
from nash_williams import packable_many  # noqa: E402
from rigikit import cli  # noqa: E402
from rigikit.builders import body_bar_graph, body_hinge_graph, standard_body_hinge_config, verify_standard_config_rigid  # noqa: E402
from rigikit.certify import (  # noqa: E402
    GLOBALLY_RIGID,
    NOT_GLOBALLY_RIGID,
    PROBABLY_GLOBALLY_RIGID,
    EngineOptions,
    deconstruction_certificate_2d,
    global_rigidity_nd,
)
from rigikit.checker import verify_deconstruction, verify_ear_decomposition, verify_reduction, verify_verdict  # noqa: E402
from rigikit.corpus import (  # noqa: E402
    atlas_graphs,
    multigraphs_up_to_iso,
    random_m_connected,
    random_one_extensions,
    random_vertex_redundant,
    three_connected_graphs,
)
from rigikit.graph_core import complete_bipartite, complete_graph, cycle_graph, format_graph, vertex_connectivity  # noqa: E402
from rigikit.oracle import enumerate_equivalent, random_float_config  # noqa: E402
from rigikit.packing import TreePacking, body_bar_global_check, body_hinge_global_check, tree_packing  # noqa: E402
from rigikit.rigidity_alg import (  # noqa: E402
    PROBABLY_GR,
    PROBABLY_NOT,
    generic_rank,
    ght_global_rigidity_test,
    is_redundantly_rigid,
    is_rigid,
    is_vertex_redundantly_rigid,
)
from rigikit.sparsity2d import ear_decomposition, find_reduction, is_3c_redundant_2d, pebble_rank  # noqa: E402


def report(number: int, title: str, ok: bool, detail: str, started: float) -> None:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail} ({time.perf_counter() - started:.1f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)


def stress_prediction(G, d: int, seed: int = 0) -> bool:
    """Stress-test prediction of global rigidity; complete graphs on <= d+1 vertices are globally rigid."""
    if G.n < d + 2:
        return G.is_complete()
    return ght_global_rigidity_test(G, d, seed).status == PROBABLY_GR


# -- 1 ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def criterion_1():
    t = time.perf_counter()
    graphs = three_connected_graphs(4, 7)
    disagreements, inexact, certified = [], 0, []
    for G in graphs:
        rep = _cli_global(G)
        if rep["status"] not in (GLOBALLY_RIGID, NOT_GLOBALLY_RIGID):
            inexact += 1
            continue
        gr = rep["status"] == GLOBALLY_RIGID
        if gr != stress_prediction(G, 2):
            disagreements.append(G)
        if gr:
            certified.append((G, 2))
    elapsed = time.perf_counter() - t
    ok = not disagreements and not inexact and elapsed < 300
    detail = f"{len(graphs)} graphs, {len(certified)} globally rigid, {len(disagreements)} disagreements, {inexact} inexact"
    return ok, detail, t, tuple(certified)


def _cli_global(G):
    import contextlib
    import io
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as fh:
        fh.write(format_graph(G))
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = cli.main(["global", "--dim", "2", "--json", "--deterministic", fh.name])
    Path(fh.name).unlink()
    assert code == 0
    return json.loads(out.getvalue())


def test_criterion_01_planar_characterization():
    ok, detail, t, _ = criterion_1()
    report(1, "planar characterization vs stress test", ok, detail, t)
    assert ok, detail


# -- 2 ----------------------------------------------------------------------

def test_criterion_02_pebble_vs_algebra():
    t = time.perf_counter()
    graphs = atlas_graphs(6)
    bad = [G for G in graphs if pebble_rank(G)[0] != generic_rank(G, 2)]
    elapsed = time.perf_counter() - t
    ok = not bad and elapsed < 60
    report(2, "pebble rank vs generic rank", ok, f"{len(graphs)} graphs, {len(bad)} mismatches", t)
    assert ok


# -- 5 ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def criterion_5():
    t = time.perf_counter()
    rng = random.Random(20240605)
    conflicts, certified, count = [], [], 0
    for d in (2, 3):
        for _ in range(50):
            G = random_vertex_redundant(d, rng)
            assert is_vertex_redundantly_rigid(G, d)[0]
            count += 1
            v = global_rigidity_nd(G, d, EngineOptions(use_2d=False))
            good = (
                v.status == GLOBALLY_RIGID
                and v.rules == ["VertexRedundant"]
                and verify_verdict(G, v).ok
                and stress_prediction(G, d)
            )
            if good:
                certified.append((G, d))
            else:
                conflicts.append((G, d, v.status))
    return not conflicts and count == 100, f"{count} graphs, {len(conflicts)} conflicts", t, tuple(certified)


def test_criterion_05_vertex_redundancy():
    ok, detail, t, _ = criterion_5()
    report(5, "vertex-redundantly rigid graphs", ok, detail, t)
    assert ok, detail


# -- 6 ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def criterion_6():
    t = time.perf_counter()
    Hs = [H for n in range(1, 5) for H in multigraphs_up_to_iso(n, 9)]
    disagreements, certified, positives = [], [], 0
    for d in (2, 3):
        for H in Hs:
            check = body_bar_global_check(H, d).ok
            G = body_bar_graph(H, d).graph
            pred = stress_prediction(G, d)
            if check != pred:
                disagreements.append((H, d, check, pred))
            if check:
                positives += 1
                certified.append((G, d))
    elapsed = time.perf_counter() - t
    ok = not disagreements and elapsed < 900
    detail = f"{len(Hs)} multigraphs x 2 dims, {positives} globally rigid, {len(disagreements)} disagreements"
    return ok, detail, t, tuple(certified)


def test_criterion_06_body_bar():
    ok, detail, t, _ = criterion_6()
    report(6, "body-bar packing condition vs stress test", ok, detail, t)
    assert ok, detail


# -- 7 ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def criterion_7():
    t = time.perf_counter()
    Hs = [H for n in range(1, 4) for H in multigraphs_up_to_iso(n, 3 * comb(n, 2), max_mult=3)]
    failures, certified, passed = [], [], 0
    for d in (2, 3):
        for H in Hs:
            if not body_hinge_global_check(H, d).ok:
                continue
            passed += 1
            G = body_hinge_graph(H, d).graph
            if not stress_prediction(G, d):
                failures.append((H, d, "stress"))
                continue
            edges = range(H.m) if H.m else [None]
            if not all(verify_standard_config_rigid(standard_body_hinge_config(H, d, e)) for e in edges):
                failures.append((H, d, "standard configuration"))
                continue
            certified.append((G, d))
    ok = not failures and passed > 0
    return ok, f"{len(Hs)} multigraphs x 2 dims, {passed} pass the packing condition, {len(failures)} failures", t, tuple(certified)


def test_criterion_07_body_hinge():
    ok, detail, t, _ = criterion_7()
    report(7, "body-hinge sufficiency", ok, detail, t)
    assert ok, detail


# -- 3 ----------------------------------------------------------------------

def test_criterion_03_hendrickson_necessity():
    t = time.perf_counter()
    pool = []
    for crit in (criterion_1, criterion_5, criterion_6, criterion_7):
        pool.extend(crit()[3])
    checked, bad = 0, []
    for G, d in pool:
        if G.n < d + 2:
            continue
        checked += 1
        k, _ = vertex_connectivity(G, bound=d + 1)
        if k < d + 1 or not is_redundantly_rigid(G, d)[0]:
            bad.append((G, d))
    ok = not bad and checked > 0
    report(3, "necessary conditions on certified graphs", ok, f"{checked} certified graphs, {len(bad)} violations", t)
    assert ok


# -- 4 ----------------------------------------------------------------------

def test_criterion_04_k55():
    t = time.perf_counter()
    G = complete_bipartite(5, 5)
    problems = []
    for seed in range(5):
        if not is_rigid(G, 3, seed):
            problems.append(f"seed {seed}: not rigid")
        if not is_redundantly_rigid(G, 3, seed)[0]:
            problems.append(f"seed {seed}: not redundantly rigid")
        if vertex_connectivity(G)[0] < 4:
            problems.append(f"seed {seed}: not 4-connected")
        ok_v, v = is_vertex_redundantly_rigid(G, 3, seed)
        rest = G.delete_vertex(v) if v is not None else None
        if ok_v or rest is None or (rest.n, rest.m) != (9, 20) or generic_rank(rest, 3, seed) != 20:
            problems.append(f"seed {seed}: vertex deletion is not the flexible K_(4,5)")
        res = ght_global_rigidity_test(G, 3, seed)
        if res.status != PROBABLY_NOT or max(res.ranks) > 5 or res.target != 6:
            problems.append(f"seed {seed}: stress ranks {res.ranks}")
    elapsed = time.perf_counter() - t
    ok = not problems and elapsed < 10
    detail = "5 seeds, " + ("all facts hold" if not problems else "; ".join(problems))
    report(4, "K_(5,5) in 3D", ok, detail, t)
    assert ok, detail


# -- 8 ----------------------------------------------------------------------

def test_criterion_08_one_extensions():
    t = time.perf_counter()
    rng = random.Random(8)
    failures, count = [], 0
    for d in (2, 3):
        for _ in range(100):
            G = random_one_extensions(d, rng.randint(1, 6), rng)
            count += 1
            v = global_rigidity_nd(G, d)
            if d == 2:
                steps = deconstruction_certificate_2d(G) if v.status == GLOBALLY_RIGID else None
                if steps is None or not verify_deconstruction(G, steps).ok:
                    failures.append((G, d, v.status))
            else:
                if v.status not in (GLOBALLY_RIGID, PROBABLY_GLOBALLY_RIGID) or not stress_prediction(G, d):
                    failures.append((G, d, v.status))
            if not verify_verdict(G, v).ok:
                failures.append((G, d, "verdict check"))
    ok = not failures and count == 200
    report(8, "1-extension closure", ok, f"{count} sequences, {len(failures)} failures", t)
    assert ok


# -- 9 ----------------------------------------------------------------------

def test_criterion_09_oracle():
    t = time.perf_counter()
    problems = []
    for n in range(1, 6):
        for d in (1, 2, 3):
            rep = enumerate_equivalent(complete_graph(n), random_float_config(n, d, n * 10 + d), restarts=200, seed=n + d)
            if rep.count != 1:
                problems.append(f"K{n} in {d}D: {rep.count} classes")
    G = k4_minus_edge()
    wins = 0
    for seed in range(10):
        rep = enumerate_equivalent(G, random_float_config(4, 2, seed), restarts=200, seed=seed)
        wins += rep.count == 2
    if wins < 9:
        problems.append(f"K4-e: 2 classes in only {wins}/10 seeds")
    if not enumerate_equivalent(cycle_graph(4), random_float_config(4, 2, 0)).flexible_flag:
        problems.append("C4 not flagged flexible")
    ok = not problems
    report(9, "realization oracle", ok, f"K4-e two classes in {wins}/10 seeds" + ("" if ok else "; " + "; ".join(problems)), t)
    assert ok, problems


# -- 10 ---------------------------------------------------------------------

def test_criterion_10_tree_packing():
    t = time.perf_counter()
    total, mismatches = 0, []
    for n in range(1, 6):
        Hs = multigraphs_up_to_iso(n, 14)
        if n == 1:
            total += len(Hs) * 3
            mismatches += [H for H in Hs for k in (1, 2, 3) if not isinstance(tree_packing(H, k), TreePacking)]
            continue
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        index = {p: i for i, p in enumerate(pairs)}
        mults = np.zeros((len(Hs), len(pairs)), dtype=np.int64)
        for row, H in enumerate(Hs):
            for e in H.edges:
                mults[row, index[e]] += 1
        for k in range(1, 14 // (n - 1) + 2):
            expected = packable_many(n, mults, k)
            for H, exp in zip(Hs, expected):
                got = isinstance(tree_packing(H, k), TreePacking)
                total += 1
                if got != bool(exp):
                    mismatches.append((H, k))
    ok = not mismatches
    report(10, "matroid union vs partition enumeration", ok, f"{total} (multigraph, k) pairs, {len(mismatches)} disagreements", t)
    assert ok


# -- 11 ---------------------------------------------------------------------

def test_criterion_11_ears_and_reductions():
    t = time.perf_counter()
    rng = random.Random(11)
    ear_fail, red_fail, reductions = 0, 0, 0
    for _ in range(50):
        G = random_m_connected(rng)
        if not verify_ear_decomposition(G, ear_decomposition(G)).ok:
            ear_fail += 1
        if G.n >= 5 and is_3c_redundant_2d(G):
            reductions += 1
            red_fail += not verify_reduction(G, find_reduction(G)).ok
    # a separate pool of 3-connected redundantly rigid graphs
    pool = 0
    while pool < 50:
        G = random_m_connected(rng)
        if G.n >= 5 and is_3c_redundant_2d(G):
            pool += 1
            reductions += 1
            red_fail += not verify_reduction(G, find_reduction(G)).ok
    ok = ear_fail == 0 and red_fail == 0
    detail = f"50 ear decompositions ({ear_fail} failed), {reductions} reductions ({red_fail} failed)"
    report(11, "ear decompositions and reductions", ok, detail, t)
    assert ok


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for test in tests:
        try:
            test()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
