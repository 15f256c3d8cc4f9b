from fractions import Fraction

import pytest

from rigikit.algebra import SparseMatrix, rank
from rigikit.errors import NoStressError
from rigikit.graph_core import SimpleGraph, complete_bipartite, complete_graph, cycle_graph, octahedron
from rigikit.rigidity_alg import (
    INAPPLICABLE,
    PROBABLY_GR,
    PROBABLY_NOT,
    Framework,
    equilibrium_stress_sample,
    generic_rank,
    ght_global_rigidity_test,
    infinitesimal_rigidity_exact,
    is_redundantly_rigid,
    is_rigid,
    is_vertex_redundantly_rigid,
    rigid_rank,
    rigidity_matrix,
    stress_matrix_rank,
    trivial_motions,
)

from conftest import k4_minus_edge, k5_one_extension

TRIANGLE = [(0, 0), (1, 0), (0, 1)]


def test_rigidity_matrix_single_edge():
    F = Framework(SimpleGraph.from_edges(2, [(0, 1)]), 2, [(0, 0), (1, 0)], modulus=None)
    assert rigidity_matrix(F).to_dense() == [[-1, 0, 1, 0]]


def test_rigidity_matrix_triangle():
    F = Framework(complete_graph(3), 2, TRIANGLE, modulus=None)
    M = rigidity_matrix(F)
    assert (M.rows, M.cols) == (3, 6)
    assert rank(M) == 3


def test_rigidity_matrix_rows_are_point_differences():
    F = Framework(complete_graph(3), 2, [(2, 5), (7, 1), (3, 3)], modulus=None)
    dense = rigidity_matrix(F).to_dense()
    for row, (u, v) in zip(dense, F.graph.sorted_edges):
        diff = [F.config[u][k] - F.config[v][k] for k in range(2)]
        assert row[2 * u: 2 * u + 2] == diff
        assert row[2 * v: 2 * v + 2] == [-x for x in diff]


def test_generic_rank_examples():
    K4 = complete_graph(4)
    assert rigidity_matrix(Framework(K4, 2, [(1, 2), (3, 5), (7, 11), (13, 4)])).rows == 6
    assert generic_rank(K4, 2) == 5
    assert generic_rank(cycle_graph(4), 2) == 4
    assert generic_rank(complete_bipartite(4, 5), 3) == 20


def test_is_rigid_examples():
    assert is_rigid(k4_minus_edge(), 2)
    assert not is_rigid(cycle_graph(4), 2)
    assert is_rigid(complete_bipartite(5, 5), 3)
    assert rigid_rank(10, 3) == 24


def test_redundant_examples():
    assert is_redundantly_rigid(complete_graph(4), 2) == (True, None)
    ok, e = is_redundantly_rigid(k4_minus_edge(), 2)
    assert not ok and not is_rigid(k4_minus_edge().remove_edge(*e), 2)
    assert is_redundantly_rigid(complete_bipartite(5, 5), 3)[0]


def test_vertex_redundant_examples():
    assert is_vertex_redundantly_rigid(complete_graph(4), 2) == (True, None)
    assert is_vertex_redundantly_rigid(octahedron(), 2) == (True, None)
    ok, v = is_vertex_redundantly_rigid(complete_bipartite(5, 5), 3)
    assert not ok and v is not None


def test_infinitesimal_exact_examples():
    ok, motion = infinitesimal_rigidity_exact(Framework(complete_graph(3), 2, TRIANGLE, modulus=None))
    assert ok and motion is None
    square = Framework(cycle_graph(4), 2, [(0, 0), (1, 0), (1, 1), (0, 1)], modulus=None)
    ok, motion = infinitesimal_rigidity_exact(square)
    assert not ok
    R = rigidity_matrix(square)
    flat = [x for vec in motion for x in vec]
    assert R.matvec(flat) == [0] * 4
    triv = [list(t) for t in trivial_motions(square)]
    M = SparseMatrix.from_dense(triv, modulus=None)
    assert rank(SparseMatrix.from_dense(triv + [flat], modulus=None)) == rank(M) + 1


def test_single_edge_is_infinitesimally_rigid():
    # on a line the trivial motions of R^2 span 3 dimensions, equal to the kernel
    F = Framework(SimpleGraph.from_edges(2, [(0, 1)]), 2, [(0, 0), (1, 0)], modulus=None)
    assert infinitesimal_rigidity_exact(F)[0]


def test_collinear_triangle_is_flexible():
    F = Framework(complete_graph(3), 2, [(0, 0), (1, 0), (2, 0)], modulus=None)
    ok, motion = infinitesimal_rigidity_exact(F)
    assert not ok and any(motion)


def test_stress_examples():
    s = equilibrium_stress_sample(complete_graph(4), 2, seed=1)
    assert s.stress_dim == 1 and all(s.omega.values())
    with pytest.raises(NoStressError):
        equilibrium_stress_sample(k4_minus_edge(), 2)
    s = equilibrium_stress_sample(complete_graph(5), 3)
    assert s.rigidity_rank == 9 and s.stress_dim == 1


def test_stress_matrix_kernel_contains_configuration():
    s = equilibrium_stress_sample(complete_graph(4), 2, seed=2)
    assert stress_matrix_rank(4, s.omega) == 1


def test_ght_examples():
    r = ght_global_rigidity_test(complete_graph(4), 2)
    assert r.status == PROBABLY_GR and r.ranks[-1] == 1
    assert ght_global_rigidity_test(k4_minus_edge(), 2).status == PROBABLY_NOT
    r = ght_global_rigidity_test(complete_bipartite(5, 5), 3)
    assert r.status == PROBABLY_NOT and max(r.ranks) < 6
    assert ght_global_rigidity_test(cycle_graph(5), 2).status == INAPPLICABLE
    r = ght_global_rigidity_test(k5_one_extension(), 3)
    assert r.status == PROBABLY_GR and r.target == 2


def test_seeds_are_reproducible():
    G = complete_bipartite(5, 5)
    assert ght_global_rigidity_test(G, 3, seed=9) == ght_global_rigidity_test(G, 3, seed=9)
    a = equilibrium_stress_sample(G, 3, seed=4)
    b = equilibrium_stress_sample(G, 3, seed=4)
    assert a.omega == b.omega


def test_framework_validation():
    with pytest.raises(ValueError):
        Framework(complete_graph(3), 2, [(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        Framework(complete_graph(2), 2, [(0, 0), (1, 0, 0)])
    F = Framework(complete_graph(2), 1, [(Fraction(1, 2),), (3,)], modulus=None)
    assert F.config[0] == (Fraction(1, 2),)
