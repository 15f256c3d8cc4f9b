from fractions import Fraction

import pytest

from rigikit.algebra import PRIME, SparseMatrix, bareiss_rank, nullspace_basis, nullspace_sample, rank, rref
from rigikit.errors import InputError


def test_rank_examples():
    assert rank(SparseMatrix.from_dense([[1, 0], [0, 1]])) == 2
    assert rank(SparseMatrix.from_dense([[0] * 3] * 3)) == 0
    assert rank(SparseMatrix.from_dense([[1, 2], [2, 4]], modulus=None)) == 1


def test_rank_mod_p_agrees_with_rational():
    rows = [[3, 1, 4, 1], [5, 9, 2, 6], [8, 10, 6, 7], [2, 7, 1, 8]]
    q = rank(SparseMatrix.from_dense(rows, modulus=None))
    assert q == rank(SparseMatrix.from_dense(rows)) == 3
    assert bareiss_rank(rows, 4) == 3


def test_rank_drops_only_at_multiples_of_p():
    # over GF(p) the matrix [[p, 1], [0, 1]] reduces to rank 1
    assert rank(SparseMatrix.from_dense([[PRIME, 1], [0, 1]])) == 1
    assert rank(SparseMatrix.from_dense([[PRIME, 1], [0, 1]], modulus=None)) == 2


def test_nullspace_examples():
    M = SparseMatrix.from_dense([[1, 1]], modulus=None)
    (x,) = nullspace_basis(M)
    assert x[0] == -x[1] and x[0] != 0
    y = nullspace_sample(M, seed=3)
    assert y[0] == -y[1] != 0
    Z = SparseMatrix(1, 2, {}, modulus=None)
    v = nullspace_sample(Z, seed=1)
    assert any(v)
    with pytest.raises(InputError):
        nullspace_sample(SparseMatrix.from_dense([[1, 0], [0, 1]]), seed=0)


def test_nullspace_vectors_are_in_kernel():
    M = SparseMatrix.from_dense([[1, 2, 3, 4], [2, 4, 6, 9]])
    for x in nullspace_basis(M):
        assert M.matvec(x) == [0, 0]
    x = nullspace_sample(M, seed=11)
    assert M.matvec(x) == [0, 0]


def test_rref_is_monic():
    M = SparseMatrix.from_dense([[2, 4], [1, 3]], modulus=None)
    piv = rref(M)
    assert set(piv) == {0, 1}
    assert all(row[c] == Fraction(1) for c, row in piv.items())


def test_out_of_range_entry():
    with pytest.raises(InputError):
        SparseMatrix(1, 1, {(1, 0): 1})
