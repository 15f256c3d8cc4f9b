"""Exact linear algebra over GF(p) and over the rationals.

Every rank statement in rigikit goes through this module. Prime-field work
uses the Mersenne prime ``2**61 - 1``; a single random evaluation of a
polynomial of total degree ``D`` vanishes with probability at most ``D / p``
(Schwartz-Zippel), which is the error bound quoted by randomized tests.

Rational matrices are ranked with fraction-free (Bareiss) elimination after
clearing denominators row by row.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import InputError

PRIME = (1 << 61) - 1

# switch sparse elimination to dense rows above this pivot-row fill ratio
DENSE_FILL = 0.30


def rng_for(seed: int, *salt) -> random.Random:
    """Independent deterministic stream for ``seed`` and a salt path."""
    return random.Random("/".join(str(s) for s in (seed, *salt)))


@dataclass
class SparseMatrix:
    """Coordinate-format matrix over GF(modulus), or over Q when ``modulus`` is None."""

    rows: int
    cols: int
    entries: dict = field(default_factory=dict)
    modulus: int | None = PRIME

    def __post_init__(self):
        clean = {}
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise InputError(f"entry ({r}, {c}) outside {self.rows}x{self.cols}")
            v = self._coerce(v)
            if v:
                clean[(r, c)] = v
        self.entries = clean

    def _coerce(self, v):
        if self.modulus is None:
            return Fraction(v)
        if isinstance(v, Fraction):
            return v.numerator * pow(v.denominator, -1, self.modulus) % self.modulus
        return int(v) % self.modulus

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], modulus: int | None = PRIME) -> "SparseMatrix":
        ncols = len(rows[0]) if rows else 0
        entries = {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v}
        return cls(len(rows), ncols, entries, modulus)

    def row_dicts(self) -> list[dict]:
        out: list[dict] = [{} for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def to_dense(self) -> list[list]:
        zero = Fraction(0) if self.modulus is None else 0
        out = [[zero] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()}, self.modulus
        )

    def matvec(self, x: Sequence) -> list:
        out = [0] * self.rows
        for (r, c), v in self.entries.items():
            out[r] += v * x[c]
        if self.modulus is not None:
            out = [y % self.modulus for y in out]
        return out

    @property
    def density(self) -> float:
        cells = self.rows * self.cols
        return len(self.entries) / cells if cells else 0.0


# -- GF(p) elimination ------------------------------------------------------

def _reduce_sparse(row: dict, pivots: dict, p: int):
    """Reduce ``row`` in place against monic pivot rows; return its leading column or None."""
    while row:
        c = min(row)
        piv = pivots.get(c)
        if piv is None:
            return c
        f = row[c]
        for k, v in piv.items():
            x = (row.get(k, 0) - f * v) % p
            if x:
                row[k] = x
            else:
                row.pop(k, None)
    return None


def _dense_rank(rows: list[list[int]], ncols: int, p: int) -> int:
    rows = [r for r in rows if any(r)]
    rank = 0
    for c in range(ncols):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], p - 2, p)
        pr = [x * inv % p for x in rows[rank][c:]]
        for i in range(rank + 1, len(rows)):
            f = rows[i][c]
            if f:
                ri = rows[i]
                ri[c:] = [(x - f * y) % p for x, y in zip(ri[c:], pr)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def rank_mod_p(rows: Iterable[dict], ncols: int, p: int = PRIME) -> int:
    """Rank of a list of sparse rows over GF(p)."""
    pending = [dict(r) for r in rows if r]
    pivots: dict[int, dict] = {}
    nnz = 0
    for idx, row in enumerate(pending):
        lead = _reduce_sparse(row, pivots, p)
        if lead is None:
            continue
        inv = pow(row[lead], p - 2, p)
        piv = {k: v * inv % p for k, v in row.items()}
        pivots[lead] = piv
        nnz += len(piv)
        if ncols > 16 and nnz > DENSE_FILL * len(pivots) * ncols:
            dense = []
            for prow in list(pivots.values()) + pending[idx + 1:]:
                r = [0] * ncols
                for k, v in prow.items():
                    r[k] = v
                dense.append(r)
            return _dense_rank(dense, ncols, p)
    return len(pivots)


def rref_mod_p(rows: Iterable[dict], ncols: int, p: int = PRIME) -> dict[int, dict]:
    """Fully reduced row echelon form: ``{pivot column: monic reduced row}``."""
    pivots: dict[int, dict] = {}
    for row in rows:
        row = dict(row)
        lead = _reduce_sparse(row, pivots, p)
        if lead is None:
            continue
        inv = pow(row[lead], p - 2, p)
        pivots[lead] = {k: v * inv % p for k, v in row.items()}
    # back substitution, highest pivot first
    for c in sorted(pivots, reverse=True):
        pc = pivots[c]
        for c2 in sorted(pivots):
            if c2 >= c:
                break
            r = pivots[c2]
            f = r.get(c)
            if f:
                for k, v in pc.items():
                    x = (r.get(k, 0) - f * v) % p
                    if x:
                        r[k] = x
                    else:
                        r.pop(k, None)
    return pivots


# -- rationals --------------------------------------------------------------

def _integer_rows(rows: Iterable[dict], ncols: int) -> list[list[int]]:
    out = []
    for r in rows:
        if not r:
            continue
        vals = {k: Fraction(v) for k, v in r.items()}
        scale = lcm(*(v.denominator for v in vals.values()))
        dense = [0] * ncols
        for k, v in vals.items():
            dense[k] = int(v * scale)
        out.append(dense)
    return out


def bareiss_rank(rows: list[list[int]], ncols: int) -> int:
    """Fraction-free Gaussian elimination on an integer matrix."""
    M = [list(r) for r in rows if any(r)]
    m = len(M)
    rank = 0
    prev = 1
    for c in range(ncols):
        piv = None
        for i in range(rank, m):
            if M[i][c]:
                piv = i
                break
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        pr = M[rank]
        pv = pr[c]
        for i in range(rank + 1, m):
            row = M[i]
            f = row[c]
            if f:
                M[i] = [(pv * x - f * y) // prev for x, y in zip(row, pr)]
            elif pv != prev:
                M[i] = [pv * x // prev for x in row]
        prev = pv
        rank += 1
        if rank == m:
            break
    return rank


def rref_rational(rows: Iterable[dict], ncols: int) -> dict[int, dict]:
    pivots: dict[int, dict] = {}
    for row in rows:
        row = {k: Fraction(v) for k, v in row.items() if v}
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                break
            f = row[c]
            for k, v in piv.items():
                x = row.get(k, 0) - f * v
                if x:
                    row[k] = x
                else:
                    row.pop(k, None)
        if not row:
            continue
        c = min(row)
        inv = 1 / row[c]
        pivots[c] = {k: v * inv for k, v in row.items()}
    for c in sorted(pivots, reverse=True):
        pc = pivots[c]
        for c2 in sorted(pivots):
            if c2 >= c:
                break
            r = pivots[c2]
            f = r.get(c)
            if f:
                for k, v in pc.items():
                    x = r.get(k, 0) - f * v
                    if x:
                        r[k] = x
                    else:
                        r.pop(k, None)
    return pivots


# -- public API -------------------------------------------------------------

def rank(M: SparseMatrix) -> int:
    """Exact rank over the matrix's field."""
    if M.modulus is None:
        return bareiss_rank(_integer_rows(M.row_dicts(), M.cols), M.cols)
    return rank_mod_p(M.row_dicts(), M.cols, M.modulus)


def rref(M: SparseMatrix) -> dict[int, dict]:
    if M.modulus is None:
        return rref_rational(M.row_dicts(), M.cols)
    return rref_mod_p(M.row_dicts(), M.cols, M.modulus)


def nullspace_basis(M: SparseMatrix) -> list[list]:
    """Basis of ``{x : Mx = 0}``, one vector per free column, in column order."""
    piv = rref(M)
    one = 1 if M.modulus is not None else Fraction(1)
    free = [c for c in range(M.cols) if c not in piv]
    basis = []
    for f in free:
        x = [0] * M.cols
        x[f] = one
        for c, row in piv.items():
            v = row.get(f)
            if v:
                x[c] = (-v) % M.modulus if M.modulus is not None else -v
        basis.append(x)
    return basis


def nullspace_sample(M: SparseMatrix, seed: int, box: int = 10**6) -> list:
    """A random non-zero vector of the nullspace of ``M``.

    Free coordinates are drawn uniformly from the field (GF(p)) or from the
    integer box ``[-box, box]`` (rationals); pivot coordinates follow.
    """
    piv = rref(M)
    free = [c for c in range(M.cols) if c not in piv]
    if not free:
        raise InputError("matrix has trivial nullspace")
    rng = rng_for(seed, "nullspace")
    p = M.modulus
    while True:
        x = [0] * M.cols
        for f in free:
            x[f] = rng.randrange(p) if p is not None else Fraction(rng.randint(-box, box))
        for c, row in piv.items():
            s = sum(v * x[k] for k, v in row.items() if k != c)
            x[c] = (-s) % p if p is not None else -s
        if any(x):
            return x
