"""Exact linear algebra over the rationals.

Matrices are lists of rows of Fractions.  Ranks are computed by
fraction-free (Bareiss) elimination on integer-scaled rows, so no
intermediate value is ever approximate.  Kernels, reduced echelon forms
and incremental independence tests work directly with Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence

Vector = List[Fraction]
Matrix = List[List[Fraction]]


def _integer_rows(mat: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    """Scale each row by the lcm of its denominators (rank is unchanged)."""
    out = []
    for row in mat:
        scale = 1
        for x in row:
            d = x.denominator
            scale = scale * d // gcd(scale, d)
        out.append([int(x * scale) for x in row])
    return out


def rank(mat: Sequence[Sequence[Fraction]]) -> int:
    """Rank by fraction-free Gaussian elimination (Bareiss)."""
    if not mat or not mat[0]:
        return 0
    m = _integer_rows(mat)
    rows, cols = len(m), len(m[0])
    r = 0
    prev = 1
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
        if r == rows:
            break
    return r


def rref(mat: Matrix) -> tuple[Matrix, List[int]]:
    """Reduced row echelon form; returns (rref matrix, pivot columns)."""
    m = [list(row) for row in mat]
    if not m or not m[0]:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def nullspace(mat: Matrix, cols: int) -> List[Vector]:
    """Basis of the right kernel of `mat` (a matrix with `cols` columns)."""
    if not mat:
        basis = []
        for j in range(cols):
            v = [Fraction(0)] * cols
            v[j] = Fraction(1)
            basis.append(v)
        return basis
    red, pivots = rref(mat)
    free = [j for j in range(cols) if j not in pivots]
    basis = []
    for j in free:
        v = [Fraction(0)] * cols
        v[j] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][j]
        basis.append(v)
    return basis


class IncrementalEchelon:
    """Maintains an echelonized spanning set; add() reports rank growth."""

    def __init__(self) -> None:
        self.rows: List[Vector] = []
        self.pivots: List[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Sequence[Fraction]) -> Vector:
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            if v[p] != 0:
                f = v[p]
                for j in range(len(v)):
                    if row[j] != 0:
                        v[j] -= f * row[j]
        return v

    def add(self, vec: Sequence[Fraction]) -> bool:
        """Insert vec; True iff it was independent of the current span."""
        v = self.reduce(vec)
        for p, x in enumerate(v):
            if x != 0:
                inv = 1 / x
                self.rows.append([a * inv for a in v])
                self.pivots.append(p)
                return True
        return False


def invert(mat: Matrix) -> Optional[Matrix]:
    """Inverse of a square matrix, or None if singular."""
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix is not square")
    aug = [list(row) + [Fraction(i == j) for j in range(n)] for i, row in enumerate(mat)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in red[:n]]


def det(mat: Matrix) -> Fraction:
    """Determinant by fraction-free elimination."""
    n = len(mat)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix is not square")
    m = [list(row) for row in mat]
    sign = 1
    prev = Fraction(1)
    for c in range(n - 1):
        piv = None
        for i in range(c, n):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                m[i][j] = (m[c][c] * m[i][j] - m[i][c] * m[c][j]) / prev
            m[i][c] = Fraction(0)
        prev = m[c][c]
    return sign * m[n - 1][n - 1]
