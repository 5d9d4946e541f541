"""Exact dense linear algebra over F_p and Q.

Prime-field work is routed through the modular kernels (compiled when
available). Rational work is fraction-free (Bareiss) on integer matrices
obtained by clearing row denominators, which never changes ranks.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from kronspan import kernels
from kronspan.fields import Field, PrimeField, RationalField


class SingularMatrix(ArithmeticError):
    pass


def _integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction) and x.denominator != 1:
                den = lcm(den, x.denominator)
        out.append([int(Fraction(x) * den) for x in row])
    return out


def bareiss_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    a = [list(r) for r in rows]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    prev = 1
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pv = a[r][c]
        for i in range(r + 1, m):
            f = a[i][c]
            row = a[i]
            prow = a[r]
            a[i] = [(pv * row[j] - f * prow[j]) // prev if j > c else 0 for j in range(n)]
        prev = pv
        r += 1
    return r


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    a = [list(map(int, r)) for r in matrix]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * prev


def fraction_free_inverse(matrix: Sequence[Sequence[int]]) -> tuple[list[list[int]], int]:
    """Gauss-Jordan Bareiss on ``[M | I]`` for an integer matrix ``M``.

    Returns ``(X, D)`` with integer ``X`` and nonzero integer ``D`` such that
    ``M^{-1} = X / D``; ``D`` is ``det(M)`` up to sign.
    """
    n = len(matrix)
    a = [list(map(int, row)) + [int(i == j) for j in range(n)] for i, row in enumerate(matrix)]
    width = 2 * n
    prev = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            raise SingularMatrix("matrix is singular")
        a[k], a[piv] = a[piv], a[k]
        pk = a[k]
        pv = pk[k]
        for i in range(n):
            if i == k:
                continue
            row = a[i]
            f = row[k]
            a[i] = [(pv * row[j] - f * pk[j]) // prev for j in range(width)]
        prev = pv
    return [row[n:] for row in a], prev


def rank(rows: Sequence[Sequence], field: Field) -> int:
    if not rows:
        return 0
    if isinstance(field, PrimeField):
        return kernels.rank_mod_p([[field(x) for x in r] for r in rows], field.p)
    return bareiss_rank(_integer_rows(rows))


def _rref_rational(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return [], []
    m, n = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        prow = [x * inv for x in a[r]]
        a[r] = prow
        for i in range(m):
            f = a[i][c]
            if i != r and f:
                a[i] = [x - f * y for x, y in zip(a[i], prow)]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rref(rows: Sequence[Sequence], field: Field) -> tuple[list[list], list[int]]:
    """Nonzero rows of the reduced row echelon form and their pivot columns."""
    if isinstance(field, PrimeField):
        return kernels.rref_mod_p([[field(x) for x in r] for r in rows], field.p)
    return _rref_rational(rows)


def nullspace(rows: Sequence[Sequence], ncols: int, field: Field) -> list[list]:
    """Basis of ``{x : A x = 0}``, one vector per free column."""
    reduced, pivots = rref(rows, field) if rows else ([], [])
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [field.zero] * ncols
        v[free] = field.one
        for row, pc in zip(reduced, pivots):
            v[pc] = field.neg(field(row[free]))
        basis.append(v)
    return basis


def inverse(matrix: Sequence[Sequence], field: Field) -> list[list]:
    n = len(matrix)
    if isinstance(field, PrimeField):
        aug = [[field(x) for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(matrix)]
        reduced, pivots = kernels.rref_mod_p(aug, field.p)
        if pivots[:n] != list(range(n)) or len(pivots) < n:
            raise SingularMatrix("matrix is singular")
        return [row[n:] for row in reduced[:n]]
    x, d = fraction_free_inverse(_integer_rows_square(matrix))
    return [[Fraction(v, d) for v in row] for row in x]


def _integer_rows_square(matrix):
    for row in matrix:
        for x in row:
            if isinstance(x, Fraction) and x.denominator != 1:
                raise ValueError("fraction-free inverse expects an integer matrix")
    return [[int(x) for x in row] for row in matrix]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], field: Field) -> list[list]:
    cols = list(zip(*b))
    out = []
    for row in a:
        out.append([field(sum(x * y for x, y in zip(row, col))) for col in cols])
    return out


class IncrementalBasis:
    """Echelon basis over a field that accepts rows one at a time.

    ``insert`` returns True iff the row was linearly independent of the rows
    inserted so far.
    """

    def __init__(self, ncols: int, field: Field):
        self.ncols = ncols
        self.field = field
        self.rows: list[list] = []
        self.pivots: list[int] = []

    @property
    def dimension(self) -> int:
        return len(self.rows)

    def reduce(self, row: Sequence) -> list:
        f = self.field
        if isinstance(f, PrimeField):
            return kernels.reduce_row_mod_p(self.rows, self.pivots, [f(x) for x in row], f.p)
        v = [Fraction(x) for x in row]
        for b, c in zip(self.rows, self.pivots):
            coef = v[c]
            if coef:
                v = [x - coef * y for x, y in zip(v, b)]
        return v

    def insert(self, row: Sequence) -> bool:
        if len(row) != self.ncols:
            raise ValueError(f"row has length {len(row)}, expected {self.ncols}")
        v = self.reduce(row)
        c = next((j for j, x in enumerate(v) if x), None)
        if c is None:
            return False
        inv = self.field.inv(v[c])
        self.rows.append([self.field.mul(x, inv) for x in v])
        self.pivots.append(c)
        return True


def rank_two_primes(rows: Sequence[Sequence[int]], primes: tuple[int, int]) -> tuple[int, int, int]:
    """Ranks of an integer matrix modulo two primes and over Q when they disagree.

    Returns ``(rank_p1, rank_p2, rank)``; ``rank`` is exact (the common
    modular value, or the rational rank on mismatch).
    """
    r1 = rank(rows, PrimeField(primes[0]))
    r2 = rank(rows, PrimeField(primes[1]))
    if r1 == r2:
        return r1, r2, r1
    return r1, r2, rank(rows, RationalField())
