"""Matrices over the polynomial ring and exact rational linear algebra.

Polynomial determinants use fraction-free Bareiss elimination (every
division is exact) with a memoized cofactor expansion as the alternative
for very sparse matrices.  Rational kernels, ranks and linear solves run
ordinary Gaussian elimination over ``Fraction``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from freediv.polyring import Polynomial, WeightSystem, exact_divide


@dataclass(frozen=True)
class PolyMatrix:
    """Rectangular matrix of polynomials sharing one ring."""

    ring: WeightSystem
    entries: tuple[tuple[Polynomial, ...], ...]

    @staticmethod
    def from_rows(rows: Sequence[Sequence[Polynomial]]) -> "PolyMatrix":
        if not rows:
            raise ValueError("empty matrix")
        width = len(rows[0])
        ring = rows[0][0].ring
        for row in rows:
            if len(row) != width:
                raise ValueError("ragged rows")
            for p in row:
                if p.ring != ring:
                    raise ValueError("mixed rings in matrix")
        return PolyMatrix(ring, tuple(tuple(row) for row in rows))

    @staticmethod
    def identity(ring: WeightSystem, n: int) -> "PolyMatrix":
        one, zero = ring.one(), ring.zero()
        return PolyMatrix(
            ring, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))
        )

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def entry(self, i: int, j: int) -> Polynomial:
        return self.entries[i][j]

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.ring, tuple(zip(*self.entries)))

    def is_symmetric(self) -> bool:
        if self.rows != self.cols:
            return False
        return all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.rows)
            for j in range(i + 1, self.cols)
        )

    def map_entries(self, f: Callable[[Polynomial], Polynomial]) -> "PolyMatrix":
        return PolyMatrix.from_rows([[f(p) for p in row] for row in self.entries])

    def submatrix(self, drop_row: int, drop_col: int) -> "PolyMatrix":
        rows = [
            [p for j, p in enumerate(row) if j != drop_col]
            for i, row in enumerate(self.entries)
            if i != drop_row
        ]
        return PolyMatrix.from_rows(rows)

    def mul(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        rows = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                s = self.ring.zero()
                for t in range(self.cols):
                    s = s + self.entries[i][t] * other.entries[t][j]
                row.append(s)
            rows.append(row)
        return PolyMatrix.from_rows(rows)

    # -- determinants --------------------------------------------------------

    def det(self) -> Polynomial:
        """Exact determinant; picks Bareiss or memoized cofactors by sparsity."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n >= 5:
            nonzero = sum(1 for row in self.entries for p in row if not p.is_zero())
            if nonzero <= n * n // 2:
                return self.det_cofactor()
        return self.det_bareiss()

    def det_bareiss(self) -> Polynomial:
        """Fraction-free Bareiss elimination; every division is exact."""
        n = self.rows
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        if n == 0:
            return self.ring.one()
        a = [list(row) for row in self.entries]
        sign = 1
        prev = self.ring.one()
        for k in range(n - 1):
            pivot_row = k
            while pivot_row < n and a[pivot_row][k].is_zero():
                pivot_row += 1
            if pivot_row == n:
                return self.ring.zero()
            if pivot_row != k:
                a[k], a[pivot_row] = a[pivot_row], a[k]
                sign = -sign
            pivot = a[k][k]
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = pivot * a[i][j] - a[i][k] * a[k][j]
                    q = exact_divide(num, prev)
                    assert q is not None, "Bareiss division must be exact"
                    a[i][j] = q
                a[i][k] = self.ring.zero()
            prev = pivot
        d = a[n - 1][n - 1]
        return d if sign == 1 else -d

    def det_cofactor(self) -> Polynomial:
        """Cofactor expansion memoized on the set of remaining rows."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        memo: dict[frozenset, Polynomial] = {}

        def rec(rows: tuple[int, ...]) -> Polynomial:
            if not rows:
                return self.ring.one()
            key = frozenset(rows)
            hit = memo.get(key)
            if hit is not None:
                return hit
            col = n - len(rows)
            total = self.ring.zero()
            for pos, i in enumerate(rows):
                e = self.entries[i][col]
                if e.is_zero():
                    continue
                sub = rec(rows[:pos] + rows[pos + 1 :])
                term = e * sub
                total = total + term if pos % 2 == 0 else total - term
            memo[key] = total
            return total

        return rec(tuple(range(n)))

    def minor(self, i: int, j: int) -> Polynomial:
        """Determinant after deleting row ``i`` and column ``j`` (no sign factor)."""
        if self.rows != self.cols:
            raise ValueError("minor of a non-square matrix")
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError("minor index out of range")
        if self.rows == 1:
            return self.ring.one()  # empty determinant
        return self.submatrix(i, j).det()


# -- exact rational linear algebra --------------------------------------------

Row = list[Fraction]


def _as_fractions(rows: Sequence[Sequence]) -> list[Row]:
    return [[Fraction(x) for x in row] for row in rows]


def normalize_vector(vec: Sequence[Fraction]) -> list[int]:
    """Scale to integer entries with content 1 and first nonzero entry positive."""
    denom = math.lcm(*(f.denominator for f in vec)) if vec else 1
    ints = [int(f * denom) for f in vec]
    g = math.gcd(*(abs(v) for v in ints)) if any(ints) else 1
    if g == 0:
        g = 1
    ints = [v // g for v in ints]
    for v in ints:
        if v:
            if v < 0:
                ints = [-w for w in ints]
            break
    return ints


def rref(rows: Sequence[Sequence]) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = _as_fractions(rows)
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def kernel_basis(rows: Sequence[Sequence], ncols: Optional[int] = None) -> list[list[int]]:
    """Basis of the right null space, one vector per free column.

    Vectors are integer with content 1 and first nonzero entry positive,
    ordered by free column index.
    """
    if not rows:
        if ncols is None:
            raise ValueError("ncols required for an empty system")
        basis = []
        for c in range(ncols):
            v = [0] * ncols
            v[c] = 1
            basis.append(v)
        return basis
    ncols = len(rows[0])
    ech, pivots = rref(rows)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -ech[r][fc]
        basis.append(normalize_vector(v))
    return basis


def solve_linear(rows: Sequence[Sequence], rhs: Sequence) -> Optional[Row]:
    """One exact solution of ``A x = b`` (free variables set to 0), or None."""
    if not rows:
        return None if any(Fraction(b) != 0 for b in rhs) else []
    ncols = len(rows[0])
    aug = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(rows, rhs)]
    ech, pivots = rref(aug)
    for row in ech:
        if all(x == 0 for x in row[:-1]) and row[-1] != 0:
            return None
    if pivots and pivots[-1] == ncols:
        return None  # pivot in the augmented column: inconsistent
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = ech[r][-1]
    return x


class RankTracker:
    """Incremental exact rank computation over the rationals."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._echelon: dict[int, Row] = {}  # pivot column -> normalized row

    @property
    def rank(self) -> int:
        return len(self._echelon)

    def add(self, vec: Sequence) -> bool:
        """Insert a vector; True iff it was independent of the span so far."""
        v = [Fraction(x) for x in vec]
        for pc in sorted(self._echelon):
            if v[pc] != 0:
                f = v[pc]
                row = self._echelon[pc]
                v = [a - f * b for a, b in zip(v, row)]
        for c, x in enumerate(v):
            if x != 0:
                self._echelon[c] = [a / x for a in v]
                return True
        return False
