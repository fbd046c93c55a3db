"""Exact linear algebra over the integers.

Everything in this module works with arbitrary-precision Python ints; no
floating point anywhere.  The workhorse is ``smith_normal_form``, which
returns the invariant factors of an integer matrix together with the
unimodular transforms that realize them.  On top of it sit the kernel and
cokernel computations and the canonical form of finitely generated abelian
groups that the rest of the package reports its answers in.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "SmithForm",
    "FinAbGroup",
    "smith_normal_form",
    "cokernel",
    "kernel_basis",
    "exterior_power_matrix",
    "solve_integer",
]


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix, entries stored row-major.

    >>> a = IntMatrix.from_rows([[1, 2], [3, 4]])
    >>> a.get(1, 0)
    3
    >>> (a @ IntMatrix.identity(2)) == a
    True
    """

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        flat = tuple(int(x) for r in rows for x in r)
        return cls(len(rows), ncols, flat)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]]) -> "IntMatrix":
        return cls.from_rows(list(zip(*cols))) if cols else cls(0, 0, ())

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diagonal(cls, diag: Sequence[int]) -> "IntMatrix":
        n = len(diag)
        return cls(n, n, tuple(diag[i] if i == j else 0 for i in range(n) for j in range(n)))

    def get(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row_lists(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c : (i + 1) * c]) for i in range(self.rows)]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.cols,
            self.rows,
            tuple(self.get(i, j) for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            ri = self.entries[i * self.cols : (i + 1) * self.cols]
            for j in range(other.cols):
                out.append(sum(ri[k] * other.get(k, j) for k in range(self.cols)))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        rows = [a + b for a, b in zip(self.row_lists(), other.row_lists())]
        return IntMatrix.from_rows(rows) if rows else IntMatrix(0, self.cols + other.cols, ())

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return IntMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix(
            len(row_idx),
            len(col_idx),
            tuple(self.get(i, j) for i in row_idx for j in col_idx),
        )

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.row_lists()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    # Bareiss: the division is exact
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and self.det() in (1, -1)

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.row_lists())


@dataclass(frozen=True)
class SmithForm:
    """Smith normal form data: U @ A @ V is the diagonal matrix of ``d``.

    ``d`` holds the full diagonal of length min(rows, cols); the nonzero
    prefix is the chain of invariant factors d_1 | d_2 | ..., trailing
    zeros fill out the rank deficiency.
    """

    d: tuple[int, ...]
    U: IntMatrix
    V: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for x in self.d if x != 0)

    def diagonal_matrix(self, rows: int, cols: int) -> IntMatrix:
        return IntMatrix(
            rows, cols, tuple(self.d[i] if i == j and i < len(self.d) else 0 for i in range(rows) for j in range(cols))
        )


def _find_pivot(a: list[list[int]], t: int, m: int, n: int):
    """Smallest nonzero |entry| in a[t:, t:]; ties broken by lowest (row, col)."""
    best = None
    best_val = None
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            x = row[j]
            if x != 0:
                ax = -x if x < 0 else x
                if best_val is None or ax < best_val:
                    best_val = ax
                    best = (i, j)
                    if ax == 1:
                        return best
    return best


def smith_normal_form(mat: IntMatrix) -> SmithForm:
    """Diagonalize ``mat`` over Z by unimodular row and column operations.

    >>> form = smith_normal_form(IntMatrix.from_rows([[2, 4], [6, 8]]))
    >>> form.d
    (2, 4)
    >>> form = smith_normal_form(IntMatrix.from_rows([[-1, -1], [1, -1]]))
    >>> form.d
    (1, 2)
    """
    m, n = mat.rows, mat.cols
    a = mat.row_lists()
    u = IntMatrix.identity(m).row_lists()
    v = [list(row) for row in IntMatrix.identity(n).row_lists()]
    r = min(m, n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        # row dst += c * row src
        ad, asrc = a[dst], a[src]
        for k in range(n):
            ad[k] += c * asrc[k]
        ud, usrc = u[dst], u[src]
        for k in range(m):
            ud[k] += c * usrc[k]

    def add_col(dst, src, c):
        for row in a:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < r:
        piv = _find_pivot(a, t, m, n)
        if piv is None:
            break
        pi, pj = piv
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        if a[t][t] < 0:
            negate_row(t)

        while True:
            # clear below and to the right of the pivot; floor division
            # leaves remainders in [0, pivot), so re-pivoting on a nonzero
            # remainder strictly shrinks the pivot and the loop terminates
            for i in range(t + 1, m):
                if a[i][t] != 0:
                    add_row(i, t, -(a[i][t] // a[t][t]))
            for j in range(t + 1, n):
                if a[t][j] != 0:
                    add_col(j, t, -(a[t][j] // a[t][t]))
            col_clear = all(a[i][t] == 0 for i in range(t + 1, m))
            row_clear = all(a[t][j] == 0 for j in range(t + 1, n))
            if not (col_clear and row_clear):
                piv = _find_pivot(a, t, m, n)
                pi, pj = piv
                if pi != t:
                    swap_rows(t, pi)
                if pj != t:
                    swap_cols(t, pj)
                if a[t][t] < 0:
                    negate_row(t)
                continue
            # divisibility sweep over the remaining block
            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % a[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(t, offender, 1)
        t += 1

    d = tuple(a[i][i] for i in range(r))
    return SmithForm(d, IntMatrix.from_rows(u) if m else IntMatrix(0, 0, ()), IntMatrix.from_rows(v) if n else IntMatrix(0, 0, ()))


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _canonical_invariant_factors(divisors: Iterable[int]) -> tuple[int, ...]:
    """Invariant factors in ascending divisibility order for Z/d1 + Z/d2 + ..."""
    primary: dict[int, list[int]] = {}
    for d in divisors:
        if d < 0:
            d = -d
        if d in (0, 1):
            continue
        for p, e in _factorize(d).items():
            primary.setdefault(p, []).append(e)
    if not primary:
        return ()
    depth = max(len(v) for v in primary.values())
    factors = []
    for slot in range(depth):
        f = 1
        for p, exps in primary.items():
            exps_sorted = sorted(exps, reverse=True)
            if slot < len(exps_sorted):
                f *= p ** exps_sorted[slot]
        factors.append(f)
    return tuple(reversed(factors))


@dataclass(frozen=True)
class FinAbGroup:
    """Finitely generated abelian group in canonical invariant-factor form.

    ``torsion`` is the ascending divisibility chain of factors >= 2 and
    ``free_rank`` counts the Z summands.

    >>> FinAbGroup.from_divisors([2, 3])
    FinAbGroup(torsion=(6,), free_rank=0)
    >>> print(FinAbGroup(torsion=(2, 2, 2), free_rank=1))
    Z + Z_2^3
    >>> FinAbGroup.cyclic(6) == FinAbGroup.from_divisors([2, 3])
    True
    """

    torsion: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for x in self.torsion:
            if x < 2:
                raise ValueError("torsion factors must be >= 2")
        for x, y in zip(self.torsion, self.torsion[1:]):
            if y % x != 0:
                raise ValueError(f"torsion factors must form a divisibility chain, got {self.torsion}")

    @classmethod
    def trivial(cls) -> "FinAbGroup":
        return cls()

    @classmethod
    def free(cls, rank: int) -> "FinAbGroup":
        return cls(free_rank=rank)

    @classmethod
    def cyclic(cls, n: int) -> "FinAbGroup":
        if n == 0:
            return cls(free_rank=1)
        return cls() if abs(n) == 1 else cls(torsion=(abs(n),))

    @classmethod
    def from_divisors(cls, divisors: Iterable[int], free_rank: int = 0) -> "FinAbGroup":
        return cls(torsion=_canonical_invariant_factors(divisors), free_rank=free_rank)

    def direct_sum(self, *others: "FinAbGroup") -> "FinAbGroup":
        divisors = list(self.torsion)
        rank = self.free_rank
        for g in others:
            divisors.extend(g.torsion)
            rank += g.free_rank
        return FinAbGroup.from_divisors(divisors, rank)

    @property
    def order(self) -> int | None:
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        n = 1
        for x in self.torsion:
            n *= x
        return n

    def is_trivial(self) -> bool:
        return not self.torsion and self.free_rank == 0

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        for factor, block in itertools.groupby(self.torsion):
            k = len(list(block))
            parts.append(f"Z_{factor}" if k == 1 else f"Z_{factor}^{k}")
        return " + ".join(parts) if parts else "0"


def cokernel(mat: IntMatrix) -> FinAbGroup:
    """Z^cols modulo the subgroup generated by the rows of ``mat``.

    >>> cokernel(IntMatrix.from_rows([[2]]))
    FinAbGroup(torsion=(2,), free_rank=0)
    >>> cokernel(IntMatrix.from_rows([[-1, -1], [1, -2]]))
    FinAbGroup(torsion=(3,), free_rank=0)
    """
    form = smith_normal_form(mat)
    return FinAbGroup.from_divisors(
        (x for x in form.d if x != 0), free_rank=mat.cols - form.rank
    )


def kernel_basis(mat: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of the right kernel {x : mat @ x = 0}.

    >>> kernel_basis(IntMatrix.from_rows([[1, -1]])).column(0)
    (1, 1)
    >>> kernel_basis(IntMatrix.identity(3)).cols
    0
    """
    form = smith_normal_form(mat)
    rank = form.rank
    cols = list(range(rank, mat.cols))
    return form.V.submatrix(list(range(mat.cols)), cols)


def exterior_power_matrix(mat: IntMatrix, q: int) -> IntMatrix:
    """Matrix of the induced map on the q-th exterior power.

    Bases are q-element index subsets in lexicographic order; entries are
    the corresponding q x q minors.

    >>> lam2 = exterior_power_matrix(IntMatrix.diagonal([1, -1, -1]), 2)
    >>> [lam2.get(i, i) for i in range(3)]
    [-1, -1, 1]
    """
    if q < 0:
        raise ValueError("exterior power must be nonnegative")
    if q == 0:
        return IntMatrix.from_rows([[1]])
    row_sets = list(itertools.combinations(range(mat.rows), q))
    col_sets = list(itertools.combinations(range(mat.cols), q))
    entries = tuple(
        mat.submatrix(rs, cs).det() for rs in row_sets for cs in col_sets
    )
    return IntMatrix(len(row_sets), len(col_sets), entries)


def solve_integer(mat: IntMatrix, rhs: IntMatrix) -> IntMatrix:
    """One integer solution X of mat @ X = rhs, or ValueError if none exists."""
    if mat.rows != rhs.rows:
        raise ValueError("row count mismatch")
    form = smith_normal_form(mat)
    # U A V = D, so A X = rhs iff D (V^-1 X) = U rhs
    target = form.U @ rhs
    y_rows: list[list[int]] = []
    for i in range(mat.cols):
        di = form.d[i] if i < len(form.d) else 0
        row = []
        for j in range(rhs.cols):
            ti = target.get(i, j) if i < target.rows else 0
            if di == 0:
                if ti != 0:
                    raise ValueError("no integer solution")
                row.append(0)
            else:
                if ti % di != 0:
                    raise ValueError("no integer solution")
                row.append(ti // di)
        y_rows.append(row)
    # unsolvable rows of D (beyond cols) must have zero target
    for i in range(mat.cols, mat.rows):
        for j in range(rhs.cols):
            if target.get(i, j) != 0:
                raise ValueError("no integer solution")
    y = IntMatrix.from_rows(y_rows) if y_rows else IntMatrix(0, rhs.cols, ())
    return form.V @ y
