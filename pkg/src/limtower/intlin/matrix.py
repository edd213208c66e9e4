"""Immutable dense integer matrices and integer vector helpers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import DimensionError

Vector = tuple  # tuple[int, ...]


def vec(values: Iterable[int]) -> tuple:
    return tuple(int(x) for x in values)


def zero_vec(n: int) -> tuple:
    return (0,) * n


def vadd(a: Sequence[int], b: Sequence[int]) -> tuple:
    if len(a) != len(b):
        raise DimensionError(f"vector lengths differ: {len(a)} != {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence[int], b: Sequence[int]) -> tuple:
    if len(a) != len(b):
        raise DimensionError(f"vector lengths differ: {len(a)} != {len(b)}")
    return tuple(x - y for x, y in zip(a, b))


def vneg(a: Sequence[int]) -> tuple:
    return tuple(-x for x in a)


def vscale(c: int, a: Sequence[int]) -> tuple:
    return tuple(c * x for x in a)


def is_zero_vec(a: Sequence[int]) -> bool:
    return not any(a)


@dataclass(frozen=True)
class IntMatrix:
    """A rows x cols matrix of Python integers, stored row-major."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionError("negative matrix dimension")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise DimensionError("ragged row list")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> IntMatrix:
        columns = [list(c) for c in columns]
        for c in columns:
            if len(c) != rows:
                raise DimensionError("column of wrong length")
        n = len(columns)
        return cls(rows, n, tuple(int(columns[j][i]) for i in range(rows) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int | None = None, cols: int | None = None) -> IntMatrix:
        k = len(values)
        rows = k if rows is None else rows
        cols = k if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(values):
            out[i][i] = d
        return cls.from_rows(out, cols)

    @classmethod
    def scalar(cls, c: int, n: int) -> IntMatrix:
        return cls.diagonal([c] * n)

    # -- access -----------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols] if self.cols else ()

    def tolist(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list:
        return [self.col(j) for j in range(self.cols)]

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_square(self) -> bool:
        return self.rows == self.cols

    # -- arithmetic -------------------------------------------------------

    def apply(self, x: Sequence[int]) -> tuple:
        if len(x) != self.cols:
            raise DimensionError(f"vector of length {len(x)} against {self.rows}x{self.cols}")
        c = self.cols
        e = self.entries
        return tuple(sum(e[i * c + j] * x[j] for j in range(c) if x[j]) for i in range(self.rows))

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        a, b = self.tolist(), other.tolist()
        m, k, n = self.rows, self.cols, other.cols
        out = []
        for i in range(m):
            ai = a[i]
            row = [0] * n
            for t in range(k):
                x = ai[t]
                if x:
                    bt = b[t]
                    for j in range(n):
                        if bt[j]:
                            row[j] += x * bt[j]
            out.extend(row)
        return IntMatrix(m, n, tuple(out))

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return IntMatrix(self.rows, self.cols, tuple(x + y for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {other.shape} from {self.shape}")
        return IntMatrix(self.rows, self.cols, tuple(x - y for x, y in zip(self.entries, other.entries)))

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def scale(self, c: int) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(c * x for x in self.entries))

    @property
    def T(self) -> IntMatrix:
        return IntMatrix.from_columns([self.row(i) for i in range(self.rows)], self.cols)

    def power(self, k: int) -> IntMatrix:
        if not self.is_square():
            raise DimensionError("power of a non-square matrix")
        result = IntMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if not self.is_square():
            raise DimensionError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.tolist()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    # -- block structure --------------------------------------------------

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> IntMatrix:
        return IntMatrix.from_rows([[self[i, j] for j in cols] for i in rows], len(cols))

    def select_rows(self, rows: Sequence[int]) -> IntMatrix:
        return self.submatrix(rows, range(self.cols))

    def select_cols(self, cols: Sequence[int]) -> IntMatrix:
        return self.submatrix(range(self.rows), cols)

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r})" if self.rows else f"IntMatrix.zeros(0, {self.cols})"


def hstack(blocks: Sequence[IntMatrix], rows: int | None = None) -> IntMatrix:
    if not blocks:
        return IntMatrix.zeros(rows or 0, 0)
    m = blocks[0].rows
    if any(b.rows != m for b in blocks):
        raise DimensionError("hstack blocks have different row counts")
    return IntMatrix.from_rows([[x for b in blocks for x in b.row(i)] for i in range(m)],
                               sum(b.cols for b in blocks))


def vstack(blocks: Sequence[IntMatrix], cols: int | None = None) -> IntMatrix:
    if not blocks:
        return IntMatrix.zeros(0, cols or 0)
    n = blocks[0].cols
    if any(b.cols != n for b in blocks):
        raise DimensionError("vstack blocks have different column counts")
    return IntMatrix(sum(b.rows for b in blocks), n, tuple(x for b in blocks for x in b.entries))


def block_matrix(grid: Sequence[Sequence[IntMatrix]]) -> IntMatrix:
    return vstack([hstack(list(row)) for row in grid])


def block_diag(blocks: Sequence[IntMatrix]) -> IntMatrix:
    total_cols = sum(b.cols for b in blocks)
    out = []
    offset = 0
    for b in blocks:
        for i in range(b.rows):
            row = [0] * total_cols
            row[offset:offset + b.cols] = b.row(i)
            out.append(row)
        offset += b.cols
    return IntMatrix.from_rows(out, total_cols)
