"""Smith normal form over the integers and the solvers built on it."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from ..errors import DimensionError
from .matrix import IntMatrix


@dataclass(frozen=True)
class SmithForm:
    """``u @ source @ v == s`` with ``u``, ``v`` unimodular and ``s`` diagonal.

    The nonzero diagonal entries of ``s`` are positive and each divides the
    next. ``u_inv`` and ``v_inv`` are the exact inverses of ``u`` and ``v``.
    """

    u: IntMatrix
    s: IntMatrix
    v: IntMatrix
    source: IntMatrix
    u_inv: IntMatrix
    v_inv: IntMatrix
    rank: int

    @property
    def diagonal(self) -> tuple:
        return tuple(self.s[i, i] for i in range(self.rank))

    def check(self) -> bool:
        return (self.u @ self.source @ self.v == self.s
                and abs(self.u.det()) == 1 and abs(self.v.det()) == 1)


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


class _Reducer:
    """Row/column operations on a work matrix, mirrored on the transforms."""

    def __init__(self, a: IntMatrix):
        self.m, self.n = a.rows, a.cols
        self.a = a.tolist()
        self.u = _identity(self.m)
        self.ui = _identity(self.m)
        self.v = _identity(self.n)
        self.vi = _identity(self.n)

    # row i += c * row j
    def add_row(self, i, j, c):
        if not c:
            return
        for mat in (self.a, self.u):
            ri, rj = mat[i], mat[j]
            for k in range(len(ri)):
                if rj[k]:
                    ri[k] += c * rj[k]
        for r in self.ui:
            r[j] -= c * r[i]

    def swap_rows(self, i, j):
        if i == j:
            return
        for mat in (self.a, self.u):
            mat[i], mat[j] = mat[j], mat[i]
        for r in self.ui:
            r[i], r[j] = r[j], r[i]

    def negate_row(self, i):
        for mat in (self.a, self.u):
            mat[i] = [-x for x in mat[i]]
        for r in self.ui:
            r[i] = -r[i]

    # col j += c * col i
    def add_col(self, j, i, c):
        if not c:
            return
        for mat in (self.a, self.v):
            for r in mat:
                if r[i]:
                    r[j] += c * r[i]
        ri, rj = self.vi[i], self.vi[j]
        for k in range(len(ri)):
            if rj[k]:
                ri[k] -= c * rj[k]

    def swap_cols(self, i, j):
        if i == j:
            return
        for mat in (self.a, self.v):
            for r in mat:
                r[i], r[j] = r[j], r[i]
        self.vi[i], self.vi[j] = self.vi[j], self.vi[i]

    def run(self) -> int:
        a, m, n = self.a, self.m, self.n
        t = 0
        while t < min(m, n):
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if a[i][j] and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            self.swap_rows(t, pivot[0])
            self.swap_cols(t, pivot[1])
            while True:
                self._clear_line(t)
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % a[t][t]), None)
                if bad is None:
                    break
                self.add_row(t, bad[0], 1)
            if a[t][t] < 0:
                self.negate_row(t)
            t += 1
        return t

    def _clear_line(self, t):
        a, m, n = self.a, self.m, self.n
        while True:
            for i in range(t + 1, m):
                if a[i][t]:
                    self.add_row(i, t, -(a[i][t] // a[t][t]))
            for j in range(t + 1, n):
                if a[t][j]:
                    self.add_col(j, t, -(a[t][j] // a[t][t]))
            best = None
            for i in range(t + 1, m):
                if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                    best = (abs(a[i][t]), "row", i)
            for j in range(t + 1, n):
                if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                    best = (abs(a[t][j]), "col", j)
            if best is None:
                return
            if best[1] == "row":
                self.swap_rows(t, best[2])
            else:
                self.swap_cols(t, best[2])


@lru_cache(maxsize=8192)
def smith_normal_form(a: IntMatrix) -> SmithForm:
    r = _Reducer(a)
    rank = r.run()
    return SmithForm(
        u=IntMatrix.from_rows(r.u, a.rows),
        s=IntMatrix.from_rows(r.a, a.cols),
        v=IntMatrix.from_rows(r.v, a.cols),
        source=a,
        u_inv=IntMatrix.from_rows(r.ui, a.rows),
        v_inv=IntMatrix.from_rows(r.vi, a.cols),
        rank=rank,
    )


def solve_integer_system(a: IntMatrix, b: Sequence[int]) -> Optional[tuple]:
    """Return an integer ``x`` with ``a x = b``, or ``None`` if there is none.

    The particular solution is canonical: in the coordinates ``y = v^-1 x``
    given by the Smith form, every free coordinate is zero.
    """
    if len(b) != a.rows:
        raise DimensionError(f"right-hand side of length {len(b)} for {a.rows} equations")
    snf = smith_normal_form(a)
    c = snf.u.apply(b)
    y = [0] * a.cols
    for i, d in enumerate(snf.diagonal):
        q, rem = divmod(c[i], d)
        if rem:
            return None
        y[i] = q
    if any(c[snf.rank:]):
        return None
    return snf.v.apply(y)


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of ``{x : a x = 0}``."""
    snf = smith_normal_form(a)
    return snf.v.select_cols(range(snf.rank, a.cols))


def kernel_coordinates(a: IntMatrix, x: Sequence[int]) -> tuple:
    """Coordinates of a kernel vector ``x`` in the basis of ``kernel_basis(a)``."""
    snf = smith_normal_form(a)
    y = snf.v_inv.apply(x)
    if any(y[:snf.rank]):
        raise DimensionError("vector is not in the kernel")
    return y[snf.rank:]


def column_lattice_basis(a: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of the lattice spanned by the columns of ``a``."""
    snf = smith_normal_form(a)
    cols = [tuple(d * x for x in snf.u_inv.col(i)) for i, d in enumerate(snf.diagonal)]
    return IntMatrix.from_columns(cols, a.rows)


def rank(a: IntMatrix) -> int:
    return smith_normal_form(a).rank


def is_surjective(a: IntMatrix) -> bool:
    """True iff the columns of ``a`` span all of Z^rows."""
    snf = smith_normal_form(a)
    return snf.rank == a.rows and all(d == 1 for d in snf.diagonal)


def solve_matrix(a: IntMatrix, b: IntMatrix) -> Optional[IntMatrix]:
    """Integer ``x`` with ``a @ x == b``, column by column, or ``None``."""
    cols = []
    for j in range(b.cols):
        x = solve_integer_system(a, b.col(j))
        if x is None:
            return None
        cols.append(x)
    return IntMatrix.from_columns(cols, a.cols)
