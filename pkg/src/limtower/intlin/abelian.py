"""Finitely generated abelian groups in invariant-factor normal form.

An element of ``Z^r + Z/d_1 + ... + Z/d_t`` is a tuple of ``r + t`` integers:
the free coordinates first, then the torsion coordinates, each reduced
into ``[0, d_i)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from ..errors import DimensionError, ElementError, HomError
from .matrix import IntMatrix, block_diag, hstack, vadd, vneg, vsub
from .smith import (column_lattice_basis, kernel_basis, smith_normal_form,
                    solve_integer_system, solve_matrix)


@dataclass(frozen=True)
class FgAbGroup:
    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for i, d in enumerate(self.torsion):
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
            if i and d % self.torsion[i - 1]:
                raise ValueError(f"invariant factors {self.torsion} do not form a divisor chain")

    @classmethod
    def trivial(cls) -> FgAbGroup:
        return cls(0, ())

    @classmethod
    def free(cls, n: int) -> FgAbGroup:
        return cls(n, ())

    @classmethod
    def cyclic(cls, n: int) -> FgAbGroup:
        """Z/n, with ``cyclic(0)`` meaning Z and ``cyclic(1)`` the trivial group."""
        if n == 0:
            return cls(1, ())
        if abs(n) == 1:
            return cls.trivial()
        return cls(0, (abs(n),))

    @classmethod
    def from_invariants(cls, free_rank: int, factors: Sequence[int]) -> FgAbGroup:
        """Normal form of ``Z^free_rank + sum Z/f`` for arbitrary positive factors."""
        rel = IntMatrix.diagonal(list(factors))
        coker = cokernel_of_matrix(rel)
        return cls(free_rank + coker.group.free_rank, coker.group.torsion)

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def moduli(self) -> tuple:
        """Per-coordinate modulus, 0 for free coordinates."""
        return (0,) * self.free_rank + self.torsion

    def order(self) -> Optional[int]:
        if self.free_rank:
            return None
        return math.prod(self.torsion)

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def relation_matrix(self) -> IntMatrix:
        """Columns generate the relations among the standard generators."""
        cols = []
        for i, d in enumerate(self.torsion):
            c = [0] * self.ngens
            c[self.free_rank + i] = d
            cols.append(c)
        return IntMatrix.from_columns(cols, self.ngens)

    def reduce(self, x: Sequence[int]) -> tuple:
        if len(x) != self.ngens:
            raise ElementError(f"element of length {len(x)} in a group with {self.ngens} generators")
        return tuple(int(v) % m if m else int(v) for v, m in zip(x, self.moduli))

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.ngens and all(
            (0 <= v < m) if m else True for v, m in zip(x, self.moduli))

    def check(self, x: Sequence[int]) -> tuple:
        if not self.contains(x):
            raise ElementError(f"{tuple(x)} is not a reduced element of {self}")
        return tuple(x)

    def zero(self) -> tuple:
        return (0,) * self.ngens

    def add(self, x, y) -> tuple:
        return self.reduce(vadd(x, y))

    def sub(self, x, y) -> tuple:
        return self.reduce(vsub(x, y))

    def neg(self, x) -> tuple:
        return self.reduce(vneg(x))

    def scale(self, c: int, x) -> tuple:
        return self.reduce([c * v for v in x])

    def basis(self) -> list:
        return [tuple(1 if i == j else 0 for j in range(self.ngens)) for i in range(self.ngens)]

    def elements(self) -> Iterator[tuple]:
        """Enumerate a finite group in lexicographic order (zero first)."""
        if self.free_rank:
            raise ElementError("cannot enumerate an infinite group")
        return (tuple(t) for t in itertools.product(*(range(d) for d in self.torsion)))

    def __str__(self) -> str:
        parts = (["Z"] if self.free_rank == 1 else [f"Z^{self.free_rank}"] if self.free_rank else [])
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class GroupHom:
    """A homomorphism given by a (codomain.ngens x domain.ngens) integer matrix."""

    domain: FgAbGroup
    codomain: FgAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.codomain.ngens, self.domain.ngens):
            raise HomError(f"matrix of shape {self.matrix.shape} for a map "
                           f"{self.domain} -> {self.codomain}")
        for i, d in enumerate(self.domain.torsion):
            col = self.matrix.col(self.domain.free_rank + i)
            if any(self.codomain.reduce([d * x for x in col])):
                raise HomError(f"generator of order {d} is sent to {col}, whose {d}-fold "
                               f"multiple is nonzero in {self.codomain}")

    @classmethod
    def zero(cls, domain: FgAbGroup, codomain: FgAbGroup) -> GroupHom:
        return cls(domain, codomain, IntMatrix.zeros(codomain.ngens, domain.ngens))

    @classmethod
    def identity(cls, group: FgAbGroup) -> GroupHom:
        return cls(group, group, IntMatrix.identity(group.ngens))

    def __call__(self, x: Sequence[int]) -> tuple:
        return self.codomain.reduce(self.matrix.apply(self.domain.reduce(x)))

    def __matmul__(self, other: GroupHom) -> GroupHom:
        """Composition ``self o other``."""
        if other.codomain != self.domain:
            raise HomError(f"cannot compose {other.domain}->{other.codomain} "
                           f"with {self.domain}->{self.codomain}")
        return GroupHom(other.domain, self.codomain, self._reduced(self.matrix @ other.matrix))

    def __add__(self, other: GroupHom) -> GroupHom:
        self._same_signature(other)
        return GroupHom(self.domain, self.codomain, self._reduced(self.matrix + other.matrix))

    def __sub__(self, other: GroupHom) -> GroupHom:
        self._same_signature(other)
        return GroupHom(self.domain, self.codomain, self._reduced(self.matrix - other.matrix))

    def __neg__(self) -> GroupHom:
        return GroupHom(self.domain, self.codomain, self._reduced(-self.matrix))

    def _same_signature(self, other):
        if (self.domain, self.codomain) != (other.domain, other.codomain):
            raise HomError("homomorphisms have different domain or codomain")

    def _reduced(self, m: IntMatrix) -> IntMatrix:
        return IntMatrix.from_columns([self.codomain.reduce(c) for c in m.columns()], m.rows)

    def normalized(self) -> GroupHom:
        """Same map with every image column reduced; equal maps compare equal."""
        return GroupHom(self.domain, self.codomain, self._reduced(self.matrix))

    def equals(self, other: GroupHom) -> bool:
        return (self.domain == other.domain and self.codomain == other.codomain
                and self.normalized().matrix == other.normalized().matrix)

    def preimage(self, y: Sequence[int]) -> Optional[tuple]:
        """Some ``x`` with ``self(x) == y``, or ``None``."""
        y = self.codomain.reduce(y)
        aug = hstack([self.matrix, self.codomain.relation_matrix()])
        sol = solve_integer_system(aug, y)
        if sol is None:
            return None
        return self.domain.reduce(sol[:self.domain.ngens])

    def kernel(self) -> tuple:
        """``(K, inclusion)`` with ``inclusion: K -> domain`` onto the kernel."""
        aug = hstack([self.matrix, self.codomain.relation_matrix()])
        gens = kernel_basis(aug).select_rows(range(self.domain.ngens))
        return subgroup(self.domain, gens)

    def image(self) -> tuple:
        """``(I, inclusion)`` with ``inclusion: I -> codomain`` onto the image."""
        return subgroup(self.codomain, self.matrix)

    def cokernel(self) -> Cokernel:
        return cokernel_classify(self)

    def is_surjective(self) -> bool:
        return cokernel_classify(self).group.is_trivial()

    def is_injective(self) -> bool:
        return self.kernel()[0].is_trivial()

    def is_isomorphism(self) -> bool:
        # f.g. abelian groups are Hopfian: a surjection between isomorphic ones is injective
        return self.domain == self.codomain and self.is_surjective()


@dataclass(frozen=True)
class Cokernel:
    """``group = ambient / image``, with the quotient map and a set-theoretic section."""

    group: FgAbGroup
    projection: GroupHom
    section_matrix: IntMatrix

    def section(self, x: Sequence[int]) -> tuple:
        """A representative in the ambient group of the cokernel element ``x``."""
        amb = self.projection.domain
        return amb.reduce(self.section_matrix.apply(self.group.check(tuple(x))))


def cokernel_of_matrix(relations: IntMatrix, ambient: Optional[FgAbGroup] = None) -> Cokernel:
    """Classify ``ambient / <columns of relations>``; ambient defaults to Z^rows."""
    m = relations.rows
    if ambient is None:
        ambient = FgAbGroup.free(m)
    elif ambient.ngens != m:
        raise DimensionError("relation matrix rows do not match the ambient group")
    full = hstack([relations, ambient.relation_matrix()], rows=m)
    snf = smith_normal_form(full)
    diag = snf.diagonal
    free_idx = list(range(snf.rank, m))
    tors_idx = [i for i, d in enumerate(diag) if d > 1]
    group = FgAbGroup(len(free_idx), tuple(diag[i] for i in tors_idx))
    keep = free_idx + tors_idx
    proj = GroupHom(ambient, group, snf.u.select_rows(keep)).normalized()
    section = snf.u_inv.select_cols(keep)
    return Cokernel(group, proj, section)


def cokernel_classify(h: GroupHom) -> Cokernel:
    """Normal form of ``codomain / image(h)`` with its projection."""
    return cokernel_of_matrix(h.matrix, h.codomain)


def subgroup(group: FgAbGroup, gens: IntMatrix) -> tuple:
    """``(H, inclusion)`` for the subgroup of ``group`` generated by the columns of ``gens``."""
    if gens.rows != group.ngens:
        raise DimensionError("generator columns do not match the group")
    rel = group.relation_matrix()
    basis = column_lattice_basis(hstack([gens, rel], rows=group.ngens))
    rel_coords = solve_matrix(basis, rel)
    assert rel_coords is not None
    coker = cokernel_of_matrix(rel_coords)
    inc = basis @ coker.section_matrix
    return coker.group, GroupHom(coker.group, group, inc).normalized()


def contains_subgroup(group: FgAbGroup, big: IntMatrix, small: IntMatrix) -> bool:
    """True iff every column of ``small`` lies in the subgroup generated by ``big``."""
    aug = hstack([big, group.relation_matrix()], rows=group.ngens)
    return all(solve_integer_system(aug, c) is not None for c in small.columns())


def same_subgroup(group: FgAbGroup, a: IntMatrix, b: IntMatrix) -> bool:
    return contains_subgroup(group, a, b) and contains_subgroup(group, b, a)


@dataclass(frozen=True)
class DirectSum:
    """Normal form of a direct sum with its injections and projections."""

    group: FgAbGroup
    summands: tuple
    injections: tuple
    projections: tuple


def direct_sum(groups: Sequence[FgAbGroup]) -> DirectSum:
    groups = tuple(groups)
    rel = block_diag([g.relation_matrix() for g in groups])
    n = sum(g.ngens for g in groups)
    if not groups or n == 0:
        triv = FgAbGroup.trivial()
        return DirectSum(triv, groups, tuple(GroupHom.zero(g, triv) for g in groups),
                         tuple(GroupHom.zero(triv, g) for g in groups))
    coker = cokernel_of_matrix(rel)
    total = coker.group
    inj, proj = [], []
    offset = 0
    for g in groups:
        idx = range(offset, offset + g.ngens)
        inj.append(GroupHom(g, total, coker.projection.matrix.select_cols(idx)).normalized())
        proj.append(GroupHom(total, g, coker.section_matrix.select_rows(idx)).normalized())
        offset += g.ngens
    return DirectSum(total, groups, tuple(inj), tuple(proj))
