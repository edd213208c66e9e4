"""Bounded chain complexes of free abelian groups and their homology.

A complex is stored as its ranks in degrees ``0..top_degree`` together with
the boundary matrices; every degree outside that range is the zero group.
Homology, bounding chains and lifts all reduce to integer linear systems
solved through the Smith form, so every returned chain is canonical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import DegreeError, DimensionError, HomError, NotACycle
from .intlin import (Cokernel, FgAbGroup, GroupHom, IntMatrix, block_diag, block_matrix,
                     cokernel_of_matrix, is_surjective, kernel_basis, kernel_coordinates,
                     solve_integer_system, vadd, vneg, vsub)


@dataclass(frozen=True)
class ChainComplex:
    ranks: tuple
    boundaries: tuple  # boundaries[k - 1] is d_k: C_k -> C_{k-1}
    _homology: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        if not ranks or any(r < 0 for r in ranks):
            raise DimensionError("a complex needs at least degree 0 and non-negative ranks")
        object.__setattr__(self, "ranks", ranks)
        bnd = tuple(self.boundaries)
        object.__setattr__(self, "boundaries", bnd)
        if len(bnd) != len(ranks) - 1:
            raise DimensionError(f"expected {len(ranks) - 1} boundary matrices, got {len(bnd)}")
        for k, d in enumerate(bnd, start=1):
            if d.shape != (ranks[k - 1], ranks[k]):
                raise DimensionError(f"d_{k} has shape {d.shape}, expected {(ranks[k - 1], ranks[k])}")
        for k in range(2, len(ranks)):
            if not (bnd[k - 2] @ bnd[k - 1]).is_zero():
                raise DimensionError(f"d_{k - 1} d_{k} is not zero")

    @classmethod
    def zero(cls, top: int = 0) -> ChainComplex:
        return cls((0,) * (top + 1), tuple(IntMatrix.zeros(0, 0) for _ in range(top)))

    @classmethod
    def concentrated(cls, k: int, n: int = 1) -> ChainComplex:
        """``Z^n`` in degree ``k``, zero elsewhere."""
        ranks = [0] * k + [n]
        return cls(tuple(ranks), tuple(IntMatrix.zeros(ranks[i - 1], ranks[i]) for i in range(1, k + 1)))

    @property
    def top_degree(self) -> int:
        return len(self.ranks) - 1

    def rank(self, k: int) -> int:
        return self.ranks[k] if 0 <= k < len(self.ranks) else 0

    def boundary(self, k: int) -> IntMatrix:
        """``d_k``, including the zero maps at the ends of the range."""
        if 1 <= k <= self.top_degree:
            return self.boundaries[k - 1]
        return IntMatrix.zeros(self.rank(k - 1), self.rank(k))

    def d(self, k: int, x: Sequence[int]) -> tuple:
        return self.boundary(k).apply(self.check_chain(k, x))

    def check_chain(self, k: int, x: Sequence[int]) -> tuple:
        x = tuple(int(v) for v in x)
        if len(x) != self.rank(k):
            raise DimensionError(f"chain of length {len(x)} in degree {k} of rank {self.rank(k)}")
        return x

    def is_cycle(self, k: int, x: Sequence[int]) -> bool:
        return not any(self.d(k, x))

    def zero_chain(self, k: int) -> tuple:
        return (0,) * self.rank(k)

    def is_acyclic(self) -> bool:
        return all(homology(self, k).group.is_trivial() for k in range(self.top_degree + 1))


@dataclass(frozen=True)
class Homology:
    """``H_k`` of a complex with the maps between cycles and classes."""

    complex: ChainComplex
    degree: int
    group: FgAbGroup
    cycles: IntMatrix
    quotient: Cokernel

    def class_of(self, z: Sequence[int]) -> tuple:
        z = self.complex.check_chain(self.degree, z)
        if not self.complex.is_cycle(self.degree, z):
            raise NotACycle(f"chain is not a cycle in degree {self.degree}")
        coords = kernel_coordinates(self.complex.boundary(self.degree), z)
        return self.quotient.projection(coords)

    def representative(self, element: Sequence[int]) -> tuple:
        return self.cycles.apply(self.quotient.section(element))

    def equal(self, z1, z2) -> bool:
        return self.class_of(z1) == self.class_of(z2)

    def is_zero(self, z) -> bool:
        return not any(self.class_of(z))


def homology(c: ChainComplex, k: int, strict: bool = True) -> Homology:
    """``H_k(c) = ker d_k / im d_{k+1}``.

    With ``strict`` (the default) only ``0 <= k <= top_degree`` is accepted;
    otherwise degrees above the top give the trivial group.
    """
    if k < 0 or (strict and k > c.top_degree):
        raise DegreeError(f"degree {k} outside 0..{c.top_degree}")
    cached = c._homology.get(k)
    if cached is not None:
        return cached
    dk = c.boundary(k)
    cycles = kernel_basis(dk)
    dk1 = c.boundary(k + 1)
    rel = IntMatrix.from_columns([kernel_coordinates(dk, col) for col in dk1.columns()], cycles.cols)
    quotient = cokernel_of_matrix(rel)
    h = Homology(c, k, quotient.group, cycles, quotient)
    c._homology[k] = h
    return h


@dataclass(frozen=True)
class HomologyClass:
    complex: ChainComplex
    degree: int
    representative: tuple

    def __post_init__(self):
        rep = self.complex.check_chain(self.degree, self.representative)
        object.__setattr__(self, "representative", rep)
        if not self.complex.is_cycle(self.degree, rep):
            raise NotACycle("homology class representative is not a cycle")

    @property
    def element(self) -> tuple:
        return homology(self.complex, self.degree, strict=False).class_of(self.representative)

    def is_zero(self) -> bool:
        return not any(self.element)

    def __eq__(self, other):
        if not isinstance(other, HomologyClass):
            return NotImplemented
        return (self.complex == other.complex and self.degree == other.degree
                and self.element == other.element)

    def __hash__(self):
        return hash((self.complex, self.degree, self.element))


@dataclass(frozen=True)
class Nullhomotopy:
    """A chain ``b`` in degree ``k+1`` with ``d b = z``."""

    complex: ChainComplex
    degree: int
    chain: tuple
    target: tuple

    def __post_init__(self):
        c, k = self.complex, self.degree
        object.__setattr__(self, "chain", c.check_chain(k + 1, self.chain))
        object.__setattr__(self, "target", c.check_chain(k, self.target))
        if c.d(k + 1, self.chain) != self.target:
            raise NotACycle("bounding chain does not bound its target")


def solve_boundary(c: ChainComplex, k: int, z: Sequence[int]) -> Optional[Nullhomotopy]:
    """Canonical ``b`` with ``d b = z``, or ``None`` when ``[z] != 0``."""
    z = c.check_chain(k, z)
    if not c.is_cycle(k, z):
        raise NotACycle(f"chain is not a cycle in degree {k}")
    b = solve_integer_system(c.boundary(k + 1), z)
    if b is None:
        return None
    return Nullhomotopy(c, k, b, z)


# -- chain maps -----------------------------------------------------------------

@dataclass(frozen=True)
class ChainMap:
    """Per-degree matrices ``f_k`` for ``k = 0..max(top degrees)``."""

    source: ChainComplex
    target: ChainComplex
    matrices: tuple

    def __post_init__(self):
        top = max(self.source.top_degree, self.target.top_degree)
        mats = tuple(self.matrices)
        if len(mats) != top + 1:
            raise DimensionError(f"expected {top + 1} matrices, got {len(mats)}")
        object.__setattr__(self, "matrices", mats)
        for k, m in enumerate(mats):
            if m.shape != (self.target.rank(k), self.source.rank(k)):
                raise DimensionError(f"f_{k} has shape {m.shape}")
        for k in range(1, top + 1):
            if mats[k - 1] @ self.source.boundary(k) != self.target.boundary(k) @ mats[k]:
                raise HomError(f"chain map condition fails in degree {k}")

    @property
    def top_degree(self) -> int:
        return len(self.matrices) - 1

    @classmethod
    def identity(cls, c: ChainComplex) -> ChainMap:
        return cls(c, c, tuple(IntMatrix.identity(r) for r in c.ranks))

    @classmethod
    def zero(cls, source: ChainComplex, target: ChainComplex) -> ChainMap:
        top = max(source.top_degree, target.top_degree)
        return cls(source, target,
                   tuple(IntMatrix.zeros(target.rank(k), source.rank(k)) for k in range(top + 1)))

    def matrix(self, k: int) -> IntMatrix:
        if 0 <= k < len(self.matrices):
            return self.matrices[k]
        return IntMatrix.zeros(self.target.rank(k), self.source.rank(k))

    def apply(self, k: int, x: Sequence[int]) -> tuple:
        return self.matrix(k).apply(self.source.check_chain(k, x))

    def __matmul__(self, other: ChainMap) -> ChainMap:
        if other.target != self.source:
            raise HomError("cannot compose chain maps: target and source differ")
        top = max(other.source.top_degree, self.target.top_degree)
        return ChainMap(other.source, self.target,
                        tuple(self.matrix(k) @ other.matrix(k) for k in range(top + 1)))

    def __add__(self, other: ChainMap) -> ChainMap:
        if (self.source, self.target) != (other.source, other.target):
            raise HomError("cannot add chain maps with different signatures")
        return ChainMap(self.source, self.target,
                        tuple(a + b for a, b in zip(self.matrices, other.matrices)))

    def __neg__(self) -> ChainMap:
        return self.scale(-1)

    def scale(self, c: int) -> ChainMap:
        return ChainMap(self.source, self.target, tuple(m.scale(c) for m in self.matrices))

    def is_surjective(self, k: Optional[int] = None) -> bool:
        """Degreewise surjectivity, in one degree or in all of them."""
        degrees = range(self.top_degree + 1) if k is None else (k,)
        return all(is_surjective(self.matrix(d)) for d in degrees)

    def is_fibration(self) -> bool:
        """Surjective in every positive degree.

        Degree 0 is exempt: a map that is onto in degree 0 is onto on
        ``H_0``, which no replacement can force.
        """
        return all(is_surjective(self.matrix(d)) for d in range(1, self.top_degree + 1))


def induced_map(f: ChainMap, k: int) -> GroupHom:
    """``f_*: H_k(source) -> H_k(target)``."""
    hs = homology(f.source, k, strict=False)
    ht = homology(f.target, k, strict=False)
    cols = [ht.class_of(f.apply(k, hs.representative(e))) for e in hs.group.basis()]
    return GroupHom(hs.group, ht.group, IntMatrix.from_columns(cols, ht.group.ngens)).normalized()


@dataclass(frozen=True)
class QuasiIsoReport:
    is_quasi_iso: bool
    induced: tuple  # GroupHom per degree
    failing: tuple


def is_quasi_iso(f: ChainMap) -> QuasiIsoReport:
    induced = tuple(induced_map(f, k) for k in range(f.top_degree + 1))
    failing = tuple(k for k, h in enumerate(induced) if not h.is_isomorphism())
    return QuasiIsoReport(not failing, induced, failing)


def solve_lift(q: ChainMap, k: int, y: Sequence[int]) -> Optional[tuple]:
    """Canonical ``x`` with ``q_k(x) = y``, or ``None``."""
    y = tuple(y)
    if len(y) != q.target.rank(k):
        raise DimensionError(f"chain of length {len(y)} in degree {k} of rank {q.target.rank(k)}")
    return solve_integer_system(q.matrix(k), y)


# -- constructions --------------------------------------------------------------

def direct_sum_complex(parts: Sequence[ChainComplex]) -> ChainComplex:
    top = max(p.top_degree for p in parts)
    ranks = tuple(sum(p.rank(k) for p in parts) for k in range(top + 1))
    bnd = tuple(block_diag([p.boundary(k) for p in parts]) for k in range(1, top + 1))
    return ChainComplex(ranks, bnd)


def direct_sum_map(f: ChainMap, g: ChainMap, source: Optional[ChainComplex] = None,
                   target: Optional[ChainComplex] = None) -> ChainMap:
    source = source or direct_sum_complex([f.source, g.source])
    target = target or direct_sum_complex([f.target, g.target])
    top = max(source.top_degree, target.top_degree)
    return ChainMap(source, target, tuple(block_diag([f.matrix(k), g.matrix(k)]) for k in range(top + 1)))


def cone(f: ChainMap) -> ChainComplex:
    """``Cone_k = B_k + A_{k-1}`` with ``d(b, a) = (d b + f a, -d a)``."""
    a, b = f.source, f.target
    top = max(b.top_degree, a.top_degree + 1)
    ranks = tuple(b.rank(k) + a.rank(k - 1) for k in range(top + 1))
    bnd = []
    for k in range(1, top + 1):
        bnd.append(block_matrix([
            [b.boundary(k), f.matrix(k - 1)],
            [IntMatrix.zeros(a.rank(k - 2), b.rank(k)), -a.boundary(k - 1)],
        ]))
    return ChainComplex(ranks, tuple(bnd))


@dataclass(frozen=True)
class PathReplacement:
    """``f = ev1 . j`` with ``j`` a quasi-isomorphism and ``ev1`` surjective."""

    complex: ChainComplex
    j: ChainMap
    ev1: ChainMap


def path_fibration_replace(f: ChainMap) -> PathReplacement:
    """Factor ``f: A -> B`` through the mapping path complex.

    In degree ``k >= 1``, ``E_k = A_k + B_k + B_{k+1}`` with coordinates
    ``(a, x1, h)`` and ``d(a, x1, h) = (d a, d x1, x1 - f a - d h)``: the
    pullback along ``f`` of the path object of ``B`` at its start point.
    In degree 0 only the tuples with ``x1 = f a + d h`` are kept, so
    ``E_0 = A_0 + B_1`` with coordinates ``(a, h)``. That truncation keeps
    ``j(a) = (a, f a, 0)`` a quasi-isomorphism. ``ev1`` reads off ``x1``,
    which is ``f a + d h`` in degree 0.
    """
    a, b = f.source, f.target
    top = max(a.top_degree, b.top_degree)
    z = IntMatrix.zeros
    ranks = [a.rank(0) + b.rank(1)]
    ranks += [a.rank(k) + b.rank(k) + b.rank(k + 1) for k in range(1, top + 1)]
    bnd = []
    for k in range(1, top + 1):
        a_row = [a.boundary(k), z(a.rank(k - 1), b.rank(k)), z(a.rank(k - 1), b.rank(k + 1))]
        h_row = [-f.matrix(k), IntMatrix.identity(b.rank(k)), -b.boundary(k + 1)]
        if k == 1:
            bnd.append(block_matrix([a_row, h_row]))
        else:
            x_row = [z(b.rank(k - 1), a.rank(k)), b.boundary(k), z(b.rank(k - 1), b.rank(k + 1))]
            bnd.append(block_matrix([a_row, x_row, h_row]))
    e = ChainComplex(tuple(ranks), tuple(bnd))
    j_mats = [block_matrix([[IntMatrix.identity(a.rank(0))], [z(b.rank(1), a.rank(0))]])]
    ev_mats = [block_matrix([[f.matrix(0), b.boundary(1)]])]
    for k in range(1, top + 1):
        ra, rb, rh = a.rank(k), b.rank(k), b.rank(k + 1)
        j_mats.append(block_matrix([[IntMatrix.identity(ra)], [f.matrix(k)], [z(rh, ra)]]))
        ev_mats.append(block_matrix([[z(rb, ra), IntMatrix.identity(rb), z(rb, rh)]]))
    return PathReplacement(e, ChainMap(a, e, tuple(j_mats)), ChainMap(e, b, tuple(ev_mats)))


def chain_add(x: Sequence[int], y: Sequence[int]) -> tuple:
    return vadd(x, y)


def chain_sub(x: Sequence[int], y: Sequence[int]) -> tuple:
    return vsub(x, y)


def chain_neg(x: Sequence[int]) -> tuple:
    return vneg(x)
