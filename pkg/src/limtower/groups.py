"""Finite groups as Cayley tables, and a small catalog of them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .errors import ElementError, HomError, TowerError
from .intlin import FgAbGroup, GroupHom


@dataclass(frozen=True)
class FiniteGroup:
    """Multiplication table on ``0..order-1`` with identity 0.

    ``table[a][b]`` is the index of ``a*b``. Group axioms are verified on
    construction, so an invalid table never escapes.
    """

    table: tuple
    inverse: tuple = ()
    labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        table = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", table)
        n = len(table)
        if n == 0 or any(len(r) != n for r in table):
            raise TowerError("Cayley table must be a non-empty square")
        if any(not 0 <= x < n for r in table for x in r):
            raise TowerError("Cayley table entry out of range")
        if table[0] != tuple(range(n)) or any(table[a][0] != a for a in range(n)):
            raise TowerError("index 0 is not the identity")
        for a in range(n):
            ta = table[a]
            for b in range(n):
                tab = table[ta[b]]
                tb = table[b]
                for c in range(n):
                    if tab[c] != ta[tb[c]]:
                        raise TowerError(f"table is not associative at ({a}, {b}, {c})")
        inv = []
        for a in range(n):
            try:
                inv.append(table[a].index(0))
            except ValueError:
                raise TowerError(f"element {a} has no inverse") from None
            if table[inv[-1]][a] != 0:
                raise TowerError(f"element {a} has no two-sided inverse")
        if self.inverse and tuple(self.inverse) != tuple(inv):
            raise TowerError("declared inverse table is wrong")
        object.__setattr__(self, "inverse", tuple(inv))

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def contains(self, a) -> bool:
        return isinstance(a, int) and 0 <= a < self.order

    def check(self, a) -> int:
        if not self.contains(a):
            raise ElementError(f"{a!r} is not an element of a group of order {self.order}")
        return a

    def is_abelian(self) -> bool:
        return all(self.table[a][b] == self.table[b][a]
                   for a in range(self.order) for b in range(a))

    def closure(self, gens: Sequence[int]) -> frozenset:
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def generators(self) -> tuple:
        """A small generating set, chosen greedily in index order."""
        gens: list = []
        span = frozenset({0})
        for x in range(self.order):
            if x not in span:
                gens.append(x)
                span = self.closure(gens)
        return tuple(gens)

    def subgroup(self, members) -> tuple:
        """``(H, inclusion)`` for a subset closed under the operation."""
        members = sorted(members)
        index = {x: i for i, x in enumerate(members)}
        try:
            table = [[index[self.table[a][b]] for b in members] for a in members]
        except KeyError:
            raise TowerError("subset is not closed under multiplication") from None
        labels = tuple(self.labels[m] for m in members) if self.labels else ()
        h = FiniteGroup(tuple(map(tuple, table)), labels=labels)
        return h, FiniteHom(h, self, tuple(members))

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"


@dataclass(frozen=True)
class FiniteHom:
    domain: FiniteGroup
    codomain: FiniteGroup
    images: tuple

    def __post_init__(self):
        images = tuple(int(x) for x in self.images)
        object.__setattr__(self, "images", images)
        if len(images) != self.domain.order:
            raise HomError("index map has the wrong length")
        if any(not 0 <= x < self.codomain.order for x in images):
            raise HomError("index map leaves the codomain")
        if images[0] != 0:
            raise HomError("index map does not preserve the identity")
        dt, ct = self.domain.table, self.codomain.table
        for a in range(self.domain.order):
            for b in range(self.domain.order):
                if images[dt[a][b]] != ct[images[a]][images[b]]:
                    raise HomError(f"index map is not multiplicative at ({a}, {b})")

    @classmethod
    def identity(cls, g: FiniteGroup) -> FiniteHom:
        return cls(g, g, tuple(range(g.order)))

    @classmethod
    def trivial(cls, g: FiniteGroup, h: FiniteGroup) -> FiniteHom:
        return cls(g, h, (0,) * g.order)

    def __call__(self, a: int) -> int:
        return self.images[self.domain.check(a)]

    def __matmul__(self, other: FiniteHom) -> FiniteHom:
        if other.codomain != self.domain:
            raise HomError("cannot compose: codomain and domain differ")
        return FiniteHom(other.domain, self.codomain, tuple(self.images[x] for x in other.images))

    def image(self) -> frozenset:
        return frozenset(self.images)


# -- conversions and catalog ------------------------------------------------

@lru_cache(maxsize=256)
def from_abelian(g: FgAbGroup) -> tuple:
    """Cayley table of a finite ``FgAbGroup`` and its element list (zero first)."""
    elems = list(g.elements())
    index = {x: i for i, x in enumerate(elems)}
    table = tuple(tuple(index[g.add(a, b)] for b in elems) for a in elems)
    return FiniteGroup(table, labels=tuple(elems)), elems


def hom_from_abelian(h: GroupHom) -> FiniteHom:
    src, src_elems = from_abelian(h.domain)
    dst, dst_elems = from_abelian(h.codomain)
    index = {x: i for i, x in enumerate(dst_elems)}
    return FiniteHom(src, dst, tuple(index[h(x)] for x in src_elems))


def permutation_group(gens: Sequence[Sequence[int]]) -> FiniteGroup:
    """Group generated by permutations; ``(s*t)(i) = s(t(i))``."""
    n = len(gens[0])
    ident = tuple(range(n))
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(x[g[i]] for i in range(n))
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    ordered = sorted(elems)
    index = {p: i for i, p in enumerate(ordered)}
    table = tuple(tuple(index[tuple(a[b[i]] for i in range(n))] for b in ordered) for a in ordered)
    return FiniteGroup(table, labels=tuple(ordered))


def cyclic(n: int) -> FiniteGroup:
    return FiniteGroup(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)),
                       labels=tuple(range(n)))


def symmetric3() -> FiniteGroup:
    return permutation_group([(1, 0, 2), (1, 2, 0)])


def dihedral4() -> FiniteGroup:
    """Symmetries of a square, order 8."""
    return permutation_group([(1, 2, 3, 0), (0, 3, 2, 1)])


def trivial_group() -> FiniteGroup:
    return FiniteGroup(((0,),))


@lru_cache(maxsize=None)
def all_homs(g: FiniteGroup, h: FiniteGroup) -> tuple:
    """Every homomorphism ``g -> h``, by assigning images to generators."""
    gens = g.generators()
    found = []
    for imgs in itertools.product(range(h.order), repeat=len(gens)):
        images = {0: 0}
        frontier = [0]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for gen, img in zip(gens, imgs):
                    y = g.table[x][gen]
                    val = h.table[images[x]][img]
                    if y in images:
                        if images[y] != val:
                            ok = False
                            break
                    else:
                        images[y] = val
                        nxt.append(y)
                if not ok:
                    break
            frontier = nxt
        if not ok:
            continue
        try:
            found.append(FiniteHom(g, h, tuple(images[x] for x in range(g.order))))
        except HomError:
            continue
    return tuple(found)
