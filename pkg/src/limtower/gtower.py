"""Towers of groups: the product-group action, lim^1 and lim.

A tower ``... -> G_{n+1} -> G_n -> ... -> G_0`` is stored as a finite window
``G_0 .. G_N`` with structure maps ``p_n: G_n -> G_{n-1}`` plus a tail policy
describing every level above ``N``:

* ``trivial``  -- ``G_n = 1`` for ``n > N``;
* ``constant`` -- ``G_n = G_N`` with identity maps;
* ``periodic`` -- ``G_n = G_N`` with a fixed endomorphism ``e`` as every map.

Families of elements ``(g_0, ..., g_N)`` carry only the window; the element
at level ``N + 1`` is taken to be the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import sympy
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ElementError, TooLarge, TowerError, Unsupported
from .groups import FiniteHom, from_abelian, hom_from_abelian, trivial_group
from .intlin import (FgAbGroup, GroupHom, IntMatrix, column_lattice_basis, direct_sum, hstack,
                     kernel_basis, rank, same_subgroup, solve_matrix, subgroup, vstack)

TAIL_KINDS = ("trivial", "constant", "periodic")
DEFAULT_ORBIT_BOUND = 10 ** 6


@dataclass(frozen=True)
class TailPolicy:
    kind: str = "trivial"
    endo: object = None

    def __post_init__(self):
        if self.kind not in TAIL_KINDS:
            raise TowerError(f"unknown tail kind {self.kind!r}")
        if (self.kind == "periodic") != (self.endo is not None):
            raise TowerError("an endomorphism is required exactly for periodic tails")

    @classmethod
    def trivial(cls):
        return cls("trivial")

    @classmethod
    def constant(cls):
        return cls("constant")

    @classmethod
    def periodic(cls, endo):
        return cls("periodic", endo)


class _TowerBase:
    """Shared level access for abelian and Cayley-table towers."""

    window: tuple
    maps: tuple
    tail: TailPolicy

    @property
    def top(self) -> int:
        return len(self.window) - 1

    @property
    def depth(self) -> int:
        return len(self.window)

    def _validate_shape(self):
        if not self.window:
            raise TowerError("a tower needs at least one level")
        if len(self.maps) != len(self.window) - 1:
            raise TowerError(f"{len(self.window)} levels need {len(self.window) - 1} maps, "
                             f"got {len(self.maps)}")
        for n, p in enumerate(self.maps, start=1):
            if p.domain != self.window[n] or p.codomain != self.window[n - 1]:
                raise TowerError(f"map p_{n} does not go from level {n} to level {n - 1}")
        if self.tail.kind == "periodic":
            e = self.tail.endo
            if e.domain != self.window[-1] or e.codomain != self.window[-1]:
                raise TowerError("tail endomorphism must act on the top window group")

    def push(self, n: int, x):
        """``p_n(x)`` for ``x`` in level ``n >= 1``."""
        return self.maps[n - 1](x)

    def check_family(self, family: Sequence) -> tuple:
        family = tuple(family)
        if len(family) != self.depth:
            raise ElementError(f"family of length {len(family)} for a window of depth {self.depth}")
        for n, x in enumerate(family):
            if not self.contains(n, x):
                raise ElementError(f"{x!r} is not an element of level {n}")
        return family

    def identity_family(self) -> tuple:
        return tuple(self.identity(n) for n in range(self.depth))

    def product(self, a: Sequence, b: Sequence) -> tuple:
        """Levelwise product in the product group."""
        return tuple(self.mul(n, x, y) for n, (x, y) in enumerate(zip(a, b)))


@dataclass(frozen=True)
class AbelianTower(_TowerBase):
    window: tuple
    maps: tuple
    tail: TailPolicy = field(default_factory=TailPolicy.trivial)

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(self.window))
        object.__setattr__(self, "maps", tuple(self.maps))
        self._validate_shape()

    def contains(self, n, x) -> bool:
        return self.window[n].contains(tuple(x))

    def identity(self, n):
        return self.window[n].zero()

    def mul(self, n, x, y):
        return self.window[n].add(x, y)

    def inv(self, n, x):
        return self.window[n].neg(x)

    def is_finite(self) -> bool:
        return all(g.is_finite() for g in self.window)

    def to_finite(self) -> FiniteGroupTower:
        """Read a tower of finite abelian groups as a Cayley-table tower."""
        if not self.is_finite():
            raise TowerError("only towers of finite groups have Cayley tables")
        window = [from_abelian(g)[0] for g in self.window]
        maps = [hom_from_abelian(p) for p in self.maps]
        endo = hom_from_abelian(self.tail.endo) if self.tail.kind == "periodic" else None
        return FiniteGroupTower(window, maps, TailPolicy(self.tail.kind, endo))

    def element_index(self, n, x) -> int:
        """Index of ``x`` in the Cayley table produced by ``to_finite``."""
        return from_abelian(self.window[n])[1].index(tuple(x))


@dataclass(frozen=True)
class FiniteGroupTower(_TowerBase):
    window: tuple
    maps: tuple
    tail: TailPolicy = field(default_factory=TailPolicy.trivial)

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(self.window))
        object.__setattr__(self, "maps", tuple(self.maps))
        self._validate_shape()

    def contains(self, n, x) -> bool:
        return self.window[n].contains(x)

    def identity(self, n):
        return 0

    def mul(self, n, x, y):
        return self.window[n].mul(x, y)

    def inv(self, n, x):
        return self.window[n].inv(x)

    def product_size(self) -> int:
        return math.prod(g.order for g in self.window)


Tower = Union[AbelianTower, FiniteGroupTower]


# -- the action ----------------------------------------------------------------

def def11_act(tower: Tower, g: Sequence, h: Sequence) -> tuple:
    """Act by ``g`` on ``h``: level ``n`` becomes ``g_n h_n p_{n+1}(g_{n+1}^{-1})``."""
    g = tower.check_family(g)
    h = tower.check_family(h)
    out = []
    for n in range(tower.depth):
        x = tower.mul(n, g[n], h[n])
        if n < tower.top:
            x = tower.mul(n, x, tower.push(n + 1, tower.inv(n + 1, g[n + 1])))
        out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class OrbitPartition:
    """Orbits of the product set, numbered by their smallest member.

    Families are encoded in mixed radix with level 0 least significant; the
    all-identity family has index 0, so orbit 0 is the basepoint orbit.
    """

    radices: tuple
    labels: np.ndarray = field(repr=False, compare=False)
    sizes: tuple

    @property
    def count(self) -> int:
        return len(self.sizes)

    @property
    def basepoint_orbit(self) -> int:
        return 0

    def index_of(self, family: Sequence[int]) -> int:
        idx, stride = 0, 1
        for x, r in zip(family, self.radices):
            idx += x * stride
            stride *= r
        return idx

    def family_of(self, index: int) -> tuple:
        out = []
        for r in self.radices:
            index, x = divmod(index, r)
            out.append(x)
        return tuple(out)

    def orbit_of(self, family: Sequence[int]) -> int:
        return int(self.labels[self.index_of(family)])

    def members(self, orbit: int) -> list:
        return [self.family_of(int(i)) for i in np.flatnonzero(self.labels == orbit)]


def lim1_orbits_window(tower: FiniteGroupTower, bound: int = DEFAULT_ORBIT_BOUND) -> OrbitPartition:
    """Partition the window product set into orbits of the product-group action."""
    if isinstance(tower, AbelianTower):
        tower = tower.to_finite()
    size = tower.product_size()
    if size > bound:
        raise TooLarge(f"product set has {size} elements, bound is {bound}")
    radices = tuple(g.order for g in tower.window)
    strides = np.cumprod((1,) + radices[:-1]).astype(np.int64)
    idx = np.arange(size, dtype=np.int64)
    digits = [(idx // strides[n]) % radices[n] for n in range(tower.depth)]
    tables = [np.array(g.table, dtype=np.int64) for g in tower.window]
    src, dst = [], []
    # the product group is generated by elements concentrated at one level
    for n, grp in enumerate(tower.window):
        for gen in grp.generators():
            new = idx + (tables[n][gen, digits[n]] - digits[n]) * strides[n]
            if n > 0:
                corr = tower.push(n, grp.inv(gen))
                new = new + (tables[n - 1][digits[n - 1], corr] - digits[n - 1]) * strides[n - 1]
            src.append(idx)
            dst.append(new)
    if src:
        rows, cols = np.concatenate(src), np.concatenate(dst)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    _, comp = connected_components(graph, directed=False)
    first = np.full(comp.max() + 1, size, dtype=np.int64)
    np.minimum.at(first, comp, idx)
    order = np.argsort(first, kind="stable")
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    labels = relabel[comp]
    sizes = tuple(int(s) for s in np.bincount(labels))
    return OrbitPartition(radices, labels, sizes)


# -- window products for abelian towers -----------------------------------

def _window_sum(tower: AbelianTower):
    return direct_sum(tower.window)


def _difference_map(tower: AbelianTower, ds) -> GroupHom:
    """``(g_n) -> (g_n - p_{n+1}(g_{n+1}))`` on the window product."""
    f = GroupHom.zero(ds.group, ds.group)
    for n in range(tower.depth):
        term = ds.projections[n]
        if n < tower.top:
            term = term - tower.maps[n] @ ds.projections[n + 1]
        f = f + ds.injections[n] @ term
    return f


@dataclass(frozen=True)
class CompatibleTuples:
    """lim of the window under a trivial or constant tail, as a subgroup of the product."""

    group: FgAbGroup
    inclusion: GroupHom
    product: object  # DirectSum of the window groups

    def component(self, n: int) -> GroupHom:
        return self.product.projections[n] @ self.inclusion


def compatible_tuples(tower: AbelianTower) -> CompatibleTuples:
    """Subgroup of ``prod G_n`` of tuples with ``p_{n+1}(a_{n+1}) = a_n``.

    Under a trivial tail the top entry must also vanish, since it is the image
    of the trivial group.
    """
    if tower.tail.kind == "periodic":
        raise Unsupported("compatible tuples are only exact for trivial or constant tails")
    ds = _window_sum(tower)
    lower = [tower.window[n] for n in range(tower.top)]
    if tower.tail.kind == "trivial":
        lower.append(tower.window[-1])
    target = direct_sum(lower)
    delta = GroupHom.zero(ds.group, target.group)
    for n in range(tower.top):
        term = ds.projections[n] - tower.maps[n] @ ds.projections[n + 1]
        delta = delta + target.injections[n] @ term
    if tower.tail.kind == "trivial":
        delta = delta + target.injections[tower.top] @ ds.projections[tower.top]
    k, inc = delta.kernel()
    return CompatibleTuples(k, inc, ds)


# -- Mittag-Leffler ------------------------------------------------------------

@dataclass(frozen=True)
class MLCertificate:
    """Why a tower is or is not Mittag-Leffler.

    ``stabilizes``: ``image(e^index) == image(e^(index+1))``.
    ``strict_descent``: the free ranks of ``image(e^index)`` and
    ``image(e^(index+1))`` agree and the lattice index between their free
    parts is ``step_index > 1``; that index is ``|det|`` of ``e`` on the
    rational image, so every later step descends strictly too.
    """

    kind: str
    index: int = 0
    step_index: Optional[int] = None
    image: Optional[IntMatrix] = None

    def verify(self, tower: AbelianTower) -> bool:
        if self.kind in ("trivial_tail", "constant_tail"):
            return self.kind == f"{tower.tail.kind}_tail"
        e = tower.tail.endo
        g = e.domain
        ek = _power_image(e, self.index)
        ek1 = _power_image(e, self.index + 1)
        if self.kind == "stabilizes":
            return same_subgroup(g, ek, ek1)
        if self.kind == "strict_descent":
            return (_free_rank(g, ek) == _free_rank(g, ek1)
                    and _free_index(g, ek, ek1) == self.step_index
                    and self.step_index > 1)
        return False


@dataclass(frozen=True)
class MLResult:
    is_ml: bool
    certificate: MLCertificate


def _power_image(e: GroupHom, k: int) -> IntMatrix:
    m = IntMatrix.identity(e.domain.ngens)
    for _ in range(k):
        m = e.matrix @ m
    return m


def _free_part(g: FgAbGroup, gens: IntMatrix) -> IntMatrix:
    return gens.select_rows(range(g.free_rank))


def _free_rank(g: FgAbGroup, gens: IntMatrix) -> int:
    return rank(_free_part(g, gens))


def _free_index(g: FgAbGroup, big: IntMatrix, small: IntMatrix) -> int:
    """Index of the free part of ``<small>`` in that of ``<big>`` (same rank)."""
    b1 = column_lattice_basis(_free_part(g, big))
    b2 = column_lattice_basis(_free_part(g, small))
    x = solve_matrix(b1, b2)
    assert x is not None and x.is_square()
    return abs(x.det())


def _stabilization(e: GroupHom) -> MLCertificate:
    g = e.domain
    torsion_order = math.prod(g.torsion)
    # rank can drop at most free_rank times, torsion can shrink at most log2 times
    limit = g.free_rank + torsion_order.bit_length() + 2
    current = IntMatrix.identity(g.ngens)
    for k in range(limit + 1):
        nxt = e.matrix @ current
        if same_subgroup(g, current, nxt):
            return MLCertificate("stabilizes", k, image=current)
        if _free_rank(g, current) == _free_rank(g, nxt):
            idx = _free_index(g, current, nxt)
            if idx > 1:
                return MLCertificate("strict_descent", k, step_index=idx, image=current)
        current = IntMatrix.from_columns([g.reduce(c) for c in nxt.columns()], g.ngens)
    raise AssertionError("image chain neither stabilized nor certified strict descent")


def mittag_leffler_check(tower: AbelianTower) -> MLResult:
    """Decide whether the images ``G_m -> G_n`` stabilize for every ``n``.

    Window levels sit below the tail, so only the tail's image chain can fail
    to stabilize.
    """
    if tower.tail.kind != "periodic":
        return MLResult(True, MLCertificate(f"{tower.tail.kind}_tail"))
    cert = _stabilization(tower.tail.endo)
    return MLResult(cert.kind == "stabilizes", cert)


# -- lim^1 -----------------------------------------------------------------------

@dataclass(frozen=True)
class Lim1Result:
    """``status`` is ``computed`` (window cokernel), ``ML`` or ``NonML``.

    A ``NonML`` result carries no group; it does not claim lim^1 is nonzero.
    """

    status: str
    group: Optional[FgAbGroup]
    ml: MLResult


def lim1_abelian(tower: AbelianTower) -> Lim1Result:
    if not isinstance(tower, AbelianTower):
        raise TowerError("lim1_abelian needs an AbelianTower")
    ml = mittag_leffler_check(tower)
    if tower.tail.kind in ("trivial", "constant"):
        ds = _window_sum(tower)
        coker = _difference_map(tower, ds).cokernel()
        return Lim1Result("computed", coker.group, ml)
    if ml.is_ml:
        return Lim1Result("ML", FgAbGroup.trivial(), ml)
    return Lim1Result("NonML", None, ml)


# -- lim ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LimResult:
    """lim with its projections ``pi_n`` to every window level.

    ``tail_automorphism`` is the bijection ``a`` of the limit group with
    ``e o pi_N = pi_N o a``; the projection to level ``N + j`` is
    ``pi_N o a^-j``.
    """

    kind: str
    group: object
    projections: tuple
    tail_automorphism: object = None


def _projections_below(tower: Tower, top_projection) -> tuple:
    projs = [top_projection]
    for n in range(tower.top, 0, -1):
        projs.append(tower.maps[n - 1] @ projs[-1])
    return tuple(reversed(projs))


def _restrict(e: GroupHom, inc: GroupHom) -> GroupHom:
    """``e`` restricted to an invariant subgroup given by its inclusion."""
    cols = []
    for b in inc.domain.basis():
        pre = inc.preimage(e(inc(b)))
        if pre is None:
            raise AssertionError("subgroup is not invariant")
        cols.append(pre)
    return GroupHom(inc.domain, inc.domain, IntMatrix.from_columns(cols, inc.domain.ngens))


def unimodular_part(e: GroupHom) -> tuple:
    """Largest subgroup on which an injective ``e`` acts invertibly.

    On the free quotient, factor the characteristic polynomial over Z; the
    factors with constant term +-1 cut out the invariant sublattice where
    ``e`` is invertible over Z. The torsion subgroup is always included.
    """
    g = e.domain
    r = g.free_rank
    free_block = e.matrix.submatrix(range(r), range(r))
    x = sympy.Symbol("x")
    poly = sympy.Matrix(free_block.tolist()).charpoly(x).as_expr() if r else sympy.Integer(1)
    _, factors = sympy.factor_list(poly, x)
    unit = []
    for f, mult in factors:
        p = sympy.Poly(f, x)
        if abs(p.eval(0)) == 1:
            unit.extend([p] * mult)
    value = IntMatrix.identity(r)
    for f in unit:
        acc = IntMatrix.zeros(r, r)
        for c in f.all_coeffs():
            acc = acc @ free_block + IntMatrix.scalar(int(c), r)
        value = value @ acc
    lattice = kernel_basis(value)
    torsion_cols = IntMatrix.identity(g.ngens).select_cols(range(r, g.ngens))
    padded = vstack([lattice, IntMatrix.zeros(len(g.torsion), lattice.cols)])
    return subgroup(g, hstack([padded, torsion_cols], rows=g.ngens))


def _finite_stable_image(e: FiniteHom) -> frozenset:
    img = frozenset(range(e.domain.order))
    while True:
        nxt = frozenset(e.images[x] for x in img)
        if nxt == img:
            return img
        img = nxt


def lim_of_tower(tower: Tower) -> LimResult:
    if isinstance(tower, FiniteGroupTower):
        return _lim_finite(tower)
    top = tower.window[-1]
    kind = tower.tail.kind
    if kind == "trivial":
        triv = FgAbGroup.trivial()
        return LimResult("trivial", triv, tuple(GroupHom.zero(triv, g) for g in tower.window))
    if kind == "constant":
        return LimResult("constant", top, _projections_below(tower, GroupHom.identity(top)),
                         GroupHom.identity(top))
    e = tower.tail.endo
    cert = _stabilization(e)
    if cert.kind == "stabilizes":
        stable, inc = subgroup(top, cert.image)
        return LimResult("stable_image", stable, _projections_below(tower, inc), _restrict(e, inc))
    if not e.is_injective():
        raise Unsupported("periodic tail is neither Mittag-Leffler nor injective")
    part, inc = unimodular_part(e)
    return LimResult("unimodular_part", part, _projections_below(tower, inc), _restrict(e, inc))


def _lim_finite(tower: FiniteGroupTower) -> LimResult:
    top = tower.window[-1]
    kind = tower.tail.kind
    if kind == "trivial":
        triv = trivial_group()
        return LimResult("trivial", triv, tuple(FiniteHom.trivial(triv, g) for g in tower.window))
    if kind == "constant":
        return LimResult("constant", top, _projections_below(tower, FiniteHom.identity(top)),
                         FiniteHom.identity(top))
    e = tower.tail.endo
    stable, inc = top.subgroup(_finite_stable_image(e))
    position = {x: i for i, x in enumerate(inc.images)}
    aut = FiniteHom(stable, stable, tuple(position[e.images[x]] for x in inc.images))
    return LimResult("stable_image", stable, _projections_below(tower, inc), aut)
