"""Seeded random instances: groups, towers, chain complexes, cycles.

Every function takes a ``random.Random`` so that a seed fully determines
the output.
"""

from __future__ import annotations

import math
import random
from typing import Optional, Sequence

from .chaincx import ChainComplex, ChainMap, cone, direct_sum_complex, direct_sum_map, homology
from .groups import FiniteGroup, all_homs, cyclic, dihedral4, from_abelian, symmetric3
from .gtower import AbelianTower, FiniteGroupTower, TailPolicy
from .intlin import FgAbGroup, GroupHom, IntMatrix, kernel_basis, vadd

MAX_RANK = 5
MAX_WINDOW = 6
MAX_ENTRY = 4


def make_rng(seed: int) -> random.Random:
    return random.Random(seed)


def random_unimodular(rng: random.Random, n: int, steps: int = 4) -> tuple:
    """``(P, P^-1)`` for a product of a few elementary integer operations."""
    p = IntMatrix.identity(n).tolist()
    pinv = IntMatrix.identity(n).tolist()
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.choice((-1, 1))
        p[i] = [a + c * b for a, b in zip(p[i], p[j])]
        for row in pinv:
            row[j] -= c * row[i]
    if n and rng.random() < 0.3:
        i = rng.randrange(n)
        p[i] = [-a for a in p[i]]
        for row in pinv:
            row[i] = -row[i]
    return IntMatrix.from_rows(p, n), IntMatrix.from_rows(pinv, n)


# -- abelian groups and homomorphisms -----------------------------------------

def random_fgab(rng: random.Random, max_order: int = 16, max_free: int = 0) -> FgAbGroup:
    while True:
        factors = [rng.randint(2, 8) for _ in range(rng.randint(0, 2))]
        if math.prod(factors) <= max_order:
            return FgAbGroup.from_invariants(rng.randint(0, max_free), factors)


def random_hom(rng: random.Random, g: FgAbGroup, h: FgAbGroup, bound: int = MAX_ENTRY) -> GroupHom:
    cols = []
    for j, m in enumerate(g.moduli):
        col = []
        for hm in h.moduli:
            if m == 0:
                col.append(rng.randint(0, hm - 1) if hm else rng.randint(-bound, bound))
            elif hm == 0:
                col.append(0)
            else:
                step = hm // math.gcd(m, hm)
                col.append(step * rng.randint(0, hm // step - 1))
        cols.append(col)
    return GroupHom(g, h, IntMatrix.from_columns(cols, h.ngens)).normalized()


def random_abelian_tower(rng: random.Random, depth: int, tail: str = "trivial",
                         max_order: int = 16, max_free: int = 0) -> AbelianTower:
    window = [random_fgab(rng, max_order, max_free) for _ in range(depth)]
    maps = [random_hom(rng, window[n], window[n - 1]) for n in range(1, depth)]
    endo = random_hom(rng, window[-1], window[-1]) if tail == "periodic" else None
    return AbelianTower(window, maps, TailPolicy(tail, endo))


def group_catalog() -> list:
    """Small groups used for random Cayley towers, including nonabelian ones."""
    return [cyclic(1), cyclic(2), cyclic(3), cyclic(4), from_abelian(FgAbGroup(0, (2, 2)))[0],
            cyclic(6), symmetric3(), dihedral4()]


def random_finite_tower(rng: random.Random, depth: int, tail: str = "trivial",
                        catalog: Optional[Sequence[FiniteGroup]] = None) -> FiniteGroupTower:
    catalog = list(catalog or group_catalog())
    window = [rng.choice(catalog) for _ in range(depth)]
    maps = [rng.choice(all_homs(window[n], window[n - 1])) for n in range(1, depth)]
    endo = rng.choice(all_homs(window[-1], window[-1])) if tail == "periodic" else None
    return FiniteGroupTower(window, maps, TailPolicy(tail, endo))


def random_family(rng: random.Random, tower, bound: int = MAX_ENTRY) -> tuple:
    out = []
    for n, g in enumerate(tower.window):
        if isinstance(g, FiniteGroup):
            out.append(rng.randrange(g.order))
        else:
            out.append(g.reduce([rng.randint(0, m - 1) if m else rng.randint(-bound, bound)
                                 for m in g.moduli]))
    return tuple(out)


# -- chain complexes --------------------------------------------------------------

def _elementary_blocks(rng: random.Random, top: int, max_rank: int) -> list:
    """Blocks ``("S", k)`` (Z in degree k) and ``("D", k, m)`` (Z -m-> Z from k+1 to k)."""
    ranks = [0] * (top + 1)
    blocks = []
    for _ in range(rng.randint(1, 3 * (top + 1))):
        if top > 0 and rng.random() < 0.6:
            k = rng.randrange(top)
            if ranks[k] < max_rank and ranks[k + 1] < max_rank:
                m = rng.choice((1, 1, 2, 3))
                blocks.append(("D", k, m))
                ranks[k] += 1
                ranks[k + 1] += 1
        else:
            k = rng.randint(0, top)
            if ranks[k] < max_rank:
                blocks.append(("S", k))
                ranks[k] += 1
    return blocks


def random_chain_complex(rng: random.Random, top: int = 2, max_rank: int = 3) -> ChainComplex:
    """A sum of elementary complexes in a scrambled basis."""
    blocks = _elementary_blocks(rng, top, max_rank)
    basis = [[] for _ in range(top + 1)]  # per degree: (block index, position)
    for b, blk in enumerate(blocks):
        if blk[0] == "S":
            basis[blk[1]].append(b)
        else:
            basis[blk[1]].append(b)
            basis[blk[1] + 1].append(b)
    ranks = [len(x) for x in basis]
    bnd = []
    for k in range(1, top + 1):
        rows = [[0] * ranks[k] for _ in range(ranks[k - 1])]
        for j, b in enumerate(basis[k]):
            blk = blocks[b]
            if blk[0] == "D" and blk[1] == k - 1:
                rows[basis[k - 1].index(b)][j] = blk[2]
        bnd.append(IntMatrix.from_rows(rows, ranks[k]))
    changes = [random_unimodular(rng, r) for r in ranks]
    scrambled = [changes[k - 1][0] @ bnd[k - 1] @ changes[k][1] for k in range(1, top + 1)]
    return ChainComplex(tuple(ranks), tuple(scrambled))


def random_degree_raising(rng: random.Random, src: ChainComplex, dst: ChainComplex,
                          density: float = 0.3) -> list:
    """Random ``h_k: src_k -> dst_{k+1}`` with entries in {-1, 0, 1}."""
    out = []
    for k in range(src.top_degree + 1):
        rows = dst.rank(k + 1)
        out.append(IntMatrix.from_rows(
            [[rng.choice((-1, 1)) if rng.random() < density else 0 for _ in range(src.rank(k))]
             for _ in range(rows)], src.rank(k)))
    return out


def null_homotopic_map(src: ChainComplex, dst: ChainComplex, h: Sequence[IntMatrix]) -> ChainMap:
    """``d h + h d``, which is always a chain map."""
    top = max(src.top_degree, dst.top_degree)
    mats = []
    for k in range(top + 1):
        m = IntMatrix.zeros(dst.rank(k), src.rank(k))
        if k < len(h):
            m = m + dst.boundary(k + 1) @ h[k]
        if k >= 1 and k - 1 < len(h):
            m = m + h[k - 1] @ src.boundary(k)
        mats.append(m)
    return ChainMap(src, dst, tuple(mats))


def random_chain_tower(rng: random.Random, depth: int, tail: str = "constant", top: int = 2,
                       base_rank: int = 2, extra_rank: int = 1, surjective: bool = False):
    """A random tower of chain complexes.

    By default the levels are ``X_n = B + Y_n`` over one base complex ``B``
    and ``q_n`` is ``a_n`` times the identity on ``B`` plus a null-homotopic
    map, with ``a_n`` random (so usually not surjective).

    With ``surjective=True`` the levels grow instead: ``X_n = X_{n-1} + C_n``
    and ``q_n`` is the projection plus a null-homotopic map that only reads
    ``C_n``, so every ``q_n`` is onto in each degree.
    """
    from .miltower import ChainTower

    if surjective:
        levels = [random_chain_complex(rng, top, base_rank)]
        maps = []
        for n in range(1, depth):
            below = levels[-1]
            src = direct_sum_complex([below, random_chain_complex(rng, top, extra_rank)])
            proj = ChainMap(src, below, tuple(
                IntMatrix.from_rows([[1 if i == j else 0 for j in range(src.rank(k))]
                                     for i in range(below.rank(k))], src.rank(k))
                for k in range(top + 1)))
            h = random_degree_raising(rng, src, below)
            h = [IntMatrix.from_columns(
                [(0,) * hk.rows if j < below.rank(k) else hk.col(j) for j in range(hk.cols)], hk.rows)
                for k, hk in enumerate(h)]
            levels.append(src)
            maps.append(proj + null_homotopic_map(src, below, h))
    else:
        base = random_chain_complex(rng, top, base_rank)
        levels = [direct_sum_complex([base, random_chain_complex(rng, top, extra_rank)])
                  for _ in range(depth)]
        maps = []
        for n in range(1, depth):
            src, dst = levels[n], levels[n - 1]
            a = rng.choice((-1, 0, 1, 2, 2, 3))
            scaled = ChainMap(src, dst, tuple(
                IntMatrix.from_rows([[a if i == j and i < base.rank(k) else 0 for j in range(src.rank(k))]
                                     for i in range(dst.rank(k))], src.rank(k))
                for k in range(top + 1)))
            maps.append(scaled + null_homotopic_map(src, dst, random_degree_raising(rng, src, dst)))
    endo = None
    if tail == "periodic":
        endo = ChainMap.identity(levels[-1]).scale(rng.choice((1, 2, 3)))
    return ChainTower(levels, maps, TailPolicy(tail, endo))


def x2_tower(depth: int, tail: str = "constant"):
    """Z in degree 1 at every level, every map multiplication by 2."""
    from .miltower import ChainTower

    z1 = ChainComplex((0, 1), (IntMatrix.zeros(0, 1),))
    two = ChainMap(z1, z1, (IntMatrix.zeros(0, 0), IntMatrix.from_rows([[2]])))
    endo = two if tail == "periodic" else None
    return ChainTower([z1] * depth, [two] * (depth - 1), TailPolicy(tail, endo))


def cone_augmented(tower, rng: random.Random, top: Optional[int] = None):
    """``(s, f)``: levels ``X_n + Cone(id_C)`` and the inclusion ``f: tower -> s``.

    ``C`` is one random complex with identity maps, so ``s`` stays a
    fibration tower whenever ``tower`` is one.
    """
    from .miltower import ChainTower, TowerMap

    top = tower.window[0].top_degree if top is None else top
    c = random_chain_complex(rng, max(top - 1, 0), 2)
    cc = cone(ChainMap.identity(c))
    levels = [direct_sum_complex([x, cc]) for x in tower.window]
    maps = [direct_sum_map(q, ChainMap.identity(cc), levels[n + 1], levels[n])
            for n, q in enumerate(tower.maps)]
    s = ChainTower(levels, maps, tower.tail if tower.tail.kind != "periodic" else TailPolicy())
    incl = []
    for x, lv in zip(tower.window, levels):
        mats = []
        for k in range(lv.top_degree + 1):
            rows = [[1 if i == j else 0 for j in range(x.rank(k))] for i in range(lv.rank(k))]
            mats.append(IntMatrix.from_rows(rows, x.rank(k)))
        incl.append(ChainMap(x, lv, tuple(mats)))
    return s, TowerMap(tower, s, incl)


def random_cycle(rng: random.Random, c: ChainComplex, k: int, bound: int = 2) -> tuple:
    basis = kernel_basis(c.boundary(k))
    coeffs = [rng.randint(-bound, bound) for _ in range(basis.cols)]
    return basis.apply(coeffs)


def random_chain(rng: random.Random, c: ChainComplex, k: int, bound: int = 2) -> tuple:
    return tuple(rng.randint(-bound, bound) for _ in range(c.rank(k)))


def random_homology_element(rng: random.Random, c: ChainComplex, k: int, bound: int = 3) -> tuple:
    h = homology(c, k, strict=False)
    return h.group.reduce([rng.randint(-bound, bound) if m == 0 else rng.randrange(m)
                           for m in h.group.moduli])


def random_recipe(rng: random.Random, tower, k: int, bound: int = 2):
    """A compatible family: a random top cycle pushed down the tower."""
    from .miltower import LimCycleRecipe

    z = random_cycle(rng, tower.window[-1], k, bound)
    cycles = [z]
    for n in range(tower.top, 0, -1):
        cycles.append(tower.maps[n - 1].apply(k, cycles[-1]))
    return LimCycleRecipe(k, tuple(reversed(cycles)))


def random_compatible_chains(rng: random.Random, tower, degree: int, bound: int = 2) -> tuple:
    """Chains ``g_n`` with ``q_n(g_n) = g_{n-1}``: a random top chain pushed down."""
    top = random_chain(rng, tower.window[-1], degree, bound)
    out = [top]
    for n in range(tower.top, 0, -1):
        out.append(tower.maps[n - 1].apply(degree, out[-1]))
    return tuple(reversed(out))


def doubling_fibration_tower(rng: Optional[random.Random], depth: int):
    """A fibration tower whose ``H_1`` tower is ``Z <-2- Z <-2- ...``.

    With an ``rng`` the raw tower first gets an acyclic cone summand, so the
    levels are not all of the same minimal shape.
    """
    from .miltower import fibration_replace

    t = x2_tower(depth)
    if rng is not None:
        t, _ = cone_augmented(t, rng, top=1)
    return fibration_replace(t)[0]


# -- bounded generation for the command line ----------------------------------------

def _max_entry(mats) -> int:
    return max((abs(e) for m in mats for e in m.entries), default=0)


def _bounded(rng, draw, ok, fallback, tries: int = 50):
    """First draw passing ``ok``; ``fallback()`` if none does within ``tries``."""
    for _ in range(tries):
        x = draw()
        if ok(x):
            return x
    return fallback()


def bounded_abelian_tower(rng: random.Random, depth: int, tail: str, max_rank: int,
                          max_entry: int) -> AbelianTower:
    def group():
        return _bounded(rng, lambda: random_fgab(rng, 16, min(max_rank, 2)),
                        lambda g: g.ngens <= max_rank, FgAbGroup.trivial)

    def hom(g, h):
        return _bounded(rng, lambda: random_hom(rng, g, h, max_entry),
                        lambda f: _max_entry([f.matrix]) <= max_entry, lambda: GroupHom.zero(g, h))

    window = [group() for _ in range(depth)]
    maps = [hom(window[n], window[n - 1]) for n in range(1, depth)]
    endo = hom(window[-1], window[-1]) if tail == "periodic" else None
    return AbelianTower(window, maps, TailPolicy(tail, endo))


def bounded_chain_tower(rng: random.Random, depth: int, tail: str, max_rank: int,
                        max_entry: int, top: int = 2):
    """Levels ``B + Y_n`` and maps ``a id_B + (d h + h d)`` as in ``random_chain_tower``,
    every piece redrawn until ranks and entries respect the bounds."""
    from .miltower import ChainTower

    half = max(max_rank // 2, 1)

    def cx(r):
        return _bounded(rng, lambda: random_chain_complex(rng, top, r),
                        lambda c: _max_entry(c.boundaries) <= max_entry,
                        lambda: ChainComplex.zero(top))

    base = cx(half)
    levels = [direct_sum_complex([base, cx(max_rank - half)]) for _ in range(depth)]
    maps = []
    for n in range(1, depth):
        src, dst = levels[n], levels[n - 1]
        a = rng.choice([v for v in (-1, 0, 1, 2, 2, 3) if abs(v) <= max_entry])
        scaled = ChainMap(src, dst, tuple(
            IntMatrix.from_rows([[a if i == j and i < base.rank(k) else 0 for j in range(src.rank(k))]
                                 for i in range(dst.rank(k))], src.rank(k))
            for k in range(top + 1)))
        maps.append(_bounded(
            rng, lambda: scaled + null_homotopic_map(src, dst, random_degree_raising(rng, src, dst)),
            lambda f: _max_entry(f.matrices) <= max_entry, lambda: scaled))
    endo = None
    if tail == "periodic":
        endo = ChainMap.identity(levels[-1]).scale(rng.choice([v for v in (1, 2, 3) if v <= max_entry]))
    return ChainTower(levels, maps, TailPolicy(tail, endo))


# -- bounding-chain families for the phi suite -------------------------------------

def random_gamma(rng: random.Random, tower, k: int) -> list:
    """Random elements of ``H_{k+1}(X_n)`` for ``n < N``."""
    return [random_homology_element(rng, tower.window[n], k + 1) for n in range(tower.top)]


def perturb_family(rng: random.Random, tower, bc, cycles: bool = True):
    """``b_n + w_n`` with ``w_n`` random cycles, or random boundaries when ``cycles`` is false."""
    from .miltower import NullhomotopyFamily

    k1 = bc.degree + 1
    out = []
    for x, b in zip(tower.window, bc.chains):
        if cycles:
            w = random_cycle(rng, x, k1)
        else:
            w = x.d(k1 + 1, random_chain(rng, x, k1 + 1))
        out.append(vadd(b, w))
    return NullhomotopyFamily(bc.degree, tuple(out))


def equal_phi_pair(rng: random.Random, tower, k: int = 0) -> tuple:
    """``(r, rbar, bc, bcbar, w)`` whose phi families are related by the witness ``w``.

    ``rbar`` differs from ``r`` by the boundary of a compatible chain family
    and ``bcbar`` by that family plus random cycles, whose classes form ``w``.
    """
    from .miltower import LimCycleRecipe, NullhomotopyFamily, OrbitEqualityWitness, phi_preimage

    r, bc = phi_preimage(tower, k, random_gamma(rng, tower, k))
    gam = random_compatible_chains(rng, tower, k + 1)
    rbar = (r + LimCycleRecipe(k, tuple(x.d(k + 1, g) for x, g in zip(tower.window, gam)))).check(tower)
    wcyc = [random_cycle(rng, x, k + 1) for x in tower.window]
    bcbar = NullhomotopyFamily(k, tuple(vadd(vadd(b, g), w) for b, g, w in zip(bc.chains, gam, wcyc)))
    w = OrbitEqualityWitness(k + 1, tuple(homology(x, k + 1).class_of(c) for x, c in zip(tower.window, wcyc)))
    return r, rbar, bc, bcbar, w
