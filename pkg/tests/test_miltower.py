import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limtower.chaincx import ChainComplex, ChainMap, homology, induced_map, is_quasi_iso
from limtower.errors import (HypothesisViolated, LevelError, NoLift, NotCompatible,
                             NotEquivalence, NotInKernel, Unsupported, WitnessInvalid)
from limtower.generate import (cone_augmented, doubling_fibration_tower, equal_phi_pair, make_rng,
                               perturb_family, random_chain_complex, random_chain_tower,
                               random_compatible_chains, random_cycle, random_gamma,
                               random_recipe, x2_tower)
from limtower.gtower import TailPolicy
from limtower.intlin import FgAbGroup, IntMatrix, vadd, vsub
from limtower.miltower import (ChainTower, LimCycleRecipe, NullhomotopyFamily,
                               OrbitEqualityWitness, TowerMap, bounding_family,
                               fibration_replace, homology_tower, lift_compatible_classes,
                               milnor_window_check, orbit_relation_holds, phi, phi_change_witness,
                               phi_equalize, phi_preimage, project, tower_equiv_lift)


def _classes_match(f: TowerMap, x: LimCycleRecipe, y: LimCycleRecipe) -> bool:
    k = x.degree
    for fn, a, b in zip(f.maps, x.cycles, y.cycles):
        ha = homology(fn.source, k, strict=False)
        hb = homology(fn.target, k, strict=False)
        if induced_map(fn, k)(ha.class_of(a)) != hb.class_of(b):
            return False
    return True


def _acyclic_times_two():
    """``Z --1--> Z`` in degrees 1, 0 with every map multiplication by 2."""
    c = ChainComplex((1, 1), (IntMatrix.from_rows([[1]]),))
    two = ChainMap(c, c, (IntMatrix.scalar(2, 1), IntMatrix.scalar(2, 1)))
    return ChainTower([c, c], [two], TailPolicy.constant())


# -- fibration replacement ------------------------------------------------------------

def test_replace_already_surjective_tower():
    t = random_chain_tower(make_rng(1), 3, surjective=True)
    tp, j = fibration_replace(t)
    assert tp.is_fibration()
    assert all(is_quasi_iso(f).is_quasi_iso for f in j.maps)


def test_replace_times_two_tower():
    t = x2_tower(3)
    assert not t.is_fibration()
    tp, j = fibration_replace(t)
    assert tp.is_fibration()
    h1 = homology_tower(tp, 1)
    # oracle: homology of every replacement level via its own Smith form
    assert all(g == FgAbGroup.free(1) for g in h1.window)
    assert all(p.matrix == IntMatrix.from_rows([[2]]) for p in h1.maps)


def test_replace_single_level():
    c = random_chain_complex(make_rng(2))
    t = ChainTower([c], [], TailPolicy.constant())
    tp, j = fibration_replace(t)
    assert tp.window[0] == c and is_quasi_iso(j.maps[0]).is_quasi_iso


def test_replace_periodic_unsupported():
    with pytest.raises(Unsupported):
        fibration_replace(x2_tower(2, tail="periodic"))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_replace_random(seed):
    rng = make_rng(seed)
    t = random_chain_tower(rng, rng.randint(1, 3), top=rng.randint(0, 2))
    tp, j = fibration_replace(t)
    assert tp.is_fibration()
    for f in j.maps:
        assert is_quasi_iso(f).is_quasi_iso


# -- projection --------------------------------------------------------------------------

def test_project_zero_recipe():
    t = doubling_fibration_tower(None, 3)
    r = LimCycleRecipe.zero(t, 1)
    assert all(project(t, r, i).is_zero() for i in range(3))
    with pytest.raises(LevelError):
        project(t, r, 3)


def test_project_compatible():
    rng = make_rng(3)
    t = doubling_fibration_tower(rng, 4)
    r = random_recipe(rng, t, 1)
    for i in range(t.top):
        up = project(t, r, i + 1)
        assert induced_map(t.maps[i], 1)(up.element) == project(t, r, i).element


def test_project_constant_tower():
    c = random_chain_complex(make_rng(4))
    t = ChainTower([c] * 3, [ChainMap.identity(c)] * 2, TailPolicy.constant())
    z = random_cycle(make_rng(5), c, 1)
    r = LimCycleRecipe(1, (z, z, z)).check(t)
    h = homology(c, 1)
    assert all(project(t, r, i).element == h.class_of(z) for i in range(3))


# -- lifting compatible classes -------------------------------------------------------------

def test_lift_constant_tower_identical_classes():
    c = random_chain_complex(make_rng(6))
    t = ChainTower([c] * 3, [ChainMap.identity(c)] * 2, TailPolicy.constant())
    z = random_cycle(make_rng(7), c, 0)
    out = lift_compatible_classes(t, 0, [z, z, z], [c.zero_chain(1)] * 2)
    assert out.cycles == (z, z, z)


def test_lift_two_level_corrected():
    rng = make_rng(8)
    t = random_chain_tower(rng, 2, surjective=True)
    k = 1
    x0, x1 = t.window
    z1 = random_cycle(rng, x1, k)
    w = tuple(rng.randint(-2, 2) for _ in range(x0.rank(k + 1)))
    z0 = vsub(t.maps[0].apply(k, z1), x0.d(k + 1, w))  # q(z1) = z0 + d w
    out = lift_compatible_classes(t, k, [z0, z1], [w])
    assert out.cycles[0] == z0
    assert t.maps[0].apply(k, out.cycles[1]) == out.cycles[0]
    assert homology(x1, k).equal(out.cycles[1], z1)


def test_lift_raw_times_two_no_lift():
    t = _acyclic_times_two()
    with pytest.raises(NoLift):
        lift_compatible_classes(t, 0, [(1,), (0,)])


def test_lift_incompatible_classes():
    t = x2_tower(2)
    with pytest.raises(NotCompatible):
        lift_compatible_classes(t, 1, [(1,), (1,)])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_lift_random(seed):
    rng = make_rng(seed)
    t = random_chain_tower(rng, rng.randint(2, 4), surjective=True)
    k = rng.randint(0, t.top_degree)
    r = random_recipe(rng, t, k)
    # scramble every level by a boundary, then recover an exact recipe
    noisy = [vadd(z, x.d(k + 1, tuple(rng.randint(-2, 2) for _ in range(x.rank(k + 1)))))
             for x, z in zip(t.window, r.cycles)]
    out = lift_compatible_classes(t, k, noisy)
    assert out.cycles[0] == noisy[0]
    for n, x in enumerate(t.window):
        assert homology(x, k).equal(out.cycles[n], noisy[n])


# -- phi -------------------------------------------------------------------------------------

def test_phi_zero():
    t = doubling_fibration_tower(None, 4)
    r = LimCycleRecipe.zero(t, 0)
    bc = NullhomotopyFamily(0, tuple(x.zero_chain(1) for x in t.window))
    c = phi(t, r, bc)
    assert all(not any(x) for x in c.classes)


def test_phi_mismatched_chains_nonzero():
    t = doubling_fibration_tower(None, 2)
    r = LimCycleRecipe.zero(t, 0)
    h0 = homology(t.window[0], 1)
    gen = h0.representative((1,))
    bc = NullhomotopyFamily(0, (gen, t.window[1].zero_chain(1)))
    c = phi(t, r, bc)
    # oracle: the generator of H_1(X_0) = Z is its own class
    assert c.classes == ((1,),)
    assert c.check(t)


def test_phi_not_in_kernel():
    t = doubling_fibration_tower(None, 3)
    # the generator of H_1 = Z pushed down the tower is never a boundary
    top = homology(t.window[2], 1).representative((1,))
    r = LimCycleRecipe(1, (t.composite(2, 0).apply(1, top), t.maps[1].apply(1, top), top)).check(t)
    with pytest.raises(NotInKernel):
        phi(t, r)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_phi_representatives_are_cycles(seed):
    rng = make_rng(seed)
    t = doubling_fibration_tower(rng, rng.randint(2, 5))
    r, bc = phi_preimage(t, 0, random_gamma(rng, t, 0))
    bc = perturb_family(rng, t, bc)
    c = phi(t, r, bc)
    for n, rep in enumerate(c.representatives):
        assert not any(t.window[n].d(1, rep))


# -- change of bounding chains ------------------------------------------------------------------

def test_change_witness_same_family():
    rng = make_rng(10)
    t = doubling_fibration_tower(rng, 4)
    r, bc = phi_preimage(t, 0, random_gamma(rng, t, 0))
    w = phi_change_witness(t, r, bc, bc)
    assert all(not any(g) for g in w.classes)


def test_change_witness_cycle_perturbation():
    rng = make_rng(11)
    t = doubling_fibration_tower(rng, 4)
    r, bc = phi_preimage(t, 0, random_gamma(rng, t, 0))
    bc2 = perturb_family(rng, t, bc)
    w = phi_change_witness(t, r, bc, bc2)
    for n, x in enumerate(t.window):
        assert w.classes[n] == homology(x, 1).class_of(vsub(bc2.chains[n], bc.chains[n]))
    assert orbit_relation_holds(t, phi(t, r, bc), phi(t, r, bc2), w)


def test_change_witness_boundary_perturbation():
    rng = make_rng(12)
    t = doubling_fibration_tower(rng, 4)
    r, bc = phi_preimage(t, 0, random_gamma(rng, t, 0))
    bc2 = perturb_family(rng, t, bc, cycles=False)
    w = phi_change_witness(t, r, bc, bc2)
    assert all(not any(g) for g in w.classes)
    assert phi(t, r, bc).classes == phi(t, r, bc2).classes


def test_change_witness_rejects_bad_family():
    rng = make_rng(13)
    t = doubling_fibration_tower(rng, 3)
    r, bc = phi_preimage(t, 0, random_gamma(rng, t, 0))
    bad = NullhomotopyFamily(0, tuple(vadd(b, (1,) + (0,) * (len(b) - 1)) for b in bc.chains))
    if any(t.window[n].d(1, b) != z for n, (b, z) in enumerate(zip(bad.chains, r.cycles))):
        with pytest.raises(WitnessInvalid):
            phi_change_witness(t, r, bc, bad)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_change_witness_random(seed):
    rng = make_rng(seed)
    t = doubling_fibration_tower(rng, rng.randint(2, 5))
    r, bc = phi_preimage(t, 0, random_gamma(rng, t, 0))
    bc1 = perturb_family(rng, t, bc)
    bc2 = perturb_family(rng, t, bc)
    w = phi_change_witness(t, r, bc1, bc2)
    assert orbit_relation_holds(t, phi(t, r, bc1), phi(t, r, bc2), w)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_homology_class_invariance(seed):
    rng = make_rng(seed)
    t = doubling_fibration_tower(rng, rng.randint(2, 5))
    r, bc = phi_preimage(t, 0, random_gamma(rng, t, 0))
    gam = random_compatible_chains(rng, t, 1)
    r2 = r + LimCycleRecipe(0, tuple(x.d(1, g) for x, g in zip(t.window, gam)))
    bc2 = bc + NullhomotopyFamily(0, gam)
    zero = OrbitEqualityWitness.zero(t, 1)
    assert orbit_relation_holds(t, phi(t, r, bc), phi(t, r2.check(t), bc2), zero)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_additivity(seed):
    rng = make_rng(seed)
    t = doubling_fibration_tower(rng, rng.randint(2, 5))
    r1, b1 = phi_preimage(t, 0, random_gamma(rng, t, 0))
    r2, b2 = phi_preimage(t, 0, random_gamma(rng, t, 0))
    b1 = perturb_family(rng, t, b1)
    c1, c2, c12 = phi(t, r1, b1), phi(t, r2, b2), phi(t, r1 + r2, b1 + b2)
    for n in range(t.top):
        g = homology(t.window[n], 1).group
        assert c12.classes[n] == g.add(c1.classes[n], c2.classes[n])


# -- phi preimage -------------------------------------------------------------------------------

def test_preimage_of_zero():
    t = doubling_fibration_tower(None, 4)
    zero = [homology(t.window[n], 1).group.zero() for n in range(t.top)]
    r, bc = phi_preimage(t, 0, zero)
    assert all(not any(z) for z in r.cycles)
    assert all(not any(b) for b in bc.chains)


def test_preimage_level_zero_only():
    t = doubling_fibration_tower(None, 4)
    gamma = [(1,)] + [(0,)] * (t.top - 1)
    r, bc = phi_preimage(t, 0, gamma)
    assert phi(t, r, bc).classes == tuple(tuple(g) for g in gamma)


def test_preimage_empty_window():
    c = random_chain_complex(make_rng(14))
    t = ChainTower([c], [], TailPolicy.constant())
    r, bc = phi_preimage(t, 0, [])
    assert r.cycles == (c.zero_chain(0),) and bc.chains == (c.zero_chain(1),)


def test_preimage_needs_lifts():
    t = x2_tower(3)
    with pytest.raises(NoLift):
        phi_preimage(t, 0, [(1,), (0,)])


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_preimage_round_trip(seed):
    rng = make_rng(seed)
    t = doubling_fibration_tower(rng, rng.randint(1, 7))
    gamma = random_gamma(rng, t, 0)
    r, bc = phi_preimage(t, 0, gamma)
    assert phi(t, r, bc).classes == tuple(tuple(g) for g in gamma)


# -- phi equalize ---------------------------------------------------------------------------------

def test_equalize_identical():
    rng = make_rng(15)
    t = doubling_fibration_tower(rng, 4)
    r, bc = phi_preimage(t, 0, random_gamma(rng, t, 0))
    delta = phi_equalize(t, r, r, bc, bc, OrbitEqualityWitness.zero(t, 1))
    assert all(not any(d) for d in delta.chains)


def test_equalize_boundary_shift():
    rng = make_rng(16)
    t = doubling_fibration_tower(rng, 5)
    r, rbar, bc, bcbar, w = equal_phi_pair(rng, t)
    delta = phi_equalize(t, r, rbar, bc, bcbar, w)
    for n, x in enumerate(t.window):
        assert x.d(1, delta.chains[n]) == vsub(rbar.cycles[n], r.cycles[n])
        if n < t.top:
            assert t.maps[n].apply(1, delta.chains[n + 1]) == delta.chains[n]


def test_equalize_inconsistent_witness():
    rng = make_rng(17)
    t = doubling_fibration_tower(rng, 4)
    r, rbar, bc, bcbar, w = equal_phi_pair(rng, t)
    bad = OrbitEqualityWitness(1, (tuple(w.classes[0][0] + 1 for _ in w.classes[0]),) + w.classes[1:])
    with pytest.raises(WitnessInvalid):
        phi_equalize(t, r, rbar, bc, bcbar, bad)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_equalize_random(seed):
    rng = make_rng(seed)
    t = doubling_fibration_tower(rng, rng.randint(1, 6))
    r, rbar, bc, bcbar, w = equal_phi_pair(rng, t)
    delta = phi_equalize(t, r, rbar, bc, bcbar, w)
    assert delta.check(t, r, rbar)


# -- equivalences of towers -----------------------------------------------------------------------

def test_equiv_lift_identity():
    rng = make_rng(18)
    t = random_chain_tower(rng, 3, surjective=True)
    ident = TowerMap(t, t, [ChainMap.identity(x) for x in t.window])
    y = random_recipe(rng, t, 1)
    assert tower_equiv_lift(ident, y) == y


@pytest.mark.parametrize("k", [0, 1])
def test_equiv_lift_replacement(k):
    rng = make_rng(19 + k)
    t, _ = fibration_replace(random_chain_tower(rng, 3))
    tp, j = fibration_replace(t)
    y = random_recipe(rng, tp, k)
    x = tower_equiv_lift(j, y)
    assert _classes_match(j, x, y)


def test_equiv_lift_rejects_non_equivalence():
    t = doubling_fibration_tower(None, 2)
    two = TowerMap(t, t, [ChainMap(x, x, tuple(IntMatrix.scalar(2, r) for r in x.ranks))
                          for x in t.window])
    with pytest.raises(NotEquivalence):
        tower_equiv_lift(two, LimCycleRecipe.zero(t, 1))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32), cone=st.booleans())
def test_equiv_lift_random(seed, cone):
    rng = make_rng(seed)
    if cone:
        t = random_chain_tower(rng, rng.randint(1, 4), surjective=True)
        _, f = cone_augmented(t, rng)
    else:
        t, _ = fibration_replace(random_chain_tower(rng, rng.randint(1, 3), top=rng.randint(0, 2)))
        _, f = fibration_replace(t)
    k = rng.randint(0, t.top_degree)
    y = random_recipe(rng, f.target, k)
    x = tower_equiv_lift(f, y)
    assert _classes_match(f, x, y)


# -- naturality of phi ----------------------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_phi_natural(seed):
    rng = make_rng(seed)
    t = doubling_fibration_tower(rng, rng.randint(2, 5))
    s, f = cone_augmented(t, rng, top=2)
    r, bc = phi_preimage(t, 0, random_gamma(rng, t, 0))
    c = phi(t, r, bc)
    c2 = phi(s, f.apply_recipe(r), f.apply_family(bc))
    for n in range(t.top):
        assert induced_map(f.maps[n], 1)(c.classes[n]) == c2.classes[n]


# -- the Milnor window check -----------------------------------------------------------------------

def test_milnor_zero_complexes():
    z = ChainComplex.zero(1)
    t = ChainTower([z] * 3, [ChainMap.identity(z)] * 2, TailPolicy.constant())
    rep = milnor_window_check(t, 0)
    assert rep.passed and rep.hk_lim.is_trivial() and rep.lim_hk.is_trivial() and rep.lim1.is_trivial()


def test_milnor_replaced_times_two():
    t, _ = fibration_replace(x2_tower(4))
    rep = milnor_window_check(t, 1)
    assert rep.passed
    assert rep.hk_lim == rep.lim_hk == FgAbGroup.free(1)
    assert rep.projection.is_isomorphism()


def test_milnor_raw_times_two_rejected():
    with pytest.raises(HypothesisViolated):
        milnor_window_check(x2_tower(3), 1)


def test_milnor_trivial_tail():
    t, _ = fibration_replace(x2_tower(3, tail="trivial"))
    rep = milnor_window_check(t, 1)
    assert rep.passed and rep.hk_lim.is_trivial()


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_milnor_random(seed):
    rng = make_rng(seed)
    t, _ = fibration_replace(random_chain_tower(rng, rng.randint(1, 3), top=rng.randint(0, 2)))
    for k in range(t.top_degree + 1):
        assert milnor_window_check(t, k).passed


def test_bounding_family():
    t = doubling_fibration_tower(None, 3)
    r, bc = phi_preimage(t, 0, [(1,), (1,)])
    fam = bounding_family(t, r)
    assert fam.check(t, r) is fam
