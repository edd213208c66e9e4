"""Fixed-seed acceptance checks, shared by the test suite and ``limtower selftest``.

Each check returns a ``CheckResult`` whose values are decimal strings, so a
report built from them is byte-for-byte reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chaincx import homology, induced_map
from .errors import HypothesisViolated
from .generate import (cone_augmented, doubling_fibration_tower, equal_phi_pair, make_rng,
                       perturb_family, random_abelian_tower, random_chain_tower, random_family,
                       random_finite_tower, random_gamma, random_recipe, random_unimodular,
                       group_catalog, x2_tower)
from .groups import cyclic, dihedral4, symmetric3
from .gtower import (AbelianTower, TailPolicy, def11_act, lim1_abelian, lim1_orbits_window,
                     lim_of_tower, mittag_leffler_check)
from .intlin import FgAbGroup, GroupHom, IntMatrix, same_subgroup
from .miltower import (fibration_replace, milnor_window_check, orbit_relation_holds, phi,
                       phi_change_witness, phi_equalize, phi_preimage, tower_equiv_lift)

BASE_SEED = 20240601


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    values: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        detail = ", ".join(f"{k}={v}" for k, v in sorted(self.values.items()))
        return f"{tag} [{self.number}] {self.name} ({detail})"


def _seeds(offset: int, count: int):
    return range(BASE_SEED + 1000 * offset, BASE_SEED + 1000 * offset + count)


def orbit_count_vs_cokernel(count: int = 200) -> CheckResult:
    bad = 0
    for seed in _seeds(1, count):
        rng = make_rng(seed)
        t = random_abelian_tower(rng, rng.randint(1, 4), rng.choice(["trivial", "constant"]), max_order=16)
        res = lim1_abelian(t)
        if res.group is None or lim1_orbits_window(t).count != res.group.order():
            bad += 1
    return CheckResult(1, "orbit count equals cokernel order", bad == 0,
                       {"towers": str(count), "mismatches": str(bad)})


ACTION_FAMILIES = {
    "abelian": lambda rng: random_abelian_tower(rng, rng.randint(1, 4), rng.choice(["trivial", "constant"]),
                                                max_free=1),
    "cyclic": lambda rng: random_finite_tower(rng, rng.randint(1, 4), "trivial",
                                              [cyclic(2), cyclic(4), cyclic(6)]),
    "s3": lambda rng: random_finite_tower(rng, rng.randint(1, 4), "constant", [symmetric3()]),
    "d4": lambda rng: random_finite_tower(rng, rng.randint(1, 4), "trivial", [dihedral4(), cyclic(2)]),
    "mixed": lambda rng: random_finite_tower(rng, rng.randint(1, 4), "constant", group_catalog()),
}


def action_law(per_family: int = 100) -> CheckResult:
    values = {}
    ok = True
    for i, (fam, make) in enumerate(sorted(ACTION_FAMILIES.items())):
        bad = 0
        for seed in _seeds(2 + i, per_family):
            rng = make_rng(seed)
            t = make(rng)
            a, b, h = (random_family(rng, t) for _ in range(3))
            if def11_act(t, t.identity_family(), h) != h:
                bad += 1
            elif def11_act(t, a, def11_act(t, b, h)) != def11_act(t, t.product(a, b), h):
                bad += 1
        values[f"{fam}_failures"] = str(bad)
        ok = ok and bad == 0
    values["instances_per_family"] = str(per_family)
    return CheckResult(2, "action law", ok, values)


def trivial_tail_single_orbit(count: int = 100) -> CheckResult:
    bad = 0
    for seed in _seeds(10, count):
        rng = make_rng(seed)
        t = random_finite_tower(rng, rng.randint(1, 3), "trivial")
        if lim1_orbits_window(t).count != 1:
            bad += 1
    return CheckResult(3, "trivial tail gives one orbit", bad == 0,
                       {"towers": str(count), "multi_orbit": str(bad)})


def milnor_replaced_towers(count: int = 100) -> CheckResult:
    bad = checks = 0
    for seed in _seeds(11, count):
        rng = make_rng(seed)
        raw = random_chain_tower(rng, rng.randint(1, 3), "constant", top=rng.randint(0, 2))
        t, _ = fibration_replace(raw)
        for k in range(t.top_degree + 1):
            checks += 1
            if not milnor_window_check(t, k).passed:
                bad += 1
    try:
        milnor_window_check(x2_tower(3), 1)
        rejected = False
    except HypothesisViolated:
        rejected = True
    return CheckResult(4, "Milnor window check", bad == 0 and rejected,
                       {"towers": str(count), "degree_checks": str(checks), "failures": str(bad),
                        "raw_x2_rejected": str(rejected).lower()})


def phi_suite(n_change: int = 100, n_add: int = 100, n_round: int = 100, n_equal: int = 50,
              window: int = 6) -> CheckResult:
    depth = window + 1
    fails = {"change": 0, "additivity": 0, "round_trip": 0, "equalize": 0}
    for seed in _seeds(12, n_change):
        rng = make_rng(seed)
        t = doubling_fibration_tower(rng, depth)
        r, bc = phi_preimage(t, 0, random_gamma(rng, t, 0))
        b1, b2 = perturb_family(rng, t, bc), perturb_family(rng, t, bc, cycles=rng.random() < 0.7)
        w = phi_change_witness(t, r, b1, b2)
        if not orbit_relation_holds(t, phi(t, r, b1), phi(t, r, b2), w):
            fails["change"] += 1
    for seed in _seeds(13, n_add):
        rng = make_rng(seed)
        t = doubling_fibration_tower(rng, depth)
        r1, b1 = phi_preimage(t, 0, random_gamma(rng, t, 0))
        r2, b2 = phi_preimage(t, 0, random_gamma(rng, t, 0))
        b1, b2 = perturb_family(rng, t, b1), perturb_family(rng, t, b2)
        c1, c2, c12 = phi(t, r1, b1), phi(t, r2, b2), phi(t, r1 + r2, b1 + b2)
        for n in range(t.top):
            g = homology(t.window[n], 1).group
            if c12.classes[n] != g.add(c1.classes[n], c2.classes[n]):
                fails["additivity"] += 1
                break
    for seed in _seeds(14, n_round):
        rng = make_rng(seed)
        t = doubling_fibration_tower(rng, depth)
        gamma = random_gamma(rng, t, 0)
        r, bc = phi_preimage(t, 0, gamma)
        if phi(t, r, bc).classes != tuple(tuple(g) for g in gamma):
            fails["round_trip"] += 1
    for seed in _seeds(15, n_equal):
        rng = make_rng(seed)
        t = doubling_fibration_tower(rng, depth)
        r, rbar, bc, bcbar, w = equal_phi_pair(rng, t)
        if not phi_equalize(t, r, rbar, bc, bcbar, w).check(t, r, rbar):
            fails["equalize"] += 1
    values = {f"{k}_failures": str(v) for k, v in fails.items()}
    values.update(change=str(n_change), additivity=str(n_add), round_trip=str(n_round),
                  equalize=str(n_equal), window=str(window))
    return CheckResult(5, "phi suite", not any(fails.values()), values)


def equivalence_lifts(count: int = 100) -> CheckResult:
    bad = degree0 = 0
    for i, seed in enumerate(_seeds(16, count)):
        rng = make_rng(seed)
        if i % 2:
            t = random_chain_tower(rng, rng.randint(1, 4), surjective=True)
            _, f = cone_augmented(t, rng)
        else:
            t, _ = fibration_replace(random_chain_tower(rng, rng.randint(1, 3), top=rng.randint(0, 2)))
            _, f = fibration_replace(t)
        k = 0 if i % 4 < 2 else rng.randint(0, t.top_degree)
        degree0 += k == 0
        y = random_recipe(rng, f.target, k)
        x = tower_equiv_lift(f, y)
        for fn, a, b in zip(f.maps, x.cycles, y.cycles):
            hs, ht = homology(fn.source, k, strict=False), homology(fn.target, k, strict=False)
            if induced_map(fn, k)(hs.class_of(a)) != ht.class_of(b):
                bad += 1
                break
    return CheckResult(6, "equivalence lifts", bad == 0,
                       {"equivalences": str(count), "degree0_cases": str(degree0), "failures": str(bad)})


def _stable_image_oracle(e: GroupHom, rounds: int) -> IntMatrix:
    m = IntMatrix.identity(e.domain.ngens)
    for _ in range(rounds):
        m = e.matrix @ m
    return m


def ml_classifier() -> CheckResult:
    z = FgAbGroup.free(1)
    values = {}
    ok = True
    for p in (2, 3, 5):
        t = AbelianTower([z], [], TailPolicy.periodic(GroupHom(z, z, IntMatrix.from_rows([[p]]))))
        res = mittag_leffler_check(t)
        good = not res.is_ml and res.certificate.verify(t) and res.certificate.step_index == p
        values[f"times_{p}"] = "non_ml" if good else "wrong"
        ok = ok and good
    bad_unimodular = bad_nilpotent = 0
    for seed in _seeds(17, 30):
        rng = make_rng(seed)
        n = rng.randint(1, 3)
        g = FgAbGroup.free(n)
        u, _ = random_unimodular(rng, n)
        t = AbelianTower([g], [], TailPolicy.periodic(GroupHom(g, g, u)))
        res, lim = mittag_leffler_check(t), lim_of_tower(t)
        # a unimodular map is onto, so the stable image is the whole group
        if not (res.is_ml and res.certificate.verify(t)
                and same_subgroup(g, res.certificate.image, IntMatrix.identity(n)) and lim.group == g):
            bad_unimodular += 1
        strict = IntMatrix.from_rows([[rng.randint(-3, 3) if j > i else 0 for j in range(n)] for i in range(n)])
        p, pinv = random_unimodular(rng, n)
        nil = GroupHom(g, g, p @ strict @ pinv)
        t = AbelianTower([g], [], TailPolicy.periodic(nil))
        res, lim = mittag_leffler_check(t), lim_of_tower(t)
        # e^n = 0, so the stable image is zero
        if not (res.is_ml and res.certificate.verify(t)
                and same_subgroup(g, res.certificate.image, _stable_image_oracle(nil, n))
                and lim.group.is_trivial()):
            bad_nilpotent += 1
    values.update(unimodular_failures=str(bad_unimodular), nilpotent_failures=str(bad_nilpotent),
                  endomorphisms_each="30")
    return CheckResult(7, "Mittag-Leffler classifier", ok and not bad_unimodular and not bad_nilpotent,
                       values)


CHECKS = (orbit_count_vs_cokernel, action_law, trivial_tail_single_orbit, milnor_replaced_towers,
          phi_suite, equivalence_lifts, ml_classifier)


def run_all() -> list:
    return [check() for check in CHECKS]
