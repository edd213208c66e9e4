"""Command line front end.

Every command prints one JSON report on stdout. Exit status is 0 when all
assertions pass, 1 when one fails (or a required hypothesis does not hold)
and 2 for unusable input. Reports contain no timing unless ``--timing`` is
given, so repeated runs on the same bytes and flags are identical.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time

from . import acceptance
from .chaincx import homology, induced_map, is_quasi_iso
from .errors import (DegreeError, DimensionError, ElementError, FormatError, HomError,
                     HypothesisViolated, LevelError, LimTowerError, NotACycle, TowerError)
from .generate import (MAX_ENTRY, MAX_RANK, MAX_WINDOW, bounded_abelian_tower,
                       bounded_chain_tower, make_rng, random_finite_tower)
from .groups import FiniteGroup
from .gtower import (AbelianTower, FiniteGroupTower, lim1_abelian, lim1_orbits_window,
                     lim_of_tower, mittag_leffler_check)
from .gtower import DEFAULT_ORBIT_BOUND
from .miltower import (ChainTower, LimCycleRecipe, NullhomotopyFamily, OrbitEqualityWitness,
                       TowerMap, fibration_replace, homology_tower, lift_compatible_classes,
                       milnor_window_check, orbit_relation_holds, phi, phi_change_witness,
                       phi_equalize, phi_preimage, tower_equiv_lift)
from .serialize import (as_int, as_list, as_obj, chain_map_from_obj, dumps, dumps_tower, int_vector, load_json,
                        matrix_to_obj, tower_from_obj, tower_to_obj, vector_to_obj)

COMMANDS = ("lim", "lim1", "ml-check", "homology", "milnor-check", "phi", "phi-preimage",
            "phi-equalize", "lift", "equiv-lift", "replace", "gen", "selftest")

# raised for input that cannot describe a valid instance
INPUT_ERRORS = (FormatError, DimensionError, ElementError, HomError, TowerError, LevelError,
                DegreeError, NotACycle)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Report:
    def __init__(self, command: str, flags: dict, digest: str):
        self.command = command
        self.flags = flags
        self.digest = digest
        self.results = []
        self.extra = {}
        self.error = None

    def add(self, name: str, ok: bool, **values):
        self.results.append({"name": name, "pass": bool(ok), "values": values})

    @property
    def status(self) -> str:
        if self.error is not None:
            return self.error[0]
        return "pass" if all(r["pass"] for r in self.results) else "fail"

    def to_obj(self) -> dict:
        out = {"command": self.command, "flags": self.flags, "input_sha256": self.digest,
               "results": self.results, "status": self.status}
        if self.error is not None:
            out["error"] = {"type": self.error[1], "message": self.error[2]}
        out.update(self.extra)
        return out


# -- value encoding -------------------------------------------------------------------

def _s(v) -> str:
    return str(int(v))


def group_obj(g) -> dict:
    if g is None:
        return {"unknown": "true"}
    if isinstance(g, FiniteGroup):
        return {"order": _s(g.order)}
    return {"free_rank": _s(g.free_rank), "torsion": vector_to_obj(g.torsion)}


def _vectors(xs) -> list:
    return [vector_to_obj(x) for x in xs]


# -- data documents -------------------------------------------------------------------

def _degree(data, path="$.degree") -> int:
    return as_int(as_obj(data, "$", ("degree",))["degree"], path)


def _vector_list(data, key: str, lengths) -> list:
    xs = as_list(as_obj(data, "$", (key,))[key], f"$.{key}", len(lengths))
    return [int_vector(x, f"$.{key}[{i}]", n) for i, (x, n) in enumerate(zip(xs, lengths))]


def _recipe(t, data, key: str, k: int) -> LimCycleRecipe:
    cycles = _vector_list(data, key, [x.rank(k) for x in t.window])
    return LimCycleRecipe(k, tuple(cycles)).check(t)


def _family(t, data, key: str, k: int):
    if key not in data:
        return None
    chains = _vector_list(data, key, [x.rank(k + 1) for x in t.window])
    return NullhomotopyFamily(k, tuple(chains))


def _homology_elements(t, data, key: str, degree: int, count: int) -> list:
    groups = [homology(t.window[n], degree, strict=False).group for n in range(count)]
    elems = _vector_list(data, key, [g.ngens for g in groups])
    for i, (g, e) in enumerate(zip(groups, elems)):
        if not g.contains(e):
            raise FormatError(f"$.{key}[{i}]: not a reduced element of {g}")
    return elems


# -- commands ---------------------------------------------------------------------------

def _need(t, *kinds):
    if not isinstance(t, kinds):
        names = {AbelianTower: "abelian_tower", FiniteGroupTower: "finite_tower", ChainTower: "chain_tower"}
        raise FormatError(f"$.kind: this command needs {' or '.join(names[k] for k in kinds)}")


def _need_degree(args) -> int:
    if args.degree is None:
        raise FormatError("--degree is required for this command")
    return args.degree


def cmd_lim(rep, t, data, args):
    _need(t, AbelianTower, FiniteGroupTower)
    res = lim_of_tower(t)
    ok = all(p.domain == res.group for p in res.projections)
    for n in range(1, len(res.projections)):
        p = res.projections
        ok = ok and (t.maps[n - 1] @ p[n]) == p[n - 1]
    rep.add("lim", ok, method=res.kind, group=group_obj(res.group))


def cmd_lim1(rep, t, data, args):
    _need(t, AbelianTower, FiniteGroupTower)
    if isinstance(t, AbelianTower):
        res = lim1_abelian(t)
        rep.add("lim1", True, status=res.status, group=group_obj(res.group),
                mittag_leffler=str(res.ml.is_ml).lower())
        if res.status == "computed" and t.window and all(g.is_finite() for g in t.window):
            if t.to_finite().product_size() <= args.bound:
                count = lim1_orbits_window(t, args.bound).count
                rep.add("orbit count equals cokernel order", count == res.group.order(),
                        orbits=_s(count), cokernel_order=_s(res.group.order()))
    else:
        part = lim1_orbits_window(t, args.bound)
        rep.add("lim1", True, status="orbits", orbits=_s(part.count),
                trivial=str(part.count == 1).lower())


def cmd_ml_check(rep, t, data, args):
    _need(t, AbelianTower)
    res = mittag_leffler_check(t)
    cert = res.certificate
    vals = {"mittag_leffler": str(res.is_ml).lower(), "certificate": cert.kind, "index": _s(cert.index)}
    if cert.step_index is not None:
        vals["step_index"] = _s(cert.step_index)
    if cert.image is not None:
        vals["image"] = matrix_to_obj(cert.image)
    rep.add("certificate verifies", cert.verify(t), **vals)


def cmd_homology(rep, t, data, args):
    _need(t, ChainTower)
    k = _need_degree(args)
    if not 0 <= k <= t.top_degree:
        raise DegreeError(f"degree {k} outside 0..{t.top_degree}")
    ht = homology_tower(t, k)
    rep.add("homology", True, degree=_s(k), groups=[group_obj(g) for g in ht.window],
            maps=[matrix_to_obj(f.matrix) for f in ht.maps])


def cmd_milnor(rep, t, data, args):
    _need(t, ChainTower)
    k = _need_degree(args)
    try:
        res = milnor_window_check(t, k)
    except HypothesisViolated as exc:
        rep.add("hypothesis: structure maps are fibrations", False, reason=str(exc))
        rep.extra["violation"] = {"type": "HypothesisViolated", "message": str(exc)}
        return
    rep.add("hypothesis: structure maps are fibrations", True)
    for name, ok in res.assertions:
        rep.add(name, ok)
    rep.add("groups", True, hk_lim=group_obj(res.hk_lim), lim_hk=group_obj(res.lim_hk),
            lim1=group_obj(res.lim1))


def cmd_phi(rep, t, data, args):
    _need(t, ChainTower)
    k = _degree(data)
    r = _recipe(t, data, "cycles", k)
    c = phi(t, r, _family(t, data, "chains", k))
    rep.add("phi", True, degree=_s(c.degree), classes=_vectors(c.classes),
            representatives=_vectors(c.representatives))
    if "chains_alt" in data:
        if "chains" not in data:
            raise FormatError("$: 'chains_alt' needs 'chains'")
        bc, bc2 = _family(t, data, "chains", k), _family(t, data, "chains_alt", k)
        w = phi_change_witness(t, r, bc, bc2)
        rep.add("orbit relation", orbit_relation_holds(t, phi(t, r, bc), phi(t, r, bc2), w),
                witness=_vectors(w.classes))


def cmd_phi_preimage(rep, t, data, args):
    _need(t, ChainTower)
    k = _degree(data)
    gamma = _homology_elements(t, data, "gamma", k + 1, t.top)
    r, bc = phi_preimage(t, k, gamma)
    back = phi(t, r, bc).classes
    rep.add("phi of preimage reproduces the classes", back == tuple(tuple(g) for g in gamma),
            cycles=_vectors(r.cycles), chains=_vectors(bc.chains))


def cmd_phi_equalize(rep, t, data, args):
    _need(t, ChainTower)
    k = _degree(data)
    r, rbar = _recipe(t, data, "cycles", k), _recipe(t, data, "cycles_bar", k)
    bc, bcbar = _family(t, data, "chains", k), _family(t, data, "chains_bar", k)
    if bc is None or bcbar is None:
        raise FormatError("$: 'chains' and 'chains_bar' are required")
    w = OrbitEqualityWitness(k + 1, tuple(_homology_elements(t, data, "witness", k + 1, t.top + 1)))
    h = phi_equalize(t, r, rbar, bc, bcbar, w)
    rep.add("tower homotopy", h.check(t, r, rbar), chains=_vectors(h.chains))


def cmd_lift(rep, t, data, args):
    _need(t, ChainTower)
    k = _degree(data)
    cycles = _vector_list(data, "cycles", [x.rank(k) for x in t.window])
    wit = None
    if "witnesses" in data:
        raw = as_list(data["witnesses"], "$.witnesses", t.top)
        wit = [None if w is None else int_vector(w, f"$.witnesses[{i}]", t.window[i].rank(k + 1))
               for i, w in enumerate(raw)]
    r = lift_compatible_classes(t, k, cycles, wit)
    same = all(homology(x, k).equal(a, b) for x, a, b in zip(t.window, r.cycles, cycles))
    rep.add("lift is compatible and homologous", same, cycles=_vectors(r.cycles))


def cmd_equiv_lift(rep, t, data, args):
    _need(t, ChainTower)
    data = as_obj(data, "$", ("target", "maps", "degree", "cycles"))
    s = tower_from_obj(data["target"])
    _need(s, ChainTower)
    raw = as_list(data["maps"], "$.maps", len(t.window))
    maps = [chain_map_from_obj(m, f"$.maps[{n}]", t.window[n], s.window[n]) for n, m in enumerate(raw)]
    f = TowerMap(t, s, maps)
    k = _degree(data)
    y = _recipe(s, data, "cycles", k)
    x = tower_equiv_lift(f, y)
    ok = all(induced_map(fn, k)(homology(fn.source, k, strict=False).class_of(a))
             == homology(fn.target, k, strict=False).class_of(b)
             for fn, a, b in zip(f.maps, x.cycles, y.cycles))
    rep.add("classes agree levelwise", ok, cycles=_vectors(x.cycles))


def cmd_replace(rep, t, data, args):
    _need(t, ChainTower)
    tp, j = fibration_replace(t)
    rep.add("replacement is a fibration tower", tp.is_fibration(),
            ranks=[vector_to_obj(x.ranks) for x in tp.window])
    rep.add("comparison maps are quasi-isomorphisms", all(is_quasi_iso(f).is_quasi_iso for f in j.maps))
    rep.add("comparison maps commute", True)  # TowerMap construction checks every square
    _emit_tower(rep, tp, args)


def _emit_tower(rep, t, args):
    text = dumps_tower(t)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        rep.extra["output_sha256"] = hashlib.sha256(text.encode()).hexdigest()
    else:
        rep.extra["tower"] = tower_to_obj(t)


def generate(seed: int, kind: str, window: int, rank: int, entry: int, tail: str):
    if not 0 <= seed < 2 ** 64:
        raise FormatError("--seed must be a 64-bit unsigned value")
    if not 1 <= window <= MAX_WINDOW:
        raise FormatError(f"--window must lie in 1..{MAX_WINDOW}")
    if not 1 <= rank <= MAX_RANK:
        raise FormatError(f"--rank must lie in 1..{MAX_RANK}")
    if not 1 <= entry <= MAX_ENTRY:
        raise FormatError(f"--entry must lie in 1..{MAX_ENTRY}")
    rng = make_rng(seed)
    if kind == "abelian":
        return bounded_abelian_tower(rng, window, tail, rank, entry)
    if kind == "finite":
        return random_finite_tower(rng, window, tail)
    return bounded_chain_tower(rng, window, tail, rank, entry)


def cmd_gen(rep, t, data, args):
    t = generate(args.seed, args.kind, 3 if args.window is None else args.window, args.rank, args.entry, args.tail)
    # round trip through text is the validity check: parsing re-validates everything
    text = dumps_tower(t)
    rep.add("generated tower parses back", tower_from_obj(load_json(text)) == t)
    if args.output:
        _emit_tower(rep, t, args)
    else:
        rep.extra["tower_file"] = text  # printed bare by run()


def cmd_selftest(rep, t, data, args):
    for res in acceptance.run_all():
        rep.add(f"[{res.number}] {res.name}", res.passed, **res.values)


HANDLERS = {
    "lim": cmd_lim, "lim1": cmd_lim1, "ml-check": cmd_ml_check, "homology": cmd_homology,
    "milnor-check": cmd_milnor, "phi": cmd_phi, "phi-preimage": cmd_phi_preimage,
    "phi-equalize": cmd_phi_equalize, "lift": cmd_lift, "equiv-lift": cmd_equiv_lift,
    "replace": cmd_replace, "gen": cmd_gen, "selftest": cmd_selftest,
}
NEEDS_TOWER = set(COMMANDS) - {"gen", "selftest"}
NEEDS_DATA = {"phi", "phi-preimage", "phi-equalize", "lift", "equiv-lift"}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="limtower", description="lim, lim^1 and Milnor-sequence witnesses for towers")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", help="tower file (default: standard input)")
    p.add_argument("--data", help="JSON document with cycles, chains or classes")
    p.add_argument("--window", type=int, help="levels to use (gen: levels to generate)")
    p.add_argument("--degree", type=int)
    p.add_argument("--bound", type=int, default=DEFAULT_ORBIT_BOUND, help="orbit enumeration bound")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=("abelian", "finite", "chain"), default="chain", help="gen only")
    p.add_argument("--tail", choices=("trivial", "constant", "periodic"), default="constant", help="gen only")
    p.add_argument("--rank", type=int, default=MAX_RANK, help="gen: rank bound")
    p.add_argument("--entry", type=int, default=MAX_ENTRY, help="gen: entry bound")
    p.add_argument("--output", help="write a produced tower here instead of into the report")
    p.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
    return p


def _truncate(t, n: int):
    if n < 1 or n > len(t.window):
        raise FormatError(f"--window {n} outside 1..{len(t.window)}")
    if n == len(t.window):
        return t
    if t.tail.kind == "periodic":
        raise FormatError("--window cannot truncate a tower with a periodic tail")
    return type(t)(t.window[:n], t.maps[:n - 1], t.tail)


def _flags(args) -> dict:
    out = {}
    keys = ("window", "degree", "bound")
    if args.command == "gen":
        keys = ("window", "seed", "kind", "tail", "rank", "entry")
    for key in keys:
        v = getattr(args, key)
        if v is not None:
            out[key] = v if isinstance(v, str) else str(v).lower() if isinstance(v, bool) else _s(v)
    return out


def _read(path):
    if path is None or path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"limtower: {exc}", file=sys.stderr)
        rep = Report(argv[0] if argv else "", {}, "")
        rep.error = ("error", "UsageError", str(exc))
        out.write(dumps(rep.to_obj()))
        return 2
    started = time.perf_counter()
    digest = hashlib.sha256()
    rep = Report(args.command, _flags(args), "")
    code = 0
    try:
        t = data = None
        if args.command in NEEDS_TOWER:
            raw = _read(args.input)
            digest.update(raw)
            t = tower_from_obj(load_json(raw.decode("utf-8", errors="replace")))
            if args.window is not None:
                t = _truncate(t, args.window)
        if args.command in NEEDS_DATA:
            if args.data is None:
                raise FormatError("--data is required for this command")
            raw = _read(args.data)
            digest.update(raw)
            data = as_obj(load_json(raw.decode("utf-8", errors="replace")), "$")
        rep.digest = digest.hexdigest()
        HANDLERS[args.command](rep, t, data, args)
        code = 0 if rep.status == "pass" else 1
    except INPUT_ERRORS as exc:
        rep.digest = digest.hexdigest()
        rep.error = ("error", type(exc).__name__, str(exc))
        print(f"limtower: {exc}", file=sys.stderr)
        code = 2
    except (LimTowerError, OSError) as exc:
        rep.digest = digest.hexdigest()
        is_input = isinstance(exc, OSError)
        rep.error = ("error" if is_input else "fail", type(exc).__name__, str(exc))
        print(f"limtower: {exc}", file=sys.stderr)
        code = 2 if is_input else 1
    if args.timing:
        rep.extra["timing"] = {"elapsed_us": _s((time.perf_counter() - started) * 1e6)}
    if "tower_file" in rep.extra and code == 0:
        out.write(rep.extra["tower_file"])
    else:
        rep.extra.pop("tower_file", None)
        out.write(dumps(rep.to_obj()))
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
