import io
import json
from pathlib import Path

import pytest

from limtower.chaincx import homology
from limtower.cli import generate, run
from limtower.generate import (doubling_fibration_tower, equal_phi_pair, make_rng, perturb_family,
                               random_gamma, x2_tower)
from limtower.miltower import fibration_replace, phi_preimage
from limtower.serialize import dumps, dumps_tower, loads_tower, tower_to_obj, vector_to_obj

DATA = Path(__file__).parent / "data"


def _run(*argv):
    out = io.StringIO()
    code = run([str(a) for a in argv], out)
    return code, out.getvalue()


def _report(*argv):
    code, text = _run(*argv)
    return code, json.loads(text)


def _vs(xs):
    return [vector_to_obj(x) for x in xs]


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(dumps(obj) if not isinstance(obj, str) else obj)
    return p


def test_lim1_zero_tower():
    code, rep = _report("lim1", "--input", DATA / "zero_tower.json")
    assert code == 0 and rep["status"] == "pass"
    assert rep["results"][0]["values"]["group"] == {"free_rank": "0", "torsion": []}


def test_milnor_replaced_x2():
    code, rep = _report("milnor-check", "--input", DATA / "replaced_x2_tower.json", "--degree", 1)
    assert code == 0
    names = {r["name"]: r["pass"] for r in rep["results"]}
    assert names["P injective"] and names["P surjective"] and names["lim1 trivial"]


def test_milnor_raw_x2():
    code, rep = _report("milnor-check", "--input", DATA / "raw_x2_tower.json", "--degree", 1)
    assert code == 1
    assert rep["violation"]["type"] == "HypothesisViolated"


def test_fixture_files_match_their_constructions():
    assert loads_tower((DATA / "raw_x2_tower.json").read_text()) == x2_tower(4)
    assert loads_tower((DATA / "replaced_x2_tower.json").read_text()) == fibration_replace(x2_tower(4))[0]


def test_unknown_subcommand_and_malformed_file(tmp_path, capsys):
    code, rep = _report("frobnicate")
    assert code == 2 and rep["status"] == "error"
    bad = _write(tmp_path, "bad.json", "{not json")
    code, rep = _report("lim", "--input", bad)
    assert code == 2 and "line 1" in rep["error"]["message"]
    assert "line 1" in capsys.readouterr().err


def test_wrong_kind_is_input_error():
    code, rep = _report("ml-check", "--input", DATA / "raw_x2_tower.json")
    assert code == 2 and rep["error"]["type"] == "FormatError"


def test_input_from_stdin(monkeypatch):
    monkeypatch.setattr("sys.stdin", io.TextIOWrapper(io.BytesIO((DATA / "zero_tower.json").read_bytes())))
    code, rep = _report("lim")
    assert code == 0 and rep["results"][0]["values"]["method"] == "constant"


def test_reports_are_deterministic():
    a = _run("milnor-check", "--input", DATA / "replaced_x2_tower.json", "--degree", 1)
    b = _run("milnor-check", "--input", DATA / "replaced_x2_tower.json", "--degree", 1)
    assert a == b
    assert '"timing"' not in a[1]
    assert '"timing"' in _run("lim1", "--input", DATA / "zero_tower.json", "--timing")[1]


def test_no_floats_in_reports():
    _, text = _run("milnor-check", "--input", DATA / "replaced_x2_tower.json", "--degree", 1)

    def walk(x):
        if isinstance(x, dict):
            return all(walk(v) for v in x.values())
        if isinstance(x, list):
            return all(walk(v) for v in x)
        return not isinstance(x, (int, float)) or isinstance(x, bool)
    assert walk(json.loads(text))


# -- gen ---------------------------------------------------------------------------

def test_gen_golden_seed_zero():
    code, text = _run("gen", "--seed", 0)
    assert code == 0
    assert text == (DATA / "gen_seed0.json").read_text()


def test_gen_twice_identical():
    assert _run("gen", "--seed", 0, "--kind", "abelian") == _run("gen", "--seed", 0, "--kind", "abelian")


@pytest.mark.parametrize("kind", ["chain", "abelian", "finite"])
def test_gen_hundred_seeds_valid(kind):
    for seed in range(100):
        t = generate(seed, kind, 4, 5, 4, "constant")
        back = loads_tower(dumps_tower(t))  # parsing re-runs every validity check
        assert back == t
        if kind == "chain":
            assert all(max(x.ranks) <= 5 for x in t.window)
            mats = [m for x in t.window for m in x.boundaries] + [m for q in t.maps for m in q.matrices]
            assert all(abs(e) <= 4 for m in mats for e in m.entries)


@pytest.mark.parametrize("flags", [["--window", 7], ["--window", 0], ["--rank", 6], ["--entry", 5],
                                   ["--seed", 2 ** 64], ["--seed", -1]])
def test_gen_out_of_bounds(flags):
    code, rep = _report("gen", *flags)
    assert code == 2 and rep["status"] == "error"


def test_gen_output_file(tmp_path):
    out = tmp_path / "t.json"
    code, rep = _report("gen", "--seed", 5, "--output", out)
    assert code == 0 and rep["results"][0]["pass"]
    loads_tower(out.read_text())


# -- chain tower commands ---------------------------------------------------------------

def test_replace_then_milnor(tmp_path):
    out = tmp_path / "r.json"
    code, rep = _report("replace", "--input", DATA / "gen_seed0.json", "--output", out)
    assert code == 0
    for k in range(3):
        assert _run("milnor-check", "--input", out, "--degree", k)[0] == 0


def test_homology_command():
    code, rep = _report("homology", "--input", DATA / "raw_x2_tower.json", "--degree", 1)
    assert code == 0
    vals = rep["results"][0]["values"]
    assert vals["maps"] == [[["2"]]] * 3
    assert _run("homology", "--input", DATA / "raw_x2_tower.json", "--degree", 4)[0] == 2


def _doubling_file(tmp_path, depth=4):
    t = doubling_fibration_tower(make_rng(1), depth)
    return t, _write(tmp_path, "t.json", tower_to_obj(t))


def test_phi_preimage_then_phi(tmp_path):
    t, path = _doubling_file(tmp_path)
    gamma = random_gamma(make_rng(2), t, 0)
    data = _write(tmp_path, "g.json", {"degree": "0", "gamma": [vector_to_obj(g) for g in gamma]})
    code, rep = _report("phi-preimage", "--input", path, "--data", data)
    assert code == 0
    vals = rep["results"][0]["values"]
    data2 = _write(tmp_path, "r.json", {"degree": "0", "cycles": vals["cycles"], "chains": vals["chains"]})
    code, rep = _report("phi", "--input", path, "--data", data2)
    assert code == 0
    assert rep["results"][0]["values"]["classes"] == [vector_to_obj(g) for g in gamma]


def test_phi_change_witness_command(tmp_path):
    t, path = _doubling_file(tmp_path)
    rng = make_rng(4)
    r, bc = phi_preimage(t, 0, random_gamma(rng, t, 0))
    bc2 = perturb_family(rng, t, bc)
    doc = {"degree": "0", "cycles": _vs(r.cycles), "chains": _vs(bc.chains), "chains_alt": _vs(bc2.chains)}
    code, rep = _report("phi", "--input", path, "--data", _write(tmp_path, "c.json", doc))
    assert code == 0 and [x["name"] for x in rep["results"]] == ["phi", "orbit relation"]
    del doc["chains"]
    assert _run("phi", "--input", path, "--data", _write(tmp_path, "c2.json", doc))[0] == 2


def test_phi_equalize_command(tmp_path):
    t, path = _doubling_file(tmp_path)
    r, rbar, bc, bcbar, w = equal_phi_pair(make_rng(3), t)
    data = _write(tmp_path, "e.json", {"degree": "0", "cycles": _vs(r.cycles), "cycles_bar": _vs(rbar.cycles),
                                       "chains": _vs(bc.chains), "chains_bar": _vs(bcbar.chains),
                                       "witness": _vs(w.classes)})
    assert _run("phi-equalize", "--input", path, "--data", data)[0] == 0
    bad = dict(json.loads(data.read_text()))
    bad["witness"] = _vs(w.classes[:-1])
    assert _run("phi-equalize", "--input", path, "--data", _write(tmp_path, "b.json", bad))[0] == 2


def test_lift_command(tmp_path):
    path = DATA / "replaced_x2_tower.json"
    t = loads_tower(path.read_text())
    cycles = [homology(x, 1).representative((0,)) for x in t.window]
    data = _write(tmp_path, "l.json", {"degree": "1", "cycles": [vector_to_obj(c) for c in cycles]})
    assert _run("lift", "--input", path, "--data", data)[0] == 0
    raw = _write(tmp_path, "l2.json", {"degree": "1", "cycles": [["1"], ["1"], ["1"], ["1"]]})
    code, rep = _report("lift", "--input", DATA / "raw_x2_tower.json", "--data", raw)
    assert code == 1 and rep["error"]["type"] == "NotCompatible"


def test_equiv_lift_command(tmp_path):
    t, _ = fibration_replace(x2_tower(3))
    s, j = fibration_replace(t)
    src = _write(tmp_path, "s.json", tower_to_obj(t))
    y = [vector_to_obj(s.composite(s.top, n).apply(1, s.window[-1].zero_chain(1))) for n in range(s.top + 1)]
    maps = [{"matrices": [[vector_to_obj(r) for r in m.tolist()] for m in f.matrices]} for f in j.maps]
    data = _write(tmp_path, "d.json", {"target": tower_to_obj(s), "maps": maps, "degree": "1", "cycles": y})
    code, rep = _report("equiv-lift", "--input", src, "--data", data)
    assert code == 0 and rep["results"][0]["pass"]


def test_missing_data_flag():
    assert _run("phi", "--input", DATA / "replaced_x2_tower.json")[0] == 2


# -- group tower commands -----------------------------------------------------------------

def test_ml_check_command(tmp_path):
    doc = {"kind": "abelian_tower", "window": [{"free_rank": "1", "torsion": []}], "maps": [],
           "tail": {"kind": "periodic", "endo": [["3"]]}}
    code, rep = _report("ml-check", "--input", _write(tmp_path, "m.json", doc))
    assert code == 0
    vals = rep["results"][0]["values"]
    assert vals["mittag_leffler"] == "false" and vals["step_index"] == "3"


def test_lim_and_window_truncation(tmp_path):
    doc = {"kind": "abelian_tower",
           "window": [{"free_rank": "0", "torsion": ["2"]}, {"free_rank": "0", "torsion": ["4"]}],
           "maps": [[["1"]]], "tail": {"kind": "constant"}}
    p = _write(tmp_path, "a.json", doc)
    assert _report("lim", "--input", p)[1]["results"][0]["values"]["group"]["torsion"] == ["4"]
    assert _report("lim", "--input", p, "--window", 1)[1]["results"][0]["values"]["group"]["torsion"] == ["2"]
    assert _run("lim", "--input", p, "--window", 3)[0] == 2


def test_lim1_orbit_bound(tmp_path):
    doc = {"kind": "finite_tower", "window": [{"table": [["0", "1"], ["1", "0"]]}] * 3,
           "maps": [["0", "0"]] * 2, "tail": {"kind": "trivial"}}
    p = _write(tmp_path, "f.json", doc)
    code, rep = _report("lim1", "--input", p)
    assert code == 0 and rep["results"][0]["values"]["orbits"] == "1"
    code, rep = _report("lim1", "--input", p, "--bound", 4)
    assert code == 1 and rep["error"]["type"] == "TooLarge"
