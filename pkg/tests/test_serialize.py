import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limtower.errors import FormatError
from limtower.generate import (make_rng, random_abelian_tower, random_chain_tower,
                               random_finite_tower, x2_tower)
from limtower.miltower import fibration_replace
from limtower.serialize import dumps_tower, loads_tower


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32), tail=st.sampled_from(["trivial", "constant", "periodic"]))
def test_round_trip_abelian(seed, tail):
    rng = make_rng(seed)
    t = random_abelian_tower(rng, rng.randint(1, 4), tail, max_free=1)
    assert loads_tower(dumps_tower(t)) == t


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32), tail=st.sampled_from(["trivial", "constant", "periodic"]))
def test_round_trip_finite(seed, tail):
    rng = make_rng(seed)
    t = random_finite_tower(rng, rng.randint(1, 3), tail)
    assert loads_tower(dumps_tower(t)) == t


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32), tail=st.sampled_from(["trivial", "constant", "periodic"]))
def test_round_trip_chain(seed, tail):
    rng = make_rng(seed)
    t = random_chain_tower(rng, rng.randint(1, 3), tail, top=rng.randint(0, 2))
    assert loads_tower(dumps_tower(t)) == t


def test_round_trip_replaced_tower_with_empty_matrices():
    t, _ = fibration_replace(x2_tower(3))
    assert t.window[0].ranks == (0, 1)
    assert loads_tower(dumps_tower(t)) == t


def test_integers_written_as_strings():
    doc = json.loads(dumps_tower(x2_tower(2)))
    assert doc["maps"][0]["matrices"][1] == [["2"]]
    assert doc["window"][0]["ranks"] == ["0", "1"]


def test_large_integers_survive():
    doc = {"kind": "abelian_tower", "window": [{"free_rank": "1", "torsion": []}], "maps": [],
           "tail": {"kind": "periodic", "endo": [[str(3 ** 90)]]}}
    t = loads_tower(json.dumps(doc))
    assert t.tail.endo.matrix.entries == (3 ** 90,)
    assert json.loads(dumps_tower(t))["tail"]["endo"] == [[str(3 ** 90)]]


def _error(text):
    with pytest.raises(FormatError) as info:
        loads_tower(text)
    return str(info.value)


def test_syntax_error_has_position():
    msg = _error('{\n  "kind": "chain_tower",\n  "window": [,]\n}')
    assert "line 3" in msg and "column" in msg


def test_structural_errors_have_paths():
    assert "$.kind" in _error('{"kind": "bogus", "window": [], "maps": []}')
    assert "$.window[0].torsion[0]" in _error(
        '{"kind": "abelian_tower", "window": [{"free_rank": "0", "torsion": ["x"]}], "maps": []}')
    assert "$.maps" in _error(
        '{"kind": "abelian_tower", "window": [{"free_rank": "1"}], "maps": [[["1"]]]}')
    assert "missing key 'ranks'" in _error('{"kind": "chain_tower", "window": [{}], "maps": []}')


def test_semantic_errors_are_located():
    # d d != 0
    bad = {"kind": "chain_tower", "window": [{"ranks": ["1", "1", "1"],
                                              "boundaries": [[["1"]], [["1"]]]}], "maps": []}
    assert _error(json.dumps(bad)).startswith("$.window[0]")
    # not a chain map
    c = {"ranks": ["1", "1"], "boundaries": [[["1"]]]}
    bad = {"kind": "chain_tower", "window": [c, c], "maps": [{"matrices": [[["1"]], [["2"]]]}]}
    assert _error(json.dumps(bad)).startswith("$.maps[0]")
    # invalid Cayley table
    bad = {"kind": "finite_tower", "window": [{"table": [["0", "1"], ["1", "1"]]}], "maps": []}
    assert _error(json.dumps(bad)).startswith("$.window[0]")


def test_periodic_tail_needs_endo():
    assert "endo" in _error('{"kind": "abelian_tower", "window": [{"free_rank": "1"}], "maps": [],'
                            ' "tail": {"kind": "periodic"}}')


def test_booleans_are_not_integers():
    assert "boolean" in _error('{"kind": "abelian_tower", "window": [{"free_rank": true}], "maps": []}')
