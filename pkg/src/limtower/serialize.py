"""JSON tower files.

Every integer is written as a decimal string so that no reader loses
precision. Matrices are lists of rows; their shape always follows from the
groups or ranks they connect, which keeps zero-row matrices unambiguous.

Errors name the offending place: a line and column for JSON syntax, a path
like ``$.window[2].torsion[0]`` for anything structural.
"""

from __future__ import annotations

import json
import re

from .chaincx import ChainComplex, ChainMap
from .errors import FormatError, LimTowerError
from .groups import FiniteGroup, FiniteHom
from .gtower import AbelianTower, FiniteGroupTower, TailPolicy
from .intlin import FgAbGroup, GroupHom, IntMatrix

KINDS = ("abelian_tower", "finite_tower", "chain_tower")
_INT = re.compile(r"-?[0-9]+\Z")


# -- reading ----------------------------------------------------------------------

def load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def as_int(x, path: str) -> int:
    if isinstance(x, bool):
        raise FormatError(f"{path}: expected an integer, got a boolean")
    if isinstance(x, int):
        return x
    if isinstance(x, str) and _INT.match(x):
        return int(x)
    raise FormatError(f"{path}: expected a decimal integer string, got {x!r}")


def as_list(x, path: str, length=None) -> list:
    if not isinstance(x, list):
        raise FormatError(f"{path}: expected a list")
    if length is not None and len(x) != length:
        raise FormatError(f"{path}: expected {length} entries, got {len(x)}")
    return x


def as_obj(x, path: str, required=()) -> dict:
    if not isinstance(x, dict):
        raise FormatError(f"{path}: expected an object")
    for key in required:
        if key not in x:
            raise FormatError(f"{path}: missing key {key!r}")
    return x


def int_vector(x, path: str, length=None) -> tuple:
    return tuple(as_int(v, f"{path}[{i}]") for i, v in enumerate(as_list(x, path, length)))


def int_matrix(x, path: str, rows: int, cols: int) -> IntMatrix:
    rs = as_list(x, path, rows)
    return IntMatrix.from_rows([int_vector(r, f"{path}[{i}]", cols) for i, r in enumerate(rs)], cols)


def _wrap(path: str, build):
    """Run a constructor and locate any validation error at ``path``."""
    try:
        return build()
    except FormatError:
        raise
    except (LimTowerError, ValueError) as exc:
        raise FormatError(f"{path}: {exc}") from None


def _abelian_group(x, path):
    x = as_obj(x, path, ("free_rank",))
    free = as_int(x["free_rank"], f"{path}.free_rank")
    tors = int_vector(x.get("torsion", []), f"{path}.torsion")
    return _wrap(path, lambda: FgAbGroup(free, tors))


def _abelian_hom(x, path, g, h):
    m = int_matrix(x, path, h.ngens, g.ngens)
    return _wrap(path, lambda: GroupHom(g, h, m))


def _finite_group(x, path):
    x = as_obj(x, path, ("table",))
    rows = as_list(x["table"], f"{path}.table")
    table = [int_vector(r, f"{path}.table[{i}]", len(rows)) for i, r in enumerate(rows)]
    inv = int_vector(x["inverse"], f"{path}.inverse") if "inverse" in x else ()
    return _wrap(path, lambda: FiniteGroup(tuple(table), inv))


def _finite_hom(x, path, g, h):
    images = int_vector(x, path, g.order)
    return _wrap(path, lambda: FiniteHom(g, h, images))


def _complex(x, path):
    x = as_obj(x, path, ("ranks", "boundaries"))
    ranks = int_vector(x["ranks"], f"{path}.ranks")
    if not ranks:
        raise FormatError(f"{path}.ranks: a complex needs at least degree 0")
    bs = as_list(x["boundaries"], f"{path}.boundaries", len(ranks) - 1)
    mats = tuple(int_matrix(b, f"{path}.boundaries[{k}]", ranks[k], ranks[k + 1]) for k, b in enumerate(bs))
    return _wrap(path, lambda: ChainComplex(ranks, mats))


def chain_map_from_obj(x, path, src, dst):
    x = as_obj(x, path, ("matrices",))
    top = max(src.top_degree, dst.top_degree)
    ms = as_list(x["matrices"], f"{path}.matrices", top + 1)
    mats = tuple(int_matrix(m, f"{path}.matrices[{k}]", dst.rank(k), src.rank(k)) for k, m in enumerate(ms))
    return _wrap(path, lambda: ChainMap(src, dst, mats))


_READERS = {
    "abelian_tower": (_abelian_group, _abelian_hom, AbelianTower),
    "finite_tower": (_finite_group, _finite_hom, FiniteGroupTower),
    "chain_tower": (_complex, chain_map_from_obj, None),
}


def tower_from_obj(doc):
    doc = as_obj(doc, "$", ("kind", "window", "maps"))
    kind = doc["kind"]
    if kind not in KINDS:
        raise FormatError(f"$.kind: expected one of {', '.join(KINDS)}, got {kind!r}")
    read_level, read_map, cls = _READERS[kind]
    if cls is None:
        from .miltower import ChainTower
        cls = ChainTower
    window = [read_level(w, f"$.window[{n}]") for n, w in enumerate(as_list(doc["window"], "$.window"))]
    if not window:
        raise FormatError("$.window: a tower needs at least one level")
    raw_maps = as_list(doc["maps"], "$.maps", len(window) - 1)
    maps = [read_map(m, f"$.maps[{n}]", window[n + 1], window[n]) for n, m in enumerate(raw_maps)]
    tail_doc = as_obj(doc.get("tail", {"kind": "trivial"}), "$.tail", ("kind",))
    tk = tail_doc["kind"]
    if tk not in ("trivial", "constant", "periodic"):
        raise FormatError(f"$.tail.kind: unknown tail {tk!r}")
    endo = None
    if tk == "periodic":
        if "endo" not in tail_doc:
            raise FormatError("$.tail: a periodic tail needs 'endo'")
        endo = read_map(tail_doc["endo"], "$.tail.endo", window[-1], window[-1])
    return _wrap("$", lambda: cls(window, maps, TailPolicy(tk, endo)))


def loads_tower(text: str):
    return tower_from_obj(load_json(text))


# -- writing ----------------------------------------------------------------------

def _s(v: int) -> str:
    return str(int(v))


def vector_to_obj(v) -> list:
    return [_s(x) for x in v]


def matrix_to_obj(m: IntMatrix) -> list:
    return [vector_to_obj(r) for r in m.tolist()]


def _level_obj(kind: str, x) -> dict:
    if kind == "abelian_tower":
        return {"free_rank": _s(x.free_rank), "torsion": vector_to_obj(x.torsion)}
    if kind == "finite_tower":
        return {"table": [vector_to_obj(r) for r in x.table]}
    return {"ranks": vector_to_obj(x.ranks), "boundaries": [matrix_to_obj(b) for b in x.boundaries]}


def _map_obj(kind: str, f):
    if kind == "abelian_tower":
        return matrix_to_obj(f.matrix)
    if kind == "finite_tower":
        return vector_to_obj(f.images)
    return {"matrices": [matrix_to_obj(m) for m in f.matrices]}


def tower_kind(t) -> str:
    if isinstance(t, AbelianTower):
        return "abelian_tower"
    if isinstance(t, FiniteGroupTower):
        return "finite_tower"
    return "chain_tower"


def tower_to_obj(t) -> dict:
    kind = tower_kind(t)
    tail = {"kind": t.tail.kind}
    if t.tail.kind == "periodic":
        tail["endo"] = _map_obj(kind, t.tail.endo)
    return {
        "kind": kind,
        "window": [_level_obj(kind, x) for x in t.window],
        "maps": [_map_obj(kind, f) for f in t.maps],
        "tail": tail,
    }


def dumps(obj) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def dumps_tower(t) -> str:
    return dumps(tower_to_obj(t))
