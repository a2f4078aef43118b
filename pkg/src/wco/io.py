"""JSON formats for spaces, systems, trees and matrices.

Complex numbers are ``[re, im]`` pairs everywhere.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .measure_space import DiscreteMeasureSpace, InputError
from .model import WcoSystem
from .trees import DirectedTree, TreeShift


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def complex_pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(p, (int, float)) for p in v):
        return complex(v[0], v[1])
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    raise InputError(f"expected a complex number as [re, im], got {v!r}")


def _require(obj, key, kind):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"missing field {key!r}")
    val = obj[key]
    if not isinstance(val, kind):
        raise InputError(f"field {key!r} has the wrong type")
    return val


def space_from_json(obj) -> DiscreteMeasureSpace:
    atoms = _require(obj, "atoms", list)
    pairs = []
    for a in atoms:
        if not isinstance(a, dict) or "id" not in a or "mass" not in a:
            raise InputError("each atom needs 'id' and 'mass'")
        if isinstance(a["mass"], bool) or not isinstance(a["mass"], (int, float)):
            raise InputError(f"mass of {a['id']!r} must be a number")
        pairs.append((str(a["id"]), float(a["mass"])))
    return DiscreteMeasureSpace.from_pairs(pairs)


def space_to_json(space: DiscreteMeasureSpace) -> dict:
    return {"atoms": [{"id": a, "mass": float(m)} for a, m in zip(space.ids, space.masses)]}


def system_from_json(obj) -> WcoSystem:
    space = space_from_json(_require(obj, "space", dict))
    phi = _require(obj, "phi", dict)
    w = obj.get("w", {}) if isinstance(obj, dict) else {}
    if not isinstance(w, dict):
        raise InputError("field 'w' must be an object")
    for k in w:
        if k not in space._index:
            raise InputError(f"unknown atom id {k!r} in w")
    return WcoSystem.from_mapping(space, {str(k): str(v) for k, v in phi.items()},
                                  {k: parse_complex(v) for k, v in w.items()})


def system_to_json(sys: WcoSystem) -> dict:
    ids = sys.space.ids
    return {
        "space": space_to_json(sys.space),
        "phi": {a: ids[sys.phi[k]] for k, a in enumerate(ids)},
        "w": {a: complex_pair(sys.w[k]) for k, a in enumerate(ids)},
    }


def tree_from_json(obj) -> TreeShift:
    vertices = _require(obj, "vertices", list)
    parent = _require(obj, "parent", dict)
    root = obj.get("root")
    lam = obj.get("lambda", {})
    truncated = obj.get("truncated", [])
    if not isinstance(lam, dict) or not isinstance(truncated, list):
        raise InputError("'lambda' must be an object and 'truncated' a list")
    tree = DirectedTree(tuple(str(v) for v in vertices), parent, root, frozenset(map(str, truncated)))
    return TreeShift(tree, {str(k): parse_complex(v) for k, v in lam.items()})


def tree_to_json(shift: TreeShift) -> dict:
    t = shift.tree
    return {
        "vertices": list(t.vertices),
        "root": t.root,
        "parent": dict(t.parent),
        "lambda": {v: complex_pair(z) for v, z in shift.lam.items()},
        "truncated": sorted(t.truncated),
    }


def matrix_to_json(M: np.ndarray) -> list[list[list[float]]]:
    """Row-major nested lists of ``[re, im]`` pairs."""
    return [[complex_pair(z) for z in row] for row in np.asarray(M)]


def load_system(path) -> WcoSystem:
    return system_from_json(load_json(path))


def load_tree(path) -> TreeShift:
    return tree_from_json(load_json(path))
