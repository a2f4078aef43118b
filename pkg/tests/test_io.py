import json

import numpy as np
import pytest
from hypothesis import given

from conftest import systems
from wco.io import (load_system, load_tree, matrix_to_json, parse_complex, system_from_json,
                    system_to_json, tree_from_json, tree_to_json)
from wco.measure_space import InputError
from wco.trees import build_pruned_leaf_tree


@given(systems())
def test_system_round_trip(sys):
    assert system_from_json(json.loads(json.dumps(system_to_json(sys)))) == sys


def test_tree_round_trip():
    shift = build_pruned_leaf_tree(3)
    back = tree_from_json(json.loads(json.dumps(tree_to_json(shift))))
    assert back.tree.parent == shift.tree.parent and back.lam == shift.lam
    assert back.tree.truncated == shift.tree.truncated


def test_parse_complex_forms():
    assert parse_complex([1, -2]) == 1 - 2j
    assert parse_complex(3) == 3
    for bad in ("1+2j", [1, 2, 3], True, None):
        with pytest.raises(InputError):
            parse_complex(bad)


@pytest.mark.parametrize("doc", [
    {},
    {"space": {"atoms": [{"id": "a"}]}, "phi": {"a": "a"}},
    {"space": {"atoms": [{"id": "a", "mass": "1"}]}, "phi": {"a": "a"}},
    {"space": {"atoms": [{"id": "a", "mass": 1}]}, "phi": {"a": "b"}},
    {"space": {"atoms": [{"id": "a", "mass": 1}]}, "phi": {"a": "a"}, "w": {"b": [1, 0]}},
    {"space": {"atoms": [{"id": "a", "mass": 1}]}, "phi": {}},
    {"space": {"atoms": [{"id": "a", "mass": 1}]}, "phi": {"a": "a"}, "w": []},
])
def test_bad_system_documents(doc):
    with pytest.raises(InputError):
        system_from_json(doc)


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        load_system(bad)
    with pytest.raises(InputError):
        load_system(tmp_path / "missing.json")
    with pytest.raises(InputError):
        load_tree(bad)


def test_tree_document_with_null_root():
    doc = {"vertices": ["r", "a", "b"], "root": None, "parent": {"a": "r", "b": "r"},
           "lambda": {"a": [1, 0], "b": 2}}
    shift = tree_from_json(doc)
    assert shift.tree.root == "r" and shift.weight("b") == 2


def test_matrix_json_layout():
    assert matrix_to_json(np.array([[1 + 2j, 0], [0, 3]])) == [[[1.0, 2.0], [0.0, 0.0]], [[0.0, 0.0], [3.0, 0.0]]]
