import numpy as np
import pytest

from wco import oracle
from wco.measure_space import InputError
from wco.properties import is_weakly_centered
from wco.trees import (DirectedTree, TreeShift, build_pruned_leaf_tree, build_t2infty, path_shift,
                       phase_is_unitary, tree_to_wco, tree_weakly_centered, unweighted_tree_criterion,
                       vertex_id)


def binary_tree(levels):
    vertices, parent = ["r"], {}
    frontier = ["r"]
    for _ in range(levels):
        nxt = []
        for v in frontier:
            for c in ("0", "1"):
                u = v + c
                vertices.append(u)
                parent[u] = v
                nxt.append(u)
        frontier = nxt
    return DirectedTree(tuple(vertices), parent, "r", frozenset(frontier))


def test_tree_validation():
    with pytest.raises(InputError):
        DirectedTree(("a", "b"), {"a": "b", "b": "a"})
    with pytest.raises(InputError):
        DirectedTree(("a", "b", "c"), {"b": "a"})
    with pytest.raises(InputError):
        DirectedTree(("a", "b"), {"b": "z"})
    with pytest.raises(InputError):
        DirectedTree(("a", "b"), {"b": "a"}, root="b")
    assert DirectedTree(("a", "b"), {"b": "a"}).root == "a"


def test_root_weight_rejected():
    t = DirectedTree(("a", "b"), {"b": "a"})
    with pytest.raises(InputError):
        TreeShift(t, {"a": 1.0})


def test_single_vertex_is_zero_operator():
    shift = TreeShift(DirectedTree(("r",), {}), {})
    assert np.all(oracle.to_matrix(tree_to_wco(shift)).entries == 0)
    assert not phase_is_unitary(shift)


def test_three_path_matrix():
    T = oracle.to_matrix(tree_to_wco(path_shift([1.0, 1.0]))).entries
    assert np.allclose(T, [[0, 0, 0], [1, 0, 0], [0, 1, 0]])


@pytest.mark.parametrize("alpha", [1.0, 2.0, 0.5j])
def test_tree_criterion_matches_matrix(alpha):
    shift = build_t2infty(alpha, 4)
    T = oracle.to_matrix(tree_to_wco(shift)).entries
    assert tree_weakly_centered(shift).verdict == (oracle.weak_centered_commutator(T) <= 1e-10)


def test_t2infty_witness():
    rep = tree_weakly_centered(build_t2infty(2.0, 4))
    assert not rep
    assert rep.witness == {"vertex": "0", "pair": ["1,1", "2,1"], "sums": [1.0, 4.0]}


@pytest.mark.parametrize("depth", [3, 4, 6])
def test_t2infty_depths(depth):
    assert tree_weakly_centered(build_t2infty(1.0, depth), interior_only=True)
    assert not tree_weakly_centered(build_t2infty(2.0, depth), interior_only=True)


def test_t2infty_depth_minimum():
    with pytest.raises(InputError):
        build_t2infty(1.0, 2)


@pytest.mark.parametrize("vertex", ["1,1", "2,1", "1,3", "2,3", "-1", "0"])
def test_other_weights_do_not_matter(vertex):
    for alpha, expected in [(1.0, True), (2.0, False)]:
        shift = build_t2infty(alpha, 4)
        lam = dict(shift.lam)
        lam[vertex] = 5.0
        rep = tree_weakly_centered(TreeShift(shift.tree, lam), interior_only=True)
        assert rep.verdict is expected
        if not expected:
            assert rep.witness["vertex"] == "0"


def test_pruned_leaf_tree_weighted_and_unweighted():
    shift = build_pruned_leaf_tree(4)
    assert tree_weakly_centered(shift, interior_only=True)
    assert is_weakly_centered(tree_to_wco(shift))
    rep = unweighted_tree_criterion(shift.tree, interior_only=True)
    assert not rep
    assert rep.witness == {"vertex": "1", "pair": ["1,1", "2,1"], "counts": [1, 2]}


def test_pruned_leaf_tree_unweighted_density_values():
    from wco.model import rn_values
    shift = build_pruned_leaf_tree(4)
    ones = TreeShift(shift.tree, {v: 1.0 for v in shift.tree.vertices if v != shift.tree.root})
    sys = tree_to_wco(ones)
    h = rn_values(sys)
    assert h[sys.space.index("1,1")] == 1.0
    assert h[sys.space.index("2,1")] == 2.0
    assert not is_weakly_centered(sys)


def test_unweighted_path_and_binary_tree():
    assert unweighted_tree_criterion(path_shift([1, 1, 1]).tree)
    assert unweighted_tree_criterion(binary_tree(3), interior_only=True)


def test_checked_vertices_interior_only():
    t = build_t2infty(1.0, 4).tree
    checked = t.checked_vertices(True)
    assert "0" in checked and "1,3" not in checked and "-4" not in checked
    assert t.branching() == ["0"]


def test_phase_not_unitary_on_finite_trees():
    assert not phase_is_unitary(path_shift([1.0, 2.0, 3.0]))
    rep = phase_is_unitary(build_t2infty(1.0, 4))
    assert not rep and rep.witness["phase_rank"] < rep.witness["dim"]


def test_norm_bound_is_squared_norm():
    shift = build_t2infty(2.0, 4)
    T = oracle.to_matrix(tree_to_wco(shift)).entries
    assert shift.norm_bound() == pytest.approx(oracle.spectral_norm(T) ** 2)


def test_vertex_id_format():
    assert vertex_id(2, 3) == "2,3" and vertex_id(-1) == "-1"
