import numpy as np
import pytest
from hypothesis import given

from conftest import identity_system, make_system, structured_systems
from wco.invariant import (NotApplicable, SubspaceDescriptor, aluthge_domain_gap, distinct_levels,
                           domain_gap_system, domain_gap_weight, find_invariant, top_level_threshold,
                           verify_invariant)
from wco.measure_space import InputError
from wco.model import rn_values
from wco.properties import is_hyponormal, is_weakly_centered
from wco.trees import build_pruned_leaf_tree, tree_to_wco


def test_kernel_example(kernel2):
    found = find_invariant(kernel2)
    assert found == SubspaceDescriptor("kernel", frozenset({"2"}))
    assert verify_invariant(kernel2, found)
    level = SubspaceDescriptor("level_set", frozenset({"1"}), threshold=0.5)
    assert verify_invariant(kernel2, level)


def test_scalar_isometry_case():
    found = find_invariant(make_system([2, 3, 1], [2.0, 2.0, 2.0]))
    assert isinstance(found, NotApplicable) and "isometry" in found.reason


def test_zero_operator_is_scalar_case():
    assert isinstance(find_invariant(make_system([1, 1], [0.0, 0.0])), NotApplicable)


def test_hypothesis_failures_reported():
    assert "weakly centered" in find_invariant(make_system([1, 1, 2], [1.0, 2.0, 1.0])).reason
    # pruned-leaf tree: leaves have h = 0 below parents with h >= 1
    assert "hyponormal" in find_invariant(tree_to_wco(build_pruned_leaf_tree(4))).reason


def test_level_set_on_normal_system():
    # two disjoint cycles with densities 1 and 4
    sys = make_system([2, 1, 4, 3], [1.0, 1.0, 2.0, 2.0])
    found = find_invariant(sys)
    assert found.kind == "level_set"
    assert found.atoms == frozenset({"3", "4"}) and found.threshold == pytest.approx(2.5)
    assert verify_invariant(sys, found)


def test_verify_full_and_empty():
    sys = make_system([2, 1], [1.0, 3.0])
    full = verify_invariant(sys, SubspaceDescriptor("level_set", frozenset({"1", "2"})))
    empty = verify_invariant(sys, SubspaceDescriptor("level_set", frozenset()))
    assert full and empty and empty.note == "trivial subspace"


def test_verify_detects_escape():
    sys = make_system([2, 1], [1.0, 3.0])
    rep = verify_invariant(sys, SubspaceDescriptor("level_set", frozenset({"1"})))
    assert not rep and rep.witness["escaping_atom"] == "2"


def test_levels_and_threshold():
    assert distinct_levels([1.0, 1.0 + 1e-12, 3.0]) == [1.0, 3.0]
    assert top_level_threshold([2.0, 2.0]) is None
    assert top_level_threshold([0.0, 1.0, 3.0]) == 2.0


@given(structured_systems())
def test_descriptor_verified_whenever_returned(sys):
    found = find_invariant(sys)
    if isinstance(found, SubspaceDescriptor):
        assert is_weakly_centered(sys) and is_hyponormal(sys)
        assert verify_invariant(sys, found)
        assert found.atoms and found.atoms != frozenset(sys.space.ids)
    elif is_weakly_centered(sys) and is_hyponormal(sys):
        assert len(distinct_levels(rn_values(sys))) == 1


def test_domain_gap_weights():
    assert [domain_gap_weight(k) for k in (0, 3, 4, 5, 6, 7, 8)] == [1.0, 1.0, 1.0, 1.0, 1.0, 4.0, 0.25]
    assert domain_gap_weight(-2) == 1.0


def test_domain_gap_system_is_weakly_centered():
    sys = domain_gap_system(5)
    assert len(set(sys.phi.tolist())) == len(sys)
    assert is_weakly_centered(sys)


def test_domain_gap_values():
    # h(3n) = n^4 and the pulled-back E(sqrt h) is n^-2, so r(3n) = n^2 / 2
    rows = aluthge_domain_gap(20)
    assert [n for n, _ in rows] == list(range(1, 21))
    assert np.allclose([r for _, r in rows], [n * n / 2 for n in range(1, 21)], rtol=1e-12)


def test_domain_gap_growth():
    rs = [r for _, r in aluthge_domain_gap(20)]
    assert all(b > a for a, b in zip(rs, rs[1:]))
    assert rs[-1] / rs[0] > 100
    assert np.isfinite(rs[0]) and rs[0] > 0


def test_domain_gap_minimum():
    with pytest.raises(InputError):
        aluthge_domain_gap(1)
