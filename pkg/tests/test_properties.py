import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import identity_system, make_system, structured_systems, systems
from wco import oracle
from wco.measure_space import InputError
from wco.properties import (all_reports, is_centered, is_cohyponormal, is_hyponormal,
                            is_isometry_multiple, is_quasinormal, is_weakly_centered,
                            is_weakly_centered_alpha, matrix_hyponormal)
from wco.report import PropertyReport
from wco.transforms import polar
from wco.trees import build_t2infty, path_shift, tree_to_wco

TOL = 1e-9


def wc_matrix(sys):
    return oracle.weak_centered_commutator(oracle.to_matrix(sys).entries) <= TOL


def test_report_requires_witness_for_false():
    with pytest.raises(ValueError):
        PropertyReport(False, "x", None, 0.0)
    assert not PropertyReport.not_applicable("x", "why", 0.0).applicable


def test_injective_is_weakly_centered():
    assert is_weakly_centered(make_system([2, 3, 1], [1.0, 3.0, 0.2], [1, 5, 2]))


@pytest.mark.parametrize("alpha", [1.0, 1j, -1.0])
def test_t2infty_unimodular_alpha_is_weakly_centered(alpha):
    assert is_weakly_centered(tree_to_wco(build_t2infty(alpha, 4)))


def test_t2infty_alpha_two_witness():
    rep = is_weakly_centered(tree_to_wco(build_t2infty(2.0, 4)))
    assert not rep
    assert rep.witness["fiber_of"] == "0"
    assert rep.witness["pair"] == ["1,1", "2,1"]
    assert rep.witness["h"] == [1.0, 4.0]


@given(systems())
def test_weakly_centered_matches_commutator(sys):
    assert is_weakly_centered(sys).verdict == wc_matrix(sys)


@given(structured_systems())
def test_weakly_centered_matches_commutator_structured(sys):
    assert is_weakly_centered(sys).verdict == wc_matrix(sys)


@given(structured_systems(), st.sampled_from([0.5, 2.0, -1.0, 1.0, 3.0, -0.25]))
def test_alpha_condition_is_equivalent(sys, alpha):
    assert is_weakly_centered_alpha(sys, alpha).verdict == is_weakly_centered(sys).verdict


def test_alpha_zero_rejected():
    with pytest.raises(InputError):
        is_weakly_centered_alpha(identity_system(2), 0.0)


def test_negative_alpha_notes_vanishing_density():
    # w(2) = 1 charges atom 2 whose h is 0
    sys = make_system([1, 1, 2], [1.0, 1.0, 1.0])
    rep = is_weakly_centered_alpha(sys, -1.0)
    assert "vanishes" in rep.note
    assert rep.verdict == is_weakly_centered(sys).verdict


def test_alpha_witness_carries_alpha():
    rep = is_weakly_centered_alpha(tree_to_wco(build_t2infty(2.0, 4)), 0.5)
    assert not rep and rep.witness["alpha"] == 0.5


@given(structured_systems())
def test_quasinormal_implies_weakly_centered_alpha(sys):
    if is_quasinormal(sys):
        for a in (0.5, 2.0, -1.0):
            assert is_weakly_centered_alpha(sys, a)


def test_quasinormal_identity():
    assert is_quasinormal(identity_system(3))


@pytest.mark.parametrize("m1, m2, expected", [(1.0, 1.0, True), (1.0, 2.0, False), (3.0, 0.5, False)])
def test_two_cycle_quasinormal_iff_equal_masses(m1, m2, expected):
    sys = make_system([2, 1], [1.0, 1.0], [m1, m2])
    assert is_quasinormal(sys).verdict is expected


@given(systems())
def test_quasinormal_matches_matrix(sys):
    q = oracle.quasinormal_commutator(oracle.to_matrix(sys).entries) <= TOL
    assert is_quasinormal(sys).verdict == q


def test_hyponormal_kernel_example(kernel2):
    assert is_hyponormal(kernel2)


@given(systems())
def test_hyponormal_matches_matrix(sys):
    assert is_hyponormal(sys).verdict == matrix_hyponormal(sys).verdict


@given(structured_systems())
def test_hyponormal_matches_matrix_structured(sys):
    assert is_hyponormal(sys).verdict == matrix_hyponormal(sys).verdict


@given(systems())
def test_hyponormal_forces_normal_in_finite_dimension(sys):
    if is_hyponormal(sys):
        assert oracle.normality_gap(oracle.to_matrix(sys).entries) <= 1e-9
        assert is_weakly_centered(sys)


def test_cohyponormal_identity():
    assert is_cohyponormal(identity_system(3))


@given(systems())
def test_cohyponormal_is_hyponormal_of_adjoint_matrix(sys):
    T = oracle.to_matrix(sys).entries
    Th = T.conj().T
    scale = max(1.0, oracle.spectral_norm(T)) ** 2
    adjoint_hypo = oracle.min_eigenvalue(T @ Th - Th @ T) / scale >= -1e-9
    assert is_cohyponormal(sys).verdict == adjoint_hypo


@given(structured_systems())
def test_cohyponormal_implies_weakly_centered(sys):
    if is_cohyponormal(sys):
        assert is_weakly_centered(sys)


def test_classical_shift_is_centered():
    assert is_centered(tree_to_wco(path_shift([1.0, 2.0, 0.5, 3.0])))
    assert is_centered(identity_system(3))


def test_t2infty_alpha_two_not_centered():
    rep = is_centered(tree_to_wco(build_t2infty(2.0, 4)))
    assert not rep and rep.witness["commutator"] > TOL


def test_centered_depth_bounds():
    with pytest.raises(InputError):
        is_centered(identity_system(2), depth=0)


@given(systems())
def test_centered_implies_weakly_centered(sys):
    if is_centered(sys):
        assert is_weakly_centered(sys)


def test_isometry_multiple_cases(kernel2):
    assert is_isometry_multiple(make_system([2, 1], [1.0, 1.0]))
    assert not is_isometry_multiple(kernel2)


@given(structured_systems(), st.sampled_from([2.0, 0.3j, -1.5]), st.sampled_from([0.2, 7.0]))
def test_verdicts_invariant_under_scaling(sys, c, m):
    scaled = make_system(list(sys.phi + 1), sys.w * c, sys.masses * m)
    for a, b in zip(all_reports(sys), all_reports(scaled)):
        if a.property_name not in ("cohyponormal", "centered"):
            assert a.verdict == b.verdict, a.property_name


@given(structured_systems())
def test_phase_is_quasinormal_when_density_positive(sys):
    if is_weakly_centered(sys) and np.all(np.abs(polar(sys).modulus_density)[sys.mu_w > 0] > 0):
        assert is_quasinormal(polar(sys).phase_system(sys))


def test_phase_of_weakly_centered_nilpotent_is_not_quasinormal():
    # rank-one nilpotent: weakly centered, yet its phase is not quasinormal
    sys = make_system([1, 1], [0.0, 1.0])
    assert is_weakly_centered(sys)
    phase = polar(sys).phase_system(sys)
    assert not is_quasinormal(phase)
    assert oracle.quasinormal_commutator(oracle.to_matrix(phase).entries) == pytest.approx(1.0)


def test_all_reports_lists_every_property():
    names = [r.property_name for r in all_reports(identity_system(2))]
    assert names[0] == "weakly_centered" and "centered" in names and "hyponormal" in names
    assert all(r.verdict for r in all_reports(identity_system(2)))
