import numpy as np
import pytest

from wco import fuzz, model
from wco.fuzz import battery, minimize, mutated_h, random_system, run_battery, run_checks
from wco.properties import is_weakly_centered


def test_battery_is_deterministic():
    a, b = battery(20, 5), battery(20, 5)
    assert all(x == y for x, y in zip(a, b))


@pytest.mark.parametrize("mode", fuzz.MODES)
def test_generator_modes(mode):
    rng = np.random.default_rng(11)
    systems = [random_system(rng, 8, mode) for _ in range(40)]
    assert all(1 <= len(s) <= 8 for s in systems)
    masses = np.concatenate([s.masses for s in systems])
    assert masses.min() >= 0.1 and masses.max() <= 10.0
    share = np.mean([is_weakly_centered(s).verdict for s in systems])
    if mode in ("normal", "injective"):
        assert share == 1.0
    elif mode == "weakly_centered":
        # atoms with h = 0 may share a fiber with rescaled ones, so this only biases
        assert share > 0.5


def test_generator_has_zero_weights():
    ws = np.concatenate([s.w for s in battery(200, 1)])
    assert 0.1 < np.mean(ws == 0) < 0.4


def test_run_checks_all_pass_on_kernel_example():
    from conftest import make_system
    res = run_checks(make_system([1, 1], [1.0, 0.0]))
    assert all(r.ok for r in res if r.counted)


def test_observation_is_not_counted():
    from conftest import make_system
    res = {r.name: r for r in run_checks(make_system([1, 1], [0.0, 1.0]))}
    obs = res["phase_quasinormal_h_vanishes"]
    assert not obs.ok and not obs.counted


def test_mutation_is_restored():
    original = model.rn_values
    with mutated_h("h-sign"):
        assert model.rn_values is not original
    assert model.rn_values is original and fuzz.rn_values is original


def test_mutant_detected_and_minimized():
    summary = run_battery(40, 42, mutant="h-sign")
    assert summary.failures > 0
    ex = summary.counterexamples[0]
    assert len(ex["system"]["space"]["atoms"]) <= 8


def test_minimize_keeps_failure():
    sys = battery(1, 0, max_atoms=8)[0]
    small = minimize(sys, lambda s: len(s) >= 1)
    assert len(small) >= 1
    assert np.count_nonzero(small.w) == 0 or len(small) == 1


def test_workers_do_not_change_results():
    a = run_battery(30, 13, workers=1)
    b = run_battery(30, 13, workers=2)
    assert a.passed == b.passed and a.failed == b.failed and a.observed == b.observed


def test_reference_run_has_no_failures():
    summary = run_battery(1000, 42, workers=4)
    assert summary.failures == 0, summary.counterexamples
    assert summary.passed["weak_centered_equivalence"] == 1000
