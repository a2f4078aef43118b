import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from wco.fuzz import random_system
from wco.measure_space import DiscreteMeasureSpace
from wco.model import WcoSystem

settings.register_profile("wco", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("wco")


def make_system(phi, w, masses=None):
    """Atoms named "1".."n"; ``phi`` uses 1-based atom numbers."""
    n = len(phi)
    ids = [str(k + 1) for k in range(n)]
    masses = [1.0] * n if masses is None else masses
    space = DiscreteMeasureSpace(tuple(ids), masses)
    return WcoSystem(space, [p - 1 for p in phi], w)


def identity_system(n=3, w=1.0, masses=None):
    return make_system(list(range(1, n + 1)), [w] * n, masses)


@pytest.fixture
def kernel2():
    # X = {1, 2}, phi = 1, counting measure, w = (1, 0)
    return make_system([1, 1], [1.0, 0.0])


_log_mass = st.floats(min_value=np.log(0.1), max_value=np.log(10.0))
_weight = st.one_of(
    st.just(0j),
    st.builds(lambda r, t: np.exp(r) * np.exp(1j * t),
              st.floats(min_value=np.log(0.5), max_value=np.log(2.0)),
              st.floats(min_value=0.0, max_value=2 * np.pi)),
)


@st.composite
def systems(draw, max_atoms=6):
    """Arbitrary fibers, log-uniform masses, weights that are often zero."""
    n = draw(st.integers(min_value=1, max_value=max_atoms))
    phi = draw(st.lists(st.integers(min_value=0, max_value=n - 1), min_size=n, max_size=n))
    masses = [float(np.exp(v)) for v in draw(st.lists(_log_mass, min_size=n, max_size=n))]
    w = draw(st.lists(_weight, min_size=n, max_size=n))
    space = DiscreteMeasureSpace(tuple(f"a{k}" for k in range(n)), masses)
    return WcoSystem(space, phi, w)


@st.composite
def structured_systems(draw, max_atoms=6):
    """Systems from the fuzz generator, which oversamples weakly centered and normal cases."""
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_system(np.random.default_rng(seed), max_atoms)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
