import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from skellam_markov import LatticeMeasure

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@st.composite
def measures(draw, max_len=64, zero_mass=False):
    size = draw(st.integers(2 if zero_mass else 1, max_len))
    w = np.array(draw(st.lists(st.floats(-1, 1), min_size=size, max_size=size)))
    if zero_mass:
        w = w - w.mean()
    return LatticeMeasure(draw(st.integers(-20, 20)), w)


@st.composite
def probabilities(draw, max_len=8):
    size = draw(st.integers(1, max_len))
    w = np.array(draw(st.lists(st.floats(0.01, 1), min_size=size, max_size=size)))
    return LatticeMeasure(draw(st.integers(-5, 5)), w / w.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
