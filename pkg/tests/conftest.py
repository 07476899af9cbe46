import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def spectra(draw, min_n=2, max_n=7, min_gap=0.2):
    """Strictly increasing spectra with gaps bounded below, so densities are well conditioned."""
    n = draw(st.integers(min_n, max_n))
    gaps = draw(st.lists(st.floats(min_gap, 3.0), min_size=n - 1, max_size=n - 1))
    start = draw(st.floats(-5.0, 5.0))
    return np.concatenate(([0.0], np.cumsum(gaps))) + start


def random_spectrum(rng, n, scale=1.0):
    gaps = rng.uniform(0.3, 1.5, n - 1) * scale
    return np.concatenate(([0.0], np.cumsum(gaps))) + rng.uniform(-2, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Append a criterion summary line; all lines are repeated in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    def log(line):
        print(line)
        lines.append(line)

    return log


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
