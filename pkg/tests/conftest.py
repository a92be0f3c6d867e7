import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240611))


def random_weight(rng, n, scale=2.0, complex_part=False):
    lam = rng.uniform(-scale, scale, n + 1)
    if complex_part:
        lam = lam + 1j * rng.uniform(-0.5, 0.5, n + 1)
    return lam - lam.mean()


# acceptance outcomes, one line per criterion, printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES, key=lambda s: int(s[2:])):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
