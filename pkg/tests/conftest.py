import numpy as np
import pytest


def random_symmetric(n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n))
    s = 0.5 * (g + g.T)
    return scale * s / np.linalg.norm(s, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# lines collected by test_acceptance, echoed even when output is captured
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
