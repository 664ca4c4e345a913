import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from polarfrechet.gallery import random_gaussian

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def rel(X, Y):
    d = np.linalg.norm(Y)
    return np.linalg.norm(X - Y) / d if d > 0 else np.linalg.norm(X - Y)


@pytest.fixture
def gauss():
    """Seeded Gaussian matrix factory."""
    return random_gaussian


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
