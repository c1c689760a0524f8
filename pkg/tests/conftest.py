import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# shared 10-point fixture
Y10 = np.array([0, 1, 1, 1, 0, 0, 0, 1, 0, 0], dtype=np.int8)
P10 = np.array([0, 0, 1, 0, 0, 0, 0, 0, 0, 0], dtype=np.int8)


@pytest.fixture
def y10():
    return Y10.copy()


@pytest.fixture
def p10():
    return P10.copy()


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
