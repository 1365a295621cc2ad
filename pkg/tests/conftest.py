import numpy as np
import pytest

from memenergy.models import mem_inerter
from memenergy.signals import reference_force_profile

B0, W = 9381.7, 0.1
REFERENCE_COEFFS = [2.5, -0.25, -5.0, -1.25, 0.0, 2.75, 0.0, -1.25]

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def inerter():
    return mem_inerter(B0, W)


@pytest.fixture(scope="session")
def force():
    return reference_force_profile()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
