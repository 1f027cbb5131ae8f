import math

import numpy as np
import pytest

from chlab.quantum import TwoQubitPureState
from chlab.scenario import Behavior, Scenario

# (sqrt(2) - 1) / 2, the singlet's CH value at the canonical settings
CH_QUANTUM = (math.sqrt(2.0) - 1.0) / 2.0

ACCEPTANCE_LINES = []


@pytest.fixture
def canonical():
    return Scenario.canonical()


@pytest.fixture
def singlet():
    return TwoQubitPureState.singlet()


@pytest.fixture
def fair():
    return Behavior(((0.25, 0.25), (0.25, 0.25)), (0.5, 0.5), (0.5, 0.5))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
