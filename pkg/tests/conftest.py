import os

import numpy as np
import pytest

from wfa_aak.wfa import example1, load_wfa

DATA = os.path.join(os.path.dirname(__file__), "data")

# Hankel singular numbers of data/three_state.json from the SVD of a
# 401 x 401 Hankel truncation (entries below 1e-200 beyond that size).
THREE_STATE_SINGULAR = np.array([0.8072344639021951, 0.033502244570659, 0.0004110426640922821])


def data_path(name):
    return os.path.join(DATA, name)


@pytest.fixture
def ex1():
    return example1()


@pytest.fixture
def three_state():
    return load_wfa(data_path("three_state.json"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
