import numpy as np
import pytest

from qsdkit.operators import Ensemble

S2 = 1 / np.sqrt(2)
KET0 = np.array([1, 0])
KET1 = np.array([0, 1])
KETP = np.array([S2, S2])


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def zero_plus():
    return Ensemble.from_pure([0.5, 0.5], [KET0, KETP])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
