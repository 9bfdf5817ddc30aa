import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qtsimage.tdd import TddEngine

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []

# The 8x8 projector of span{|++->, |11->}, scaled by 6.
P6 = np.array([
    [1, -1, 1, -1, 1, -1, 0, 0],
    [-1, 1, -1, 1, -1, 1, 0, 0],
    [1, -1, 1, -1, 1, -1, 0, 0],
    [-1, 1, -1, 1, -1, 1, 0, 0],
    [1, -1, 1, -1, 1, -1, 0, 0],
    [-1, 1, -1, 1, -1, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 3, -3],
    [0, 0, 0, 0, 0, 0, -3, 3],
], dtype=complex)
P_GROVER = P6 / 6

R2 = 1 / math.sqrt(2)
MINUS = np.array([R2, -R2])
V1 = np.kron(np.array([1, 1, 1, 0]) / math.sqrt(3), MINUS)
V2 = np.kron(np.array([0, 0, 0, 1]), MINUS)

PROJ_LABELS = ["x1", "x2", "x3", "q1", "q2", "q3"]


def projector_tdd(engine, matrix):
    """TDD over x (columns) then q (rows) of a [row, column] matrix."""
    n = int(round(math.log2(matrix.shape[0])))
    labels = ["x%d" % (i + 1) for i in range(n)] + ["q%d" % (i + 1) for i in range(n)]
    return engine.from_dense(np.asarray(matrix).T.reshape(-1), labels)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def engine():
    return TddEngine()
