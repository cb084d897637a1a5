import numpy as np
import pytest

from cbflcp.planar_robot import DiskObstacle, RobotModel


@pytest.fixture
def arm_model():
    return RobotModel((0.1, 0.05, 0.05))


@pytest.fixture
def arm_obstacle():
    return DiskObstacle((0.03, 0.17), 0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_rows(rng, m, n, min_norm=0.1):
    A = rng.uniform(-1.0, 1.0, (m, n))
    for i in range(m):
        while np.linalg.norm(A[i]) < min_norm:
            A[i] = rng.uniform(-1.0, 1.0, n)
    return A


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
