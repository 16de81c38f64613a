import numpy as np
import pytest

from tlbo_planner.scenario import Bounds, Obstacle, Point3, Scenario, load_canonical

ACCEPTANCE_LINES: list[str] = []


class ScriptedRng:
    """Stand-in for ``np.random.Generator.random`` that replays fixed values."""

    def __init__(self, values):
        self.values = list(values)

    def random(self, size=None):
        if size is None:
            return self.values.pop(0)
        out = np.array([self.values.pop(0) for _ in range(int(np.prod(size)))])
        return out.reshape(size)


@pytest.fixture(scope="session")
def canonical():
    return load_canonical()


@pytest.fixture
def line_scenario():
    """Empty 20 x 10 x 10 box, start and goal 10 m apart at z = 5."""
    bounds = Bounds(Point3(0, -5, 0), Point3(20, 5, 10), 1.0, 9.0)
    return Scenario(bounds, (), Point3(0, 0, 5), Point3(10, 0, 5), 1)


@pytest.fixture
def one_obstacle_scenario():
    bounds = Bounds(Point3(0, -5, 0), Point3(20, 5, 10), 1.0, 9.0)
    return Scenario(bounds, (Obstacle(Point3(5, 3, 5), 1.0),), Point3(0, 0, 5),
                    Point3(10, 0, 5), 2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
