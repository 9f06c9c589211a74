import numpy as np
import pytest

from wgcgs import WeightedGraph, karate_club


@pytest.fixture(scope="session")
def karate():
    return karate_club()


@pytest.fixture
def two_triangles():
    edges = [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)]
    return WeightedGraph(6, tuple(edges), node_labels=(0, 0, 0, 1, 1, 1))


@pytest.fixture
def barbell():
    edges = [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1), (2, 3, 1)]
    return WeightedGraph(6, tuple(edges), node_labels=(0, 0, 0, 1, 1, 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20200402)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    if module and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
