import numpy as np
import pytest

from ergmbayes.graph import from_edge_list


def random_graph(n, m, rng, attributes=None):
    iu = np.array(np.triu_indices(n, 1)).T
    pick = iu[rng.choice(len(iu), size=m, replace=False)]
    return from_edge_list(n, pick.tolist(), attributes=attributes)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def triangle():
    return from_edge_list(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def star4():
    return from_edge_list(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def k4():
    return from_edge_list(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])


@pytest.fixture
def small_net():
    """Five nodes: a triangle with a pendant path, plus a two-valued attribute."""
    return from_edge_list(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)],
                          attributes={"a": ["x", "x", "y", "y", "x"]})


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
