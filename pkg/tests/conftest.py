import numpy as np
import pytest

from pdapa.topology import topology_from_edges

NINE_EDGES = [
    (1, 2), (2, 3), (1, 3),
    (4, 5), (5, 6), (4, 6),
    (7, 8), (8, 9),
    (3, 4), (2, 5), (6, 7), (5, 8), (9, 1),
]
NINE_CLUSTERS = [1, 1, 1, 2, 2, 2, 3, 3, 3]
DESK_EDGES = [(1, 2), (2, 3), (3, 4), (1, 4), (1, 3)]


@pytest.fixture
def nine():
    return topology_from_edges(9, NINE_EDGES, NINE_CLUSTERS)


@pytest.fixture
def desk():
    return topology_from_edges(4, DESK_EDGES, [1, 1, 2, 2])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion.

    The line is printed immediately and repeated in the terminal summary so
    it is visible without ``-s``.
    """

    def emit(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        print(line)
        _ACCEPTANCE.append(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
