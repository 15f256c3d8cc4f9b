import itertools

import pytest

from rigikit.builders import one_extension
from rigikit.graph_core import SimpleGraph, complete_graph

ACCEPTANCE_LINES: list[str] = []


def k4_minus_edge() -> SimpleGraph:
    return complete_graph(4).remove_edge(2, 3)


def k4_one_extension() -> SimpleGraph:
    return one_extension(complete_graph(4), 2, (0, 1), [2])


def k5_one_extension() -> SimpleGraph:
    return one_extension(complete_graph(5), 3, (0, 1), [2, 3])


def glued_k4s(keep_edge: bool = True) -> SimpleGraph:
    """Two K4 on {0,1,2,3} and {0,1,4,5}."""
    edges = set(itertools.combinations(range(4), 2))
    edges |= {tuple(sorted(e)) for e in itertools.combinations([0, 1, 4, 5], 2)}
    if not keep_edge:
        edges.discard((0, 1))
    return SimpleGraph(6, frozenset(edges))


@pytest.fixture
def k4():
    return complete_graph(4)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
