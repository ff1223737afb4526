import numpy as np
import pytest

from omvit import Graph

from helpers import clique_edges

_acceptance: dict = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20210827)


@pytest.fixture
def triangle():
    return Graph.from_edges([("a", "b"), ("b", "c"), ("a", "c")])


@pytest.fixture
def two_k5_bridge():
    # cliques 0-4 and 5-9, path node 10 between nodes 4 and 5
    return Graph.from_edges(clique_edges(5) + clique_edges(5, 5) + [(4, 10), (10, 5)])


@pytest.fixture
def two_k4_shared():
    # node 3 sits in both cliques {0,1,2,3} and {3,4,5,6}
    return Graph.from_edges(clique_edges(4) + [(3, 4), (3, 5), (3, 6), (4, 5), (4, 6), (5, 6)])


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance.items()):
        word = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{word:4}  {name}")
