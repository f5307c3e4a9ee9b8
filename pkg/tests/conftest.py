import os
import sys

import networkx as nx
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
for path in (ROOT, os.path.join(ROOT, "modules")):
    if path not in sys.path:
        sys.path.append(path)

from graphtools import SimpleGraph  # noqa: E402
from incidence import IncidenceSystem  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run the expensive q >= 4 pipeline tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: expensive pipeline run, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def _from_nx(g):
    g = nx.convert_node_labels_to_integers(g, ordering="sorted")
    return SimpleGraph(g.number_of_nodes(), g.edges())


# ----------------------------
# Graph fixtures
# ----------------------------
@pytest.fixture
def prism():
    return _from_nx(nx.circular_ladder_graph(3))


@pytest.fixture
def c5():
    return SimpleGraph(5, [(i, (i + 1) % 5) for i in range(5)])


@pytest.fixture
def petersen():
    return _from_nx(nx.petersen_graph())


@pytest.fixture
def k4():
    return _from_nx(nx.complete_graph(4))


@pytest.fixture
def k23_system():
    """Two points, three lines, every point on every line."""
    return IncidenceSystem([0, 0, 1, 1, 1], [(p, l) for p in (0, 1) for l in (2, 3, 4)],
                           type_names=("P", "L"))


@pytest.fixture
def triangle_system():
    """Three points and three lines of a triangle; line 3+i joins points i and i+1."""
    pairs = []
    for i in range(3):
        pairs += [(i, 3 + i), ((i + 1) % 3, 3 + i)]
    return IncidenceSystem([0, 0, 0, 1, 1, 1], pairs, type_names=("P", "L"))


# ----------------------------
# Pipeline fixtures (built once per session)
# ----------------------------
@pytest.fixture(scope="session")
def hex2():
    from hexagon import build_hex_model
    return build_hex_model(2)


@pytest.fixture(scope="session")
def triples2():
    from class3 import find_triples
    return find_triples(2)


@pytest.fixture(scope="session")
def delta2(triples2):
    from class3 import build_delta
    return build_delta(2, triples2[0])
