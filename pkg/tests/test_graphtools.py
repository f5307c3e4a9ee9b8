import math

import networkx as nx
import numpy as np
import pytest

from graphtools import (GraphError, SimpleGraph, aut_order, component_shapes, components, diameter,
                        girth, graph_metrics, has_perfect_matching, is_connected, is_regular, orbits_under)


def test_loops_and_range_rejected():
    with pytest.raises(GraphError):
        SimpleGraph(3, [(1, 1)])
    with pytest.raises(GraphError):
        SimpleGraph(3, [(0, 3)])


def test_duplicate_edges_collapse():
    g = SimpleGraph(3, [(0, 1), (1, 0), (1, 2)])
    assert g.edge_count == 2
    assert g.edges() == [(0, 1), (1, 2)]


def test_girth_and_diameter(prism, c5, petersen, k4):
    assert (girth(prism), diameter(prism)) == (3, 2)
    assert (girth(c5), diameter(c5)) == (5, 2)
    assert (girth(petersen), diameter(petersen)) == (5, 2)
    assert girth(k4) == 3


def test_tree_has_infinite_girth():
    path = SimpleGraph(4, [(0, 1), (1, 2), (2, 3)])
    assert girth(path) == math.inf
    assert diameter(path) == 3


def test_even_cycle_girth():
    c8 = SimpleGraph(8, [(i, (i + 1) % 8) for i in range(8)])
    assert girth(c8) == 8


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_metrics_match_networkx(seed):
    G = nx.random_regular_graph(3, 20, seed=seed)
    g = SimpleGraph(20, G.edges())
    metrics = graph_metrics(g)
    assert metrics["connected"] == nx.is_connected(G)
    if metrics["connected"]:
        assert metrics["diameter"] == nx.diameter(G)
    assert metrics["girth"] == nx.girth(G)
    assert metrics["degrees"] == [3]


def test_components_and_shapes():
    edges = [(0, 1), (2, 3), (3, 4)] + [(5 + i, 5 + (i + 1) % 5) for i in range(5)]
    g = SimpleGraph(11, edges)
    assert components(g)[0] == [0, 1]
    assert not is_connected(g)
    assert component_shapes(g) == {"C5": 1, "K1": 1, "K2": 1, "P3": 1}


def test_graph_metrics_prism(prism):
    m = graph_metrics(prism)
    assert m["vertices"] == 6
    assert m["edges"] == 9
    assert m["degrees"] == [3]
    assert m["regular"] and m["connected"]
    assert m["component_shapes"] == {"(6v,9e)": 1}


def test_empty_graph():
    g = SimpleGraph(0)
    m = graph_metrics(g)
    assert m["vertices"] == 0
    assert m["girth"] == math.inf
    assert aut_order(g).order == 1


def test_regular_and_matching(prism, c5, petersen):
    assert is_regular(petersen)
    assert not is_regular(SimpleGraph(3, [(0, 1), (1, 2)]))
    assert has_perfect_matching(prism)
    assert has_perfect_matching(petersen)
    assert not has_perfect_matching(c5)


@pytest.mark.parametrize("name,expected", [("prism", 12), ("c5", 10), ("petersen", 120), ("k4", 24)])
def test_aut_order(request, name, expected):
    g = request.getfixturevalue(name)
    report = aut_order(g)
    assert report.order == expected
    assert report.to_dict()["order"] == expected


def test_aut_order_matches_networkx_matcher():
    G = nx.circulant_graph(12, [1, 5])
    g = SimpleGraph(12, G.edges())
    count = sum(1 for _ in nx.algorithms.isomorphism.GraphMatcher(G, G).isomorphisms_iter())
    assert aut_order(g).order == count


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_aut_order_invariant_under_relabel(seed, petersen, prism):
    rng = np.random.default_rng(seed)
    cubic = nx.random_regular_graph(3, 16, seed=seed)
    for g in (petersen, prism, SimpleGraph(16, cubic.edges())):
        perm = rng.permutation(g.n).tolist()
        h = g.relabel(perm)
        assert aut_order(h).order == aut_order(g).order
        assert (girth(h), diameter(h)) == (girth(g), diameter(g))


def test_aut_order_refuses_big_graphs():
    with pytest.raises(GraphError):
        aut_order(SimpleGraph(401))


def test_orbits_under_rotation(c5):
    rotation = [(i + 1) % 5 for i in range(5)]
    reflection = [(-i) % 5 for i in range(5)]
    assert orbits_under(c5, [rotation]) == [[0, 1, 2, 3, 4]]
    assert len(orbits_under(c5, [rotation], arcs=True)) == 2
    assert len(orbits_under(c5, [rotation, reflection], arcs=True)) == 1


def test_orbits_under_rejects_non_automorphism(c5):
    with pytest.raises(GraphError):
        orbits_under(c5, [[1, 0, 2, 3, 4]])


def test_relabel_roundtrip(petersen):
    perm = list(range(9, -1, -1))
    assert petersen.relabel(perm).relabel(perm) == petersen
