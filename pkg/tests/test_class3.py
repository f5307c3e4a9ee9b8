import networkx as nx
import numpy as np
import pytest

from class3 import (Class3Error, absolute_delta, absolute_structure, absolute_vertex_check, build_delta,
                    check_conditions, check_supported, find_triples, fixed_subgroup, moving_absolute_delta,
                    moving_graph_report, point_type_isomorphism, rank2_as_graph, run_class3)
from incidence import absolute_geometry
from permgroup import psl2_order, transporter_exists


@pytest.mark.parametrize("q,allow_large", [(6, False), (7, False), (11, True)])
def test_unsupported_q(q, allow_large):
    with pytest.raises(Class3Error):
        check_supported(q, allow_large, 10 ** 9)


def test_group_order_cap():
    with pytest.raises(Class3Error):
        check_supported(5, False, 1000)
    check_supported(5, True, 1000)
    check_supported(7, True, 1000)


def test_unique_triple_class_q2(triples2):
    assert len(triples2) == 1
    t = triples2[0]
    G = t.alpha.group
    assert all(check_conditions(G, t.alpha, t.rho0, t.rho1).values())
    assert t.to_dict(G)["index"] == 0


def test_subgroup_orders(delta2):
    orders = delta2.orders()
    assert orders[1] == 4
    assert orders[0] == orders[2] == orders[3]
    assert delta2.coset_counts()[1] == psl2_order(8) // 4 == 126


def test_triple_for_other_q_rejected(triples2):
    with pytest.raises(Class3Error):
        build_delta(3, triples2[0])


def test_fixed_subgroup(delta2):
    assert fixed_subgroup(delta2).size == 6
    assert delta2.absolute_reps(1).size == 6


def test_absolute_structure_q2(delta2):
    s = absolute_structure(delta2)
    assert s["vertices"] == 9
    assert s["fixed_edges"] == 6
    assert s["fixed_subgroup_order"] == 6
    assert s["shapes"] == {"P3": 3}
    assert s["paths"] == 3


def test_absolute_delta_graph(delta2):
    g = rank2_as_graph(absolute_delta(delta2))
    assert g.n == 9
    assert g.edge_count == 6


def test_moving_graph_is_prism(delta2):
    mg = moving_absolute_delta(delta2)
    assert (mg.n, mg.graph.edge_count) == (6, 9)
    assert mg.parallel_edges == 0
    assert nx.is_isomorphic(mg.graph.to_networkx(), nx.circular_ladder_graph(3))


def test_moving_graph_report_q2(delta2):
    report = moving_graph_report(delta2, moving_absolute_delta(delta2))
    assert report["aut_order"] == 12
    assert report["girth"] == 3
    assert report["diameter"] == 2
    assert report["degrees"] == [3]
    assert report["group_order"] == 6


def test_edges_are_not_points(delta2):
    with pytest.raises(Class3Error):
        moving_absolute_delta(delta2, point_type=1)


def test_point_type_isomorphism(delta2):
    report = point_type_isomorphism(delta2)
    assert report["ok"]
    assert report["explicit_map"]


def test_single_incidence_check(delta2):
    report = absolute_vertex_check(delta2)
    assert report["checked"] == psl2_order(8)
    assert report["mismatches"] == 0


def test_explicit_coset_geometry(delta2):
    system = delta2.to_incidence_system()
    assert int((system.types == 1).sum()) == 126
    assert system.n == sum(delta2.coset_counts())
    absolute = absolute_geometry(system, delta2.triality(system))
    assert absolute.n == 15
    assert absolute.type_names == ("vertex+face+petrie", "edge")
    assert np.bincount(absolute.types).tolist() == [9, 6]
    assert absolute.pairs().shape[0] == 12


def test_triality_has_order_three(delta2):
    phi = delta2.triality()
    assert phi.type_perm == (2, 1, 3, 0)
    assert phi.power(3).perm == tuple(range(len(phi.perm)))


def test_run_class3_q2(triples2):
    result = run_class3(2, triples=triples2)
    assert result["triple_classes"] == 1
    (c,) = result["classes"]
    assert c["absolute"]["paths"] == 3
    assert c["moving"]["vertices"] == 6
    assert c["single_check"]["ok"]
    with pytest.raises(Class3Error):
        run_class3(2, triples=triples2, triple_index=1)


@pytest.mark.slow
def test_q3_triples_are_admissible():
    for t in find_triples(3):
        assert all(check_conditions(t.alpha.group, t.alpha, t.rho0, t.rho1).values())


@pytest.mark.slow
def test_q4_classes():
    result = run_class3(4)
    assert result["triple_classes"] >= 1
    assert 30 in {c["absolute"]["paths"] for c in result["classes"]}
    assert any(c["moving"]["vertices"] == 90 and c["moving"]["edges"] == 75 for c in result["classes"])
    assert all(c["absolute"]["fixed_edges"] == c["absolute"]["fixed_subgroup_order"] == 60
               for c in result["classes"])


@pytest.mark.slow
def test_q5_classes():
    result = run_class3(5)
    classes = [c["moving"] for c in result["classes"]]
    assert 30 in {c["absolute"]["paths"] for c in result["classes"]}
    assert all(c["absolute"]["fixed_edges"] == c["absolute"]["fixed_subgroup_order"] == 60
               for c in result["classes"])
    assert any(m["vertices"] == 30 and m["edges"] == 60 and m["degrees"] == [4]
               and m["rank2"] == [7, 5, 8] and m["arc_transitive"] for m in classes)
    assert any(m["vertices"] == 60 and m["girth"] == 3 and m["diameter"] == 8 and m["vertex_transitive"]
               for m in classes)


def test_admissible_triple_has_no_duality(triples2):
    t = triples2[0]
    G = t.alpha.group
    assert not transporter_exists(G, t.rho0, t.rho2, t.rho1)
    assert G.subgroup([t.rho0, t.rho2]).order() == 4
