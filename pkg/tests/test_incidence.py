import math

import pytest

from graphtools import SimpleGraph
from incidence import (IncidenceError, IncidenceSystem, absolute_geometry, chambers, correlation,
                       graph_to_rank2, is_geometry, iter_flags, make_flag, rank2_params, residue,
                       residue_parameters)


def test_same_type_incidence_rejected():
    with pytest.raises(IncidenceError):
        IncidenceSystem([0, 0, 1], [(0, 1)])


def test_k23_is_geometry(k23_system):
    assert is_geometry(k23_system)
    assert sum(1 for _ in iter_flags(k23_system)) == 11
    assert len(list(chambers(k23_system))) == 6


def test_isolated_point_breaks_geometry():
    s = IncidenceSystem([0, 0, 1, 1, 1, 0], [(p, l) for p in (0, 1) for l in (2, 3, 4)])
    assert not is_geometry(s)


def test_residue_of_point(k23_system):
    res = residue(k23_system, [0])
    assert res.n == 3
    assert res.rank == 1
    assert res.type_names == ("L",)
    assert res.origin.tolist() == [2, 3, 4]


def test_residue_of_chamber_is_empty(k23_system):
    res = residue(k23_system, make_flag(k23_system, [0, 2]))
    assert res.n == 0
    assert res.rank == 0


def test_non_flag_rejected(k23_system):
    with pytest.raises(IncidenceError):
        make_flag(k23_system, [0, 1])


def test_rank2_params_complete_bipartite(k23_system):
    assert rank2_params(k23_system).as_tuple() == (2, 2, 2)


def test_rank2_params_triangle(triangle_system):
    assert rank2_params(triangle_system).as_tuple() == (3, 3, 3)


def test_graph_to_rank2(c5, k4):
    assert rank2_params(graph_to_rank2(c5)).as_tuple() == (5, 5, 5)
    assert rank2_params(graph_to_rank2(k4)).g == 3


def test_rank2_params_swap_types(k4):
    s = graph_to_rank2(k4)
    assert rank2_params(s).as_tuple() == (3, 3, 4)
    swapped = IncidenceSystem(1 - s.types, s.pairs(), type_names=("L", "P"))
    assert rank2_params(swapped).as_tuple() == (4, 3, 3)
    assert rank2_params(s, point_type=1).as_tuple() == (4, 3, 3)


def test_disconnected_rank2():
    params = rank2_params(graph_to_rank2(SimpleGraph(4, [(0, 1), (2, 3)])))
    assert not params.connected
    assert len(params.components) == 2
    assert params.as_tuple() == (2, math.inf, 1)


def test_sampled_params_marked_inexact(c5):
    params = rank2_params(graph_to_rank2(c5), sample=2)
    assert not params.exact
    assert params.g == 5


def test_rank2_params_needs_rank_two():
    with pytest.raises(IncidenceError):
        rank2_params(IncidenceSystem([0, 1, 2], [(0, 1), (1, 2), (0, 2)]))


def test_residue_parameters_needs_rank_three(k23_system):
    with pytest.raises(IncidenceError):
        residue_parameters(k23_system)


def test_residue_parameters_of_chamber_system():
    s = IncidenceSystem([0, 1, 2], [(0, 1), (1, 2), (0, 2)])
    found = residue_parameters(s)
    assert set(found) == {"0-1", "0-2", "1-2"}


def test_identity_correlation_embeds_original(k23_system):
    absolute = absolute_geometry(k23_system, list(range(5)))
    assert absolute.n == 5
    assert absolute.type_names == ("P", "L")
    assert absolute.pairs().shape[0] == 6


def test_cyclic_correlation_of_chamber():
    s = IncidenceSystem([0, 1, 2], [(0, 1), (1, 2), (0, 2)])
    phi = correlation(s, [1, 2, 0])
    assert phi.type_perm == (1, 2, 0)
    assert phi.power(3).perm == (0, 1, 2)
    absolute = absolute_geometry(s, phi)
    assert absolute.n == 1
    assert absolute.type_names == ("0+1+2",)


def test_correlation_must_permute_types(k23_system):
    with pytest.raises(IncidenceError):
        correlation(k23_system, [2, 1, 0, 3, 4])
    with pytest.raises(IncidenceError):
        correlation(k23_system, [0, 0, 2, 3, 4])


def test_correlation_must_preserve_incidence(triangle_system):
    # points rotated, lines fixed
    with pytest.raises(IncidenceError):
        correlation(triangle_system, [1, 2, 0, 3, 4, 5])
