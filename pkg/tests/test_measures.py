import math
import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commchar.community import CommunityStructure
from commchar.measures import (
    MeasureTable, community_degrees, compute_table, embeddedness, internal_degree, local_transitivity,
    participation, read_measures, within_module_degree, write_measures,
)
from commchar.network import DynamicNetwork

from conftest import random_network, two_cliques_bridge

TOL = 1e-9


def test_internal_degree_extremes():
    net = DynamicNetwork.from_edges(4, [[(0, 1), (0, 2), (0, 3)]])
    same = CommunityStructure((0, 0, 0, 0))
    apart = CommunityStructure((0, 1, 1, 1))
    assert internal_degree(net, 1, 0, same) == 3
    assert internal_degree(net, 1, 0, apart) == 0


def test_internal_degree_matches_recount():
    rng = random.Random(3)
    net = random_network(rng, n=20, theta=2)
    comm = CommunityStructure.from_labels([rng.randrange(3) for _ in range(20)])
    for t in (1, 2):
        for v in range(20):
            brute = len([w for w in range(20) if (min(v, w), max(v, w)) in net.edges[t - 1] and comm(w) == comm(v)])
            assert internal_degree(net, t, v, comm) == brute


def test_transitivity_triangle_and_path():
    tri = DynamicNetwork.from_edges(3, [[(0, 1), (1, 2), (0, 2)]])
    path = DynamicNetwork.from_edges(3, [[(0, 1), (1, 2)]])
    assert local_transitivity(tri, 1, 0) == 1.0
    assert local_transitivity(path, 1, 1) == 0.0
    assert local_transitivity(path, 1, 0) == 0.0  # degree 1


def test_transitivity_matches_networkx():
    rng = random.Random(4)
    net = random_network(rng, n=15, theta=1, p=0.4)
    g = nx.Graph()
    g.add_nodes_from(range(15))
    g.add_edges_from(net.edges[0])
    expected = nx.clustering(g)
    for v in range(15):
        assert local_transitivity(net, 1, v) == pytest.approx(expected[v], abs=TOL)


def _table_with_internal(values):
    arr = np.array([values])
    zeros = np.zeros_like(arr, dtype=float)
    return MeasureTable(arr, arr, zeros, zeros, zeros, zeros)


def test_z_score_hand_values():
    table = _table_with_internal([1, 1, 4])
    comm = CommunityStructure((0, 0, 0))
    assert within_module_degree(table, 1, 2, comm) == pytest.approx(2 / math.sqrt(2), abs=TOL)
    assert within_module_degree(table, 1, 0, comm) == pytest.approx(-1 / math.sqrt(2), abs=TOL)


def test_z_zero_when_uniform_or_singleton():
    table = _table_with_internal([2, 2, 2, 0])
    comm = CommunityStructure((0, 0, 0, 1))
    assert all(within_module_degree(table, 1, v, comm) == 0.0 for v in range(4))


def test_z_star_is_hub_free():
    # centre internal degree 4, leaves 1: mean 1.6, population sigma 1.2
    net = DynamicNetwork.from_edges(5, [[(0, i) for i in range(1, 5)]])
    table = compute_table(net, CommunityStructure((0,) * 5))
    assert table.z[0, 0] == pytest.approx(2.0, abs=TOL)
    assert table.z[0, 1] == pytest.approx(-0.5, abs=TOL)
    assert not table.is_hub(1, 0)


def test_hub_boundary_inclusive():
    arr = np.zeros((1, 2))
    table = MeasureTable(arr, arr, arr, np.array([[2.5, 2.4999]]), arr, arr)
    assert table.is_hub(1, 0) and not table.is_hub(1, 1)


def test_participation_values():
    net = DynamicNetwork.from_edges(5, [[(0, 1), (0, 2), (0, 3), (0, 4)]])
    one = CommunityStructure((0, 0, 0, 0, 0))
    split = CommunityStructure((0, 0, 0, 1, 1))
    assert participation(net, 1, 0, one) == 0.0
    assert participation(net, 1, 0, split) == pytest.approx(0.5, abs=TOL)
    isolated = DynamicNetwork.from_edges(2, [[]])
    assert participation(isolated, 1, 0, CommunityStructure((0, 0))) == 0.0


def test_participation_matches_recount():
    rng = random.Random(5)
    net = random_network(rng, n=18, theta=1, p=0.35)
    comm = CommunityStructure.from_labels([rng.randrange(4) for _ in range(18)])
    for v in range(18):
        nbrs = [w for w in range(18) if w != v and (min(v, w), max(v, w)) in net.edges[0]]
        if not nbrs:
            expected = 0.0
        else:
            expected = 1 - sum((sum(1 for w in nbrs if comm(w) == c) / len(nbrs)) ** 2 for c in range(comm.count))
        assert participation(net, 1, v, comm) == pytest.approx(expected, abs=TOL)


def test_embeddedness_values():
    arr = np.array([[5, 3, 0]])
    table = MeasureTable(arr, np.array([[2, 3, 0]]), *(np.zeros((1, 3)),) * 4)
    assert embeddedness(table, 1, 0) == pytest.approx(0.4, abs=TOL)
    assert embeddedness(table, 1, 1) == 1.0
    assert embeddedness(table, 1, 2) == 0.0


def test_two_cliques_bridge_fixture():
    net = two_cliques_bridge()
    table = compute_table(net, CommunityStructure((0,) * 4 + (1,) * 4))
    # bridge endpoint 3: neighbours 0,1,2 (linked to each other) and 4
    assert table.degree[0, 3] == 4 and table.internal_degree[0, 3] == 3
    assert table.transitivity[0, 3] == pytest.approx(0.5, abs=TOL)
    assert table.participation[0, 3] == pytest.approx(0.375, abs=TOL)
    assert table.embeddedness[0, 3] == pytest.approx(0.75, abs=TOL)
    assert table.z[0, 3] == pytest.approx(0.0, abs=TOL)
    # inner node 0
    assert table.transitivity[0, 0] == 1.0
    assert table.participation[0, 0] == 0.0
    assert table.embeddedness[0, 0] == 1.0


def test_table_shape_and_idempotence():
    from test_network import fig1_network
    net = fig1_network()
    comm = CommunityStructure((0, 0, 0, 1, 1, 1, 1))
    a, b = compute_table(net, comm), compute_table(net, comm)
    assert a.degree.size == 21 and a == b


def test_csv_round_trip(tmp_path):
    rng = random.Random(9)
    net = random_network(rng, n=10, theta=3)
    table = compute_table(net, CommunityStructure.from_labels([v % 3 for v in range(10)]))
    write_measures(table, tmp_path / "m.csv")
    assert read_measures(tmp_path / "m.csv", 10, 3) == table


@st.composite
def net_and_partition(draw):
    n = draw(st.integers(1, 9))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    theta = draw(st.integers(1, 3))
    slices = [draw(st.sets(st.sampled_from(pairs))) if pairs else set() for _ in range(theta)]
    labels = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    return DynamicNetwork.from_edges(n, slices), CommunityStructure.from_labels(labels)


@settings(max_examples=80, deadline=None)
@given(net_and_partition())
def test_table_invariants(case):
    net, comm = case
    table = compute_table(net, comm)
    assert np.all(table.internal_degree <= table.degree)
    assert np.all((0 <= table.embeddedness) & (table.embeddedness <= 1))
    assert np.all((0 <= table.transitivity) & (table.transitivity <= 1))
    assert np.all((0 <= table.participation) & (table.participation < 1))
    for t in range(1, net.theta + 1):
        for v in range(net.n):
            assert sum(community_degrees(net, t, v, comm).values()) == table.degree[t - 1, v]
        for c in range(comm.count):
            idx = sorted(comm.members(c))
            assert abs(table.z[t - 1, idx].mean()) < 1e-9
