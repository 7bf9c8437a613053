from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from combench import topology
from combench.topology import GraphCertificate, OdpInstance, Unreachable


def _cert(G):
    return GraphCertificate(G.number_of_nodes(), frozenset(G.edges()))


def test_path_on_three_vertices():
    assert topology.diameter_aspl(GraphCertificate(3, frozenset({(0, 1), (1, 2)}))) == (2, Fraction(4, 3))


def test_disconnected_counts_missing_pairs():
    d = topology.diameter_aspl(GraphCertificate(4, frozenset({(0, 1)})))
    assert d.diameter == Unreachable(5) and d.aspl == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.floats(0.05, 0.9), st.integers(0, 10**6))
def test_against_networkx(n, p, seed):
    G = nx.gnp_random_graph(n, p, seed=seed)
    d = topology.diameter_aspl(_cert(G))
    if nx.is_connected(G):
        assert d.diameter == nx.diameter(G)
        assert float(d.aspl) == pytest.approx(nx.average_shortest_path_length(G))
    else:
        assert isinstance(d.diameter, Unreachable)


def test_sparse_path_matches_dense(monkeypatch):
    G = nx.random_regular_graph(3, 60, seed=1)
    G.remove_edges_from(list(G.edges())[:20])
    dense = topology.diameter_aspl(_cert(G))
    monkeypatch.setattr(topology, "DENSE_LIMIT", 10)
    assert topology.diameter_aspl(_cert(G)) == dense


def test_check_ids():
    star = GraphCertificate(5, frozenset((0, i) for i in range(1, 5)))
    v = topology.check(OdpInstance(5, 3, 1), star)
    assert {x.constraint_id for x in v.violations} == {"degree[0]", "diameter"}
    v = topology.check(OdpInstance(6, 4, 2), star)
    assert "order" in {x.constraint_id for x in v.violations}
    ok = topology.check(OdpInstance(5, 4, 2), star)
    assert ok.feasible and ok.objective == 2 and ok.info["aspl"] == Fraction(8, 5)


@pytest.mark.parametrize("n,d", [(10, 3), (16, 3), (15, 4), (9, 2), (4, 5)])
def test_construct_respects_degree(n, d):
    g = topology.construct(n, d, seed=0, budget=300)
    assert g.n == n and max(g.degrees()) <= d
    assert topology.construct(n, d, seed=0, budget=300) == g


def test_petersen_parameters_reachable():
    g = topology.construct(10, 3, seed=0)
    assert topology.diameter_aspl(g).diameter == 2


def test_edge_list_round_trip_and_validation():
    g = topology.construct(12, 3, seed=2, budget=50)
    assert topology.read_edge_list(topology.write_edge_list(g), 12) == g
    with pytest.raises(ValueError):
        GraphCertificate(3, frozenset({(0, 1), (1, 1)}))
