import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from combench import mis, solvers


@st.composite
def graphs(draw, n_max=12):
    n = draw(st.integers(1, n_max))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.sets(st.sampled_from(pairs), max_size=len(pairs))) if pairs else set()
    return mis.Graph(n, frozenset(edges))


@given(graphs(), st.data())
def test_greedy_output_is_independent(g, data):
    x = data.draw(st.lists(st.integers(0, 1), min_size=g.n, max_size=g.n))
    assert mis.check(g, mis.greedy_postprocess(g, x)).feasible


@given(graphs(), st.data())
def test_retry_mode_is_maximal(g, data):
    x = data.draw(st.lists(st.integers(0, 1), min_size=g.n, max_size=g.n))
    s = mis.greedy_postprocess(g, x, retry_removed=True)
    assert mis.check(g, s).feasible and mis.is_maximal(g, s)


def test_literal_mode_can_stop_short_of_maximal():
    g = mis.Graph(6, frozenset({(0, 1), (0, 3), (0, 4), (1, 2), (1, 4), (2, 4), (3, 4), (3, 5)}))
    s = mis.greedy_postprocess(g, [1] * 6)
    assert s == [2, 5] and not mis.is_maximal(g, s)
    assert mis.is_maximal(g, mis.greedy_postprocess(g, [1] * 6, retry_removed=True))


def test_independent_input_is_kept():
    g = mis.Graph(4, frozenset({(0, 1), (2, 3)}))
    assert mis.greedy_postprocess(g, [1, 0, 1, 0]) == [0, 2]


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_exact_size_matches_models(g):
    alpha = mis.exact_mis_size(g)
    assert solvers.brute_force(mis.build_blp(g)).best_energy == alpha
    assert solvers.brute_force(mis.build_qubo(g, 2)).best_energy == alpha


def test_exact_size_against_networkx():
    rng = random.Random(0)
    for _ in range(20):
        G = nx.gnp_random_graph(rng.randint(2, 16), rng.random(), seed=rng.randint(0, 10**6))
        g = mis.Graph.from_networkx(G)
        assert mis.exact_mis_size(g) == max(len(c) for c in nx.find_cliques(nx.complement(G)))


def test_karate_independence_number():
    g = mis.karate()
    assert (g.n, len(g.edges)) == (34, 78)
    assert mis.exact_mis_size(g) == 20


def test_check_names_violated_edges():
    g = mis.Graph(3, frozenset({(0, 1), (1, 2)}))
    v = mis.check(g, [0, 1])
    assert [x.constraint_id for x in v.violations] == ["edge(1,2)"]
    assert mis.check(g, [0, 2]).objective == 2


def test_validation_and_formats():
    with pytest.raises(ValueError):
        mis.Graph(2, frozenset({(0, 0)}))
    with pytest.raises(ValueError):
        mis.build_qubo(mis.Graph(2, frozenset()), lam=0)
    with pytest.raises(ValueError):
        mis.read_gph("e 1 2\n")
    g = mis.karate()
    assert mis.read_gph(mis.write_gph(g)) == g
    assert mis.read_vertex_set(mis.write_vertex_set([0, 5, 9])) == [0, 5, 9]
