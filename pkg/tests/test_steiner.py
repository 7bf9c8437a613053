import pytest
from hypothesis import given, settings, strategies as st

from combench import steiner
from combench.steiner import GridSteinerInstance, make_edge


def _line(a, b):
    """Edges of a straight top-layer path between two vertices sharing x or y."""
    (x1, y1, z), (x2, y2, _) = a, b
    pts = [(x, y1, z) for x in range(min(x1, x2), max(x1, x2) + 1)] if y1 == y2 else \
        [(x1, y, z) for y in range(min(y1, y2), max(y1, y2) + 1)]
    return {make_edge(u, v) for u, v in zip(pts, pts[1:])}


def test_simple_net_feasible_and_counts_edges():
    inst = GridSteinerInstance(4, 1, frozenset(), (frozenset({(0, 0, 0), (0, 3, 0)}),))
    v = steiner.check(inst, _line((0, 0, 0), (0, 3, 0)))
    assert v.feasible and v.objective == 3


def test_violations():
    inst = GridSteinerInstance(4, 2, frozenset(), (frozenset({(0, 0, 0), (0, 3, 0)}),
                                                   frozenset({(3, 0, 0), (3, 3, 0)})))
    net0 = _line((0, 0, 0), (0, 3, 0))
    assert {x.constraint_id for x in steiner.check(inst, net0).violations} == {"connect"}
    stray = net0 | _line((3, 0, 0), (3, 3, 0)) | {make_edge((1, 1, 1), (2, 1, 1))}
    assert {x.constraint_id for x in steiner.check(inst, stray).violations} == {"stray"}
    shared = net0 | _line((3, 0, 0), (3, 3, 0)) | _line((0, 0, 0), (3, 0, 0))
    ids = {x.constraint_id for x in steiner.check(inst, shared).violations}
    assert "disjoint" in ids and "forest" not in ids


def test_cycle_detected():
    inst = GridSteinerInstance(2, 1, frozenset(), (frozenset({(0, 0, 0), (1, 1, 0)}),))
    square = {make_edge((0, 0, 0), (1, 0, 0)), make_edge((1, 0, 0), (1, 1, 0)),
              make_edge((1, 1, 0), (0, 1, 0)), make_edge((0, 1, 0), (0, 0, 0))}
    assert "forest" in {x.constraint_id for x in steiner.check(inst, square).violations}


def test_edges_must_be_unit_and_avoid_holes():
    inst = GridSteinerInstance(4, 2, frozenset({(1, 1, 1)}), (frozenset({(0, 0, 0), (0, 3, 0)}),))
    with pytest.raises(ValueError):
        steiner.check(inst, {make_edge((0, 0, 0), (0, 2, 0))})
    with pytest.raises(ValueError):
        steiner.check(inst, {make_edge((1, 1, 0), (1, 1, 1))})


def test_terminals_must_sit_on_top_border():
    with pytest.raises(ValueError):
        GridSteinerInstance(4, 1, frozenset(), (frozenset({(1, 1, 0), (0, 0, 0)}),))


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 9), st.integers(1, 3), st.integers(2, 4), st.integers(0, 2), st.integers(0, 10**5))
def test_generator_witness_is_feasible(S, L, T, H, seed):
    inst, edges = steiner.generate(S, L, T, H, seed)
    assert steiner.check(inst, edges).feasible
    assert steiner.read_stp(steiner.write_stp(inst)) == inst
    assert steiner.read_solution(steiner.write_solution(edges)) == edges
