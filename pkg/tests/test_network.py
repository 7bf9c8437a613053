import random

import pytest
from hypothesis import given, settings, strategies as st

from combench import network, solvers
from combench.network import DemandMatrix, DesignSolution


def _random_demands(n, rng, hi=9):
    return DemandMatrix(tuple(tuple(0 if i == j else rng.randint(0, hi) for j in range(n)) for i in range(n)))


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 24), st.integers(1, 2), st.integers(0, 10**6))
def test_trivial_solution_feasible_with_ring_load(n, p, seed):
    T = _random_demands(n, random.Random(seed))
    sol = network.trivial_solution(n, p, T)
    v = network.check(n, p, T, sol)
    assert v.feasible and v.objective == network.ring_load(T) == sol.z


def test_violation_ids():
    T = _random_demands(4, random.Random(1))
    sol = network.trivial_solution(4, 1, T)
    broken = DesignSolution(sol.arcs - {(0, 1)}, sol.flows)
    ids = {v.constraint_id.split("[")[0] for v in network.check(4, 1, T, broken).violations}
    assert ids == {"outdeg", "indeg", "arc"}
    leaky = dict(sol.flows)
    key = next(iter(leaky))
    leaky[key] += 1
    ids = {v.constraint_id.split("[")[0] for v in network.check(4, 1, T, DesignSolution(sol.arcs, leaky)).violations}
    assert ids == {"conserve"}


def test_stated_z_mismatch_is_a_warning():
    T = _random_demands(3, random.Random(2))
    sol = network.trivial_solution(3, 1, T)
    v = network.check(3, 1, T, DesignSolution(sol.arcs, sol.flows, sol.z + 1))
    assert v.feasible and v.warnings


def test_mip_decodes_to_checked_solution():
    T = _random_demands(3, random.Random(3))
    model, layout = network.build_mip(3, 1, T)
    out = solvers.milp_solve(model)
    v = network.check(3, 1, T, layout.decode(out.best_x))
    assert v.feasible and v.objective == out.best_energy


def test_complete_design_uniform_demand_hits_max():
    n = 4
    T = DemandMatrix(tuple(tuple(0 if i == j else 5 for j in range(n)) for i in range(n)))
    model, _ = network.build_mip(n, n - 1, T)
    assert solvers.milp_solve(model).best_energy == 5


def test_complete_design_can_split_single_demand():
    T = DemandMatrix(((0, 8, 0), (0, 0, 0), (0, 0, 0)))
    model, _ = network.build_mip(3, 2, T)
    assert solvers.milp_solve(model).best_energy == 4 < 8


def test_formats_round_trip():
    T = _random_demands(5, random.Random(4))
    assert network.read_demands(network.write_demands(T)) == T
    sol = network.trivial_solution(5, 2, T)
    assert network.read_solution(network.write_solution(sol)) == sol
    assert T.head(3).n == 3
    with pytest.raises(ValueError):
        DemandMatrix(((1, 0), (0, 0)))
