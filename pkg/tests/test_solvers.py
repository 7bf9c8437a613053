import itertools

import pytest
from hypothesis import given, settings, strategies as st

from combench import marketsplit, solvers
from combench.core import ObjectiveSense
from combench.model import LinearConstraint, Model, Polynomial, Qubo, Relation, VariableSpec

@st.composite
def qubos(draw):
    n = draw(st.integers(1, 8))
    terms = {(i,): draw(st.integers(-9, 9)) for i in range(n)}
    for i, j in itertools.combinations(range(n), 2):
        if draw(st.booleans()):
            terms[(i, j)] = draw(st.integers(-9, 9))
    sense = draw(st.sampled_from([ObjectiveSense.MINIMIZE, ObjectiveSense.MAXIMIZE]))
    return Qubo(n, terms, draw(st.integers(-5, 5)), sense)


def _naive(q):
    vals = [(q.energy(x), x) for x in itertools.product((0, 1), repeat=q.n)]
    return (min if q.sense is ObjectiveSense.MINIMIZE else max)(v for v, _ in vals)


@given(qubos())
def test_brute_force_matches_naive(q):
    out = solvers.brute_force(q)
    assert out.best_energy == _naive(q) == q.energy(out.best_x)


def test_brute_force_tie_breaks_lexicographically():
    assert solvers.brute_force(Qubo(3, {})).best_x == (0, 0, 0)


def test_brute_force_model_with_integers_and_constraints():
    model = Model(ObjectiveSense.MAXIMIZE, [VariableSpec.integer(-2, 4), VariableSpec.binary()],
                  Polynomial({(0,): 3, (0, 1): -5}), [LinearConstraint({0: 1, 1: 1}, Relation.LE, 3)])
    out = solvers.brute_force(model)
    assert out.best_energy == 9 and out.best_x == (3, 0)


def test_brute_force_infeasible_model():
    model = Model(ObjectiveSense.MINIMIZE, [VariableSpec.binary()], constraints=[LinearConstraint({0: 1}, Relation.EQ, 2)])
    with pytest.raises(solvers.NoFeasiblePoint):
        solvers.brute_force(model)


def test_hybrid_agrees_with_milp():
    variables = [VariableSpec.binary()] * 3 + [VariableSpec.integer(0, 10**6)]
    model = Model(ObjectiveSense.MINIMIZE, variables, Polynomial({(3,): 1, (0,): 4, (1,): 2}),
                  [LinearConstraint({0: 5, 1: 3, 2: 1, 3: 1}, Relation.GE, 7)])
    assert solvers.brute_force(model).best_energy == solvers.milp_solve(model).best_energy == 5


@settings(max_examples=30, deadline=None)
@given(qubos())
def test_local_sweeps_never_worsens(q):
    x0 = [i % 2 for i in range(q.n)]
    out = solvers.local_sweeps(q, x0, 5)
    assert q.cost_sign() * out.best_energy <= q.cost_sign() * q.energy(x0)


def test_zero_temperature_anneal_is_greedy():
    q = Qubo(4, {(0,): -1, (1,): 2, (0, 1): -4, (2, 3): -1})
    sched = solvers.AnnealSchedule(sweeps=3, beta_start=float("inf"), beta_end=float("inf"))
    x0 = (0, 1, 0, 1)
    assert solvers.simulated_annealing(q, sched, x0).best_x == solvers.local_sweeps(q, x0, 3).best_x


def test_anneal_finds_small_optimum_and_is_reproducible():
    q = Qubo(6, {**{(i,): (-1) ** i * 3 for i in range(6)}, (0, 5): -7, (2, 3): 4})
    sched = solvers.AnnealSchedule(sweeps=200, restarts=3, seed=42)
    a, b = solvers.simulated_annealing(q, sched), solvers.simulated_annealing(q, sched)
    assert a.best_x == b.best_x and a.best_energy == solvers.brute_force(q).best_energy


def test_schedule_validation():
    with pytest.raises(ValueError):
        solvers.AnnealSchedule(sweeps=0)
    with pytest.raises(ValueError):
        solvers.AnnealSchedule(beta_start=1.0, beta_end=float("inf"))


@pytest.mark.parametrize("seed", range(5))
def test_meet_in_middle_all_matches_enumeration(seed):
    inst = marketsplit.generate(2, 20, seed)
    found = set(solvers.meet_in_middle(inst, mode="all"))
    naive = {x for x in itertools.product((0, 1), repeat=inst.n) if marketsplit.check(inst, x).feasible}
    assert found == naive and marketsplit.planted_solution(inst) in found


def test_meet_in_middle_rejects_large_n():
    inst = marketsplit.generate(2, 20, 0)
    with pytest.raises(ValueError):
        solvers.meet_in_middle(inst, max_n=5)
