import dataclasses
import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from combench import portfolio


@pytest.fixture(scope="module")
def small():
    return portfolio.generate(2, 3, seed=1, k=1, B=2, C=3)


def test_all_cash_objective():
    inst = portfolio.generate(3, 4, seed=0)
    v = portfolio.evaluate(inst, portfolio.PortfolioSolution.all_cash(inst))
    assert v.feasible and v.objective == -inst.nu * inst.u * inst.C * inst.m


@pytest.mark.parametrize("n,m,count", [(10, 10, 640), (50, 15, 4560)])
def test_variable_counts(n, m, count):
    inst = portfolio.generate(n, m, seed=0)
    assert inst.m * (inst.n_slots + inst.n_cash_bits) == count


def _random_solution(inst, rng):
    x = [[rng.randint(0, 1) for _ in range(inst.m)] for _ in range(inst.n_slots)]
    y = [[rng.randint(0, 1) for _ in range(inst.m)] for _ in range(inst.n_cash_bits)]
    return portfolio.PortfolioSolution(x, y)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_model_matches_evaluator_on_random_points(seed, full_range):
    inst = portfolio.generate(3, 3, seed=seed % 17, k=2, B=3, C=5)
    model = portfolio.build_bqp(inst, full_range)
    sol = _random_solution(inst, random.Random(seed))
    vec = portfolio.solution_to_vector(inst, sol)
    assert portfolio.solution_from_vector(inst, vec) == sol
    value = portfolio.objective_value(inst, sol, full_range)
    assert Fraction(model.evaluate(vec), model.objective_scale) == value
    assert model.is_feasible(vec) == portfolio.evaluate(inst, sol).feasible


def test_transaction_cost_is_monotone_in_delta(small):
    rng = random.Random(3)
    for _ in range(50):
        sol = _random_solution(small, rng)
        lo = portfolio.objective_value(small, sol)
        hi = portfolio.objective_value(dataclasses.replace(small, delta=small.delta * 3), sol)
        trades = any(sol.x[e][0] or sol.x[e][-1] for e in range(small.n_slots))
        assert hi >= lo and (hi > lo or not trades)


def test_constraint_ids(small):
    x = [[1] * small.m for _ in range(small.n_slots)]
    y = [[0] * small.m for _ in range(small.n_cash_bits)]
    ids = {v.constraint_id for v in portfolio.evaluate(small, portfolio.PortfolioSolution(x, y)).violations}
    assert ids == {f"{kind}[{t}]" for kind in ("cash", "assets") for t in range(1, small.m + 1)}


def test_generator_properties():
    inst = portfolio.generate(6, 5, seed=2)
    assert inst == portfolio.generate(6, 5, seed=2)
    assert all(p > 0 for r in inst.prices for p in r)
    assert inst.prices[0][0] == inst.u
    assert min(inst.min_eigenvalues()) > -inst.n * 1e-8


def test_text_round_trip():
    inst = portfolio.generate(4, 3, seed=5)
    assert portfolio.read_instance(portfolio.write_instance(inst)) == inst
    sol = _random_solution(inst, random.Random(1))
    assert portfolio.read_solution(portfolio.write_solution(sol)) == sol


def test_dimension_errors(small):
    with pytest.raises(ValueError):
        portfolio.evaluate(small, portfolio.PortfolioSolution(((0,),), ((0,),)))
    with pytest.raises(ValueError):
        portfolio.PortfolioSolution(((2,),), ())


def test_exhaustive_tiny_instance_agrees():
    inst = portfolio.generate(2, 2, seed=4, k=1, B=1, C=1)
    model = portfolio.build_bqp(inst)
    for bits in itertools.product((0, 1), repeat=model.n):
        v = portfolio.evaluate(inst, portfolio.solution_from_vector(inst, bits))
        assert Fraction(model.evaluate(bits), model.objective_scale) == v.info["objective"]
