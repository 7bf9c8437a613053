import pytest
from hypothesis import given, settings, strategies as st

from combench import marketsplit, solvers


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(10, 300), st.integers(0, 10**6))
def test_generated_instance_shape_and_witness(m, D, seed):
    inst = marketsplit.generate(m, D, seed)
    assert inst.m == m and inst.n == 10 * (m - 1)
    assert all(0 <= v <= D - 1 for row in inst.A for v in row)
    x = marketsplit.planted_solution(inst)
    assert marketsplit.check(inst, x).feasible
    assert marketsplit.planted_digest(x) == inst.provenance.digest


def test_generation_is_deterministic():
    assert marketsplit.generate(3, 100, 5) == marketsplit.generate(3, 100, 5)


def test_check_reports_rows_with_slack():
    inst = marketsplit.generate(3, 50, 1)
    x = list(marketsplit.planted_solution(inst))
    x[0] ^= 1
    v = marketsplit.check(inst, x)
    assert not v.feasible and v.violations


def test_text_round_trip_keeps_provenance():
    inst = marketsplit.generate(3, 100, 2)
    back = marketsplit.read_instance(marketsplit.write_instance(inst))
    assert back == inst and marketsplit.planted_solution(back) == marketsplit.planted_solution(inst)


@pytest.mark.parametrize("norm", list(marketsplit.Norm))
def test_objective_zero_exactly_at_solutions(norm):
    inst = marketsplit.generate(2, 30, 3)
    model = marketsplit.to_objective(inst, norm)
    best = solvers.brute_force(model)
    assert best.best_energy == 0
    assert marketsplit.check(inst, best.best_x[:inst.n]).feasible
