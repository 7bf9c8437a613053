from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from combench.core import (DensityClass, DensityKind, ObjectiveSense, ReportError, RunRecord, Status,
                           SubmissionReport, SuccessPolicy, Verdict, Violation, average_runtimes,
                           count_successes, density_classify, parse_report, render_report)


def test_verdict_status_tracks_violations():
    assert Verdict.from_violations([], objective=3).feasible
    v = Verdict.from_violations([Violation("c", "bad")], objective=3)
    assert v.status is Status.INFEASIBLE and v.objective is None
    with pytest.raises(ValueError):
        Verdict(Status.FEASIBLE, 1, (Violation("c", "x"),))


def test_feasibility_sense_drops_objective():
    v = Verdict.from_violations([], objective=5, sense=ObjectiveSense.FEASIBILITY)
    assert v.objective is None and v.lines() == ["STATUS Feasible"]


def test_runrecord_rejects_negative_time():
    with pytest.raises(ValueError):
        RunRecord(True, 1, runtime_cpu_s=-0.1)
    with pytest.raises(ValueError):
        RunRecord(False, 3)


@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=30),
       st.fractions(min_value=0, max_value=2), st.sampled_from([ObjectiveSense.MINIMIZE, ObjectiveSense.MAXIMIZE]))
def test_success_count_bounds(values, eps, sense):
    runs = [RunRecord(True, v) for v in values] + [RunRecord(False)]
    n_feas, n_ok, best = count_successes(runs, SuccessPolicy(eps, sense))
    assert n_feas == len(values)
    assert 1 <= n_ok <= n_feas
    assert best == (min(values) if sense is ObjectiveSense.MINIMIZE else max(values))


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=10))
def test_success_count_monotone_in_epsilon(values):
    runs = [RunRecord(True, v) for v in values]
    counts = [count_successes(runs, SuccessPolicy(Fraction(e, 10)))[1] for e in range(0, 30, 3)]
    assert counts == sorted(counts)


def test_success_feasibility_counts_all_feasible():
    runs = [RunRecord(True), RunRecord(False), RunRecord(True)]
    assert count_successes(runs, SuccessPolicy(0, ObjectiveSense.FEASIBILITY)) == (2, 2, None)
    assert count_successes([], SuccessPolicy()) == (0, 0, None)


def test_density_thresholds():
    assert density_classify(10, 10, 25, DensityKind.MIP_CONSTRAINT_MATRIX) is DensityClass.DENSE
    assert density_classify(10, 10, 24, DensityKind.MIP_CONSTRAINT_MATRIX) is DensityClass.SPARSE
    assert density_classify(8, 0, 9, DensityKind.QUBO_UPPER_TRIANGLE) is DensityClass.DENSE
    assert density_classify(8, 0, 8, DensityKind.QUBO_UPPER_TRIANGLE) is DensityClass.SPARSE
    with pytest.raises(ValueError):
        density_classify(0, 0, 0, DensityKind.QUBO_UPPER_TRIANGLE)


def _report(**over):
    base = dict(problem_id="LABS-20", submitter="someone", date="2025-01-01", reference="n/a",
                best_objective=26, optimality_bound=None, modeling_approach="HUBO", n_decision_vars=20,
                n_binary_vars=20, n_integer_vars=0, n_continuous_vars=0, n_nonzeros=100,
                coefficient_type="integer", coefficient_range=(1, 8), workflow="step one\nstep two",
                algorithm_type="stochastic", n_runs=10, n_feasible_runs=10, n_successful_runs=3,
                success_threshold=0, hardware="laptop", runtime_total_s=61.22, runtime_cpu_s=0.42,
                runtime_gpu_s=None, runtime_qpu_s=60.80, runtime_other_s=None)
    base.update(over)
    return SubmissionReport(**base)


def test_report_round_trip_and_runtime_fields():
    r = _report()
    text = render_report(r)
    assert "Total Runtime: 61.22" in text and "CPU Runtime: 0.42" in text and "QPU Runtime: 60.8" in text
    assert parse_report(text) == r


@given(st.decimals(min_value=0, max_value=10**6, places=5, allow_nan=False),
       st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=30))
def test_report_round_trip_property(total, workflow):
    r = _report(runtime_total_s=total, workflow=workflow)
    assert parse_report(render_report(r)) == r


def test_report_validation_errors():
    with pytest.raises(ReportError):
        _report(n_successful_runs=11)
    with pytest.raises(ReportError):
        _report(n_binary_vars=3)
    with pytest.raises(ReportError):
        _report(runtime_cpu_s=-1)
    with pytest.raises(ReportError):
        parse_report("Problem Identifier: x\n")


def test_average_runtimes_rounds_to_ms():
    runs = [RunRecord(True, 1, 1.0004), RunRecord(True, 1, 2.0)]
    assert average_runtimes(runs)["runtime_total_s"] == Decimal("1.500")


def test_report_accepts_crlf_files():
    r = _report(workflow="a\rb")
    assert parse_report(render_report(r).replace("\n", "\r\n")) == r
