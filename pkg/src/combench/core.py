"""Shared result types, success counting, density classes and the submission report."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Union

Number = Union[int, Fraction]


class ObjectiveSense(enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"
    FEASIBILITY = "feasibility"


class Status(enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"


class Violation(NamedTuple):
    constraint_id: str
    detail: str
    magnitude: int = 1


@dataclass(frozen=True)
class Verdict:
    """Outcome of a feasibility check.

    ``info`` carries class-specific extras (for example the ASPL of a topology
    certificate) and ``warnings`` holds non-fatal findings.
    """

    status: Status
    objective: Optional[Number] = None
    violations: tuple[Violation, ...] = ()
    warnings: tuple[str, ...] = ()
    info: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(Violation(*v) for v in self.violations))
        object.__setattr__(self, "warnings", tuple(self.warnings))
        if (self.status is Status.FEASIBLE) != (not self.violations):
            raise ValueError("status must be Feasible exactly when there are no violations")
        if self.objective is not None and self.status is not Status.FEASIBLE:
            raise ValueError("infeasible verdicts carry no objective")

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE

    @classmethod
    def from_violations(cls, violations: Iterable, objective=None, sense=ObjectiveSense.MINIMIZE,
                        warnings: Iterable[str] = (), info=None) -> "Verdict":
        violations = tuple(violations)
        if violations:
            return cls(Status.INFEASIBLE, None, violations, tuple(warnings), info or {})
        if sense is ObjectiveSense.FEASIBILITY:
            objective = None
        return cls(Status.FEASIBLE, objective, (), tuple(warnings), info or {})

    def lines(self) -> list[str]:
        out = [f"STATUS {self.status.value}"]
        if self.objective is not None:
            out.append(f"OBJECTIVE {self.objective}")
        for v in self.violations:
            out.append(f"VIOLATION {v.constraint_id} {v.detail}")
        for w in self.warnings:
            out.append(f"WARNING {w}")
        return out


@dataclass(frozen=True)
class RunRecord:
    feasible: bool
    objective: Optional[Number] = None
    runtime_total_s: float = 0.0
    runtime_cpu_s: float = 0.0
    runtime_gpu_s: float = 0.0
    runtime_qpu_s: float = 0.0
    runtime_other_s: float = 0.0

    def __post_init__(self):
        if self.objective is not None and not self.feasible:
            raise ValueError("an infeasible run has no objective")
        for f in fields(self):
            if f.name.startswith("runtime") and getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")


@dataclass(frozen=True)
class SuccessPolicy:
    epsilon: Fraction = Fraction(0)
    sense: ObjectiveSense = ObjectiveSense.MINIMIZE

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")


def count_successes(runs: Iterable[RunRecord], policy: SuccessPolicy):
    """Return ``(n_feasible, n_successful, best)`` for a batch of runs.

    A feasible run succeeds when its objective lies within ``epsilon * |best|``
    of the best objective found (on the good side of it, per sense).
    Feasibility problems count every feasible run as successful.
    """
    feasible = [r for r in runs if r.feasible]
    if not feasible:
        return 0, 0, None
    if policy.sense is ObjectiveSense.FEASIBILITY:
        return len(feasible), len(feasible), None
    values = [Fraction(r.objective) for r in feasible]
    if policy.sense is ObjectiveSense.MINIMIZE:
        best = min(values)
        limit = best + policy.epsilon * abs(best)
        ok = sum(1 for v in values if v <= limit)
    else:
        best = max(values)
        limit = best - policy.epsilon * abs(best)
        ok = sum(1 for v in values if v >= limit)
    if best.denominator == 1:
        best = int(best)
    return len(feasible), ok, best


class DensityKind(enum.Enum):
    MIP_CONSTRAINT_MATRIX = "mip"
    QUBO_UPPER_TRIANGLE = "qubo"


class DensityClass(enum.Enum):
    SPARSE = "Sparse"
    DENSE = "Dense"


def density_classify(n_vars: int, n_constraints: int, n_nonzeros: int, kind: DensityKind) -> DensityClass:
    if n_vars < 1:
        raise ValueError("density needs at least one variable")
    if n_nonzeros == 0:
        return DensityClass.SPARSE
    if kind is DensityKind.MIP_CONSTRAINT_MATRIX:
        dense = 4 * n_nonzeros >= n_vars * n_constraints
    else:
        dense = 8 * n_nonzeros > n_vars * n_vars
    return DensityClass.DENSE if dense else DensityClass.SPARSE


@dataclass(frozen=True)
class ModelStats:
    n_vars: int
    n_constraints: int
    n_nonzeros: int
    coeff_min: Optional[int]
    coeff_max: Optional[int]
    density_class: DensityClass

    def __post_init__(self):
        if self.n_nonzeros > 0 and self.coeff_min > self.coeff_max:
            raise ValueError("coeff_min exceeds coeff_max")


# --- submission report -------------------------------------------------------

class AlgorithmType(enum.Enum):
    DETERMINISTIC = "deterministic"
    STOCHASTIC = "stochastic"


class ReportError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


NA = "N/A"
_MS = Decimal("0.001")


def _seconds(value) -> Optional[Decimal]:
    if value is None:
        return None
    d = value if isinstance(value, Decimal) else Decimal(str(value))
    if d.as_tuple().exponent < -3:
        d = d.quantize(_MS, rounding=ROUND_HALF_EVEN)
    return d


@dataclass(frozen=True)
class SubmissionReport:
    """One benchmark submission, fields in the canonical reporting order."""

    problem_id: str
    submitter: str
    date: str
    reference: str
    best_objective: Optional[Number]
    optimality_bound: Optional[Number]
    modeling_approach: str
    n_decision_vars: int
    n_binary_vars: int
    n_integer_vars: int
    n_continuous_vars: int
    n_nonzeros: int
    coefficient_type: str
    coefficient_range: Optional[tuple[int, int]]
    workflow: str
    algorithm_type: AlgorithmType
    n_runs: int
    n_feasible_runs: int
    n_successful_runs: int
    success_threshold: Fraction
    hardware: str
    runtime_total_s: Optional[Decimal]
    runtime_cpu_s: Optional[Decimal]
    runtime_gpu_s: Optional[Decimal]
    runtime_qpu_s: Optional[Decimal]
    runtime_other_s: Optional[Decimal]

    def __post_init__(self):
        for name in ("runtime_total_s", "runtime_cpu_s", "runtime_gpu_s", "runtime_qpu_s", "runtime_other_s"):
            v = _seconds(getattr(self, name))
            if v is not None and v < 0:
                raise ReportError(name, "runtime must be non-negative")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "success_threshold", Fraction(self.success_threshold))
        object.__setattr__(self, "algorithm_type", AlgorithmType(self.algorithm_type))
        if self.coefficient_range is not None:
            lo, hi = self.coefficient_range
            if lo > hi:
                raise ReportError("coefficient_range", "lower end exceeds upper end")
            object.__setattr__(self, "coefficient_range", (int(lo), int(hi)))
        for name in ("n_decision_vars", "n_binary_vars", "n_integer_vars", "n_continuous_vars",
                     "n_nonzeros", "n_runs", "n_feasible_runs", "n_successful_runs"):
            if getattr(self, name) < 0:
                raise ReportError(name, "count must be non-negative")
        if not self.n_successful_runs <= self.n_feasible_runs <= self.n_runs:
            raise ReportError("n_successful_runs", "need #successful <= #feasible <= #runs")
        if self.n_binary_vars + self.n_integer_vars + self.n_continuous_vars != self.n_decision_vars:
            raise ReportError("n_decision_vars", "variable type counts must sum to the total")
        if self.success_threshold < 0:
            raise ReportError("success_threshold", "epsilon must be non-negative")
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, str) and "\n" in v and f.name != "workflow":
                raise ReportError(f.name, "single-line field contains a newline")


_LABELS = {
    "problem_id": "Problem Identifier",
    "submitter": "Submitter",
    "date": "Date",
    "reference": "Reference",
    "best_objective": "Best Objective Value",
    "optimality_bound": "Optimality Bound",
    "modeling_approach": "Modeling Approach",
    "n_decision_vars": "#Decision Variables",
    "n_binary_vars": "#Binary Variables",
    "n_integer_vars": "#Integer Variables",
    "n_continuous_vars": "#Continuous Variables",
    "n_nonzeros": "#Non-Zero Coefficients",
    "coefficient_type": "Coefficients Type",
    "coefficient_range": "Coefficients Range",
    "workflow": "Workflow",
    "algorithm_type": "Algorithm Type",
    "n_runs": "#Runs",
    "n_feasible_runs": "#Feasible Runs",
    "n_successful_runs": "#Successful Runs",
    "success_threshold": "Success Threshold",
    "hardware": "Hardware Specifications",
    "runtime_total_s": "Total Runtime",
    "runtime_cpu_s": "CPU Runtime",
    "runtime_gpu_s": "GPU Runtime",
    "runtime_qpu_s": "QPU Runtime",
    "runtime_other_s": "Other HW Runtime",
}
_FIELDS_BY_LABEL = {v: k for k, v in _LABELS.items()}


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\n", "\\n").replace("\r", "\\r")


def _unescape(text: str) -> str:
    out, i = [], 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            out.append({"n": "\n", "r": "\r"}.get(text[i + 1], text[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _render_value(name: str, value) -> str:
    if value is None:
        return NA
    if name == "coefficient_range":
        return f"[{value[0]}, {value[1]}]"
    if name == "algorithm_type":
        return value.value
    if isinstance(value, Decimal):
        return f"{value}"
    if isinstance(value, str):
        return _escape(value)
    return str(value)


def render_report(report: SubmissionReport) -> str:
    # re-run validation in case the caller bypassed the constructor
    SubmissionReport(**{f.name: getattr(report, f.name) for f in fields(report)})
    lines = [f"{_LABELS[f.name]}: {_render_value(f.name, getattr(report, f.name))}" for f in fields(report)]
    return "\n".join(lines) + "\n"


def _parse_number(text: str) -> Number:
    value = Fraction(text)
    return int(value) if value.denominator == 1 else value


def parse_report(text: str) -> SubmissionReport:
    raw: dict[str, str] = {}
    # rendered values never hold a raw CR, so one left at a line end is a CRLF file
    for lineno, line in enumerate(text.split("\n"), 1):
        line = line.removesuffix("\r")
        if not line.strip():
            continue
        label, sep, value = line.partition(": ")
        if not sep or label not in _FIELDS_BY_LABEL:
            raise ReportError(f"line {lineno}", f"unrecognised report line {line!r}")
        raw[_FIELDS_BY_LABEL[label]] = value
    missing = [k for k in _LABELS if k not in raw]
    if missing:
        raise ReportError(missing[0], "field missing")
    kwargs: dict[str, object] = {}
    for f in fields(SubmissionReport):
        name, value = f.name, raw[f.name]
        try:
            if value == NA and name in ("best_objective", "optimality_bound", "coefficient_range") \
                    or value == NA and name.startswith("runtime"):
                kwargs[name] = None
            elif name in ("best_objective", "optimality_bound"):
                kwargs[name] = _parse_number(value)
            elif name == "coefficient_range":
                lo, hi = value.strip("[]").split(",")
                kwargs[name] = (int(lo), int(hi))
            elif name == "algorithm_type":
                kwargs[name] = AlgorithmType(value)
            elif name == "success_threshold":
                kwargs[name] = Fraction(value)
            elif name.startswith("runtime"):
                kwargs[name] = Decimal(value)
            elif name.startswith("n_"):
                kwargs[name] = int(value)
            else:
                kwargs[name] = _unescape(value)
        except (ValueError, InvalidOperation, ZeroDivisionError) as exc:
            raise ReportError(name, f"cannot parse {value!r}") from exc
    return SubmissionReport(**kwargs)


def average_runtimes(runs: Iterable[RunRecord]) -> dict[str, Decimal]:
    """Mean of each runtime category over the runs, rounded to milliseconds."""
    runs = list(runs)
    names = ("runtime_total_s", "runtime_cpu_s", "runtime_gpu_s", "runtime_qpu_s", "runtime_other_s")
    if not runs:
        return {n: Decimal("0") for n in names}
    return {n: _seconds(sum(Decimal(str(getattr(r, n))) for r in runs) / len(runs)) for n in names}
