"""Reference solvers: exhaustive enumeration, Schroeppel-Shamir for subset-sum
systems, greedy bit-flip sweeps and a seeded simulated annealer."""
from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .core import ObjectiveSense
from .model import Hubo, Model, VarKind

_CHUNK = 1 << 16
_INT64_SAFE = 1 << 62


class NoFeasiblePoint(RuntimeError):
    pass


@dataclass(frozen=True)
class SolveOutcome:
    best_x: tuple[int, ...]
    best_energy: int
    evaluations: int
    elapsed_s: float


@dataclass(frozen=True)
class AnnealSchedule:
    sweeps: int = 1000
    beta_start: float = 0.1
    beta_end: float = 10.0
    restarts: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.sweeps < 1:
            raise ValueError("at least one sweep")
        if not 0 < self.beta_start <= self.beta_end:
            raise ValueError("need 0 < beta_start <= beta_end")
        if math.isinf(self.beta_end) and not math.isinf(self.beta_start):
            raise ValueError("an infinite beta_end needs an infinite beta_start")
        if self.restarts < 1:
            raise ValueError("at least one restart")

    def betas(self) -> list[float]:
        if self.sweeps == 1 or self.beta_start == self.beta_end:
            return [self.beta_start] * self.sweeps
        r = (self.beta_end / self.beta_start) ** (1 / (self.sweeps - 1))
        return [self.beta_start * r ** s for s in range(self.sweeps)]


# --- exhaustive enumeration --------------------------------------------------

def _digits(start: int, stop: int, radices: Sequence[int]) -> np.ndarray:
    """Rows of mixed-radix digits for counters start..stop-1, first digit most significant."""
    r = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, len(radices)), dtype=np.int64)
    for i in range(len(radices) - 1, -1, -1):
        out[:, i] = r % radices[i]
        r //= radices[i]
    return out


def _monomial_values(terms, X: np.ndarray) -> np.ndarray:
    total = np.zeros(X.shape[0], dtype=X.dtype)
    for mono, c in terms:
        if not mono:
            total += c
            continue
        prod = X[:, mono[0]].copy()
        for i in mono[1:]:
            prod *= X[:, i]
        total += c * prod
    return total


def _better(sign: int, a, b) -> bool:
    return a * sign < b * sign


def _bound(terms, lows, highs) -> int:
    total = 0
    for mono, c in terms:
        mag = abs(c)
        for i in mono:
            mag *= max(abs(lows[i]), abs(highs[i]))
        total += mag
    return total


def brute_force(problem: Union[Hubo, Model], limit: int = 24) -> SolveOutcome:
    """Exact optimum by enumeration; ties go to the lexicographically first vector.

    For a Model, the full integer box is enumerated when it holds at most
    2**limit points. Otherwise the binary part is enumerated and the remaining
    integer variables (which must then enter linearly) are solved exactly per
    binary assignment with an integer-programming call.
    """
    t0 = time.perf_counter()
    if isinstance(problem, Hubo):
        if problem.n > limit:
            raise ValueError(f"{problem.n} variables exceed the enumeration limit {limit}")
        lows, highs = [0] * problem.n, [1] * problem.n
        terms = [(m, c) for m, c in problem.terms.items()]
        terms.append(((), problem.offset))
        sign = problem.cost_sign()
        constraints = ()
    else:
        lows = [v.lower for v in problem.variables]
        highs = [v.upper for v in problem.variables]
        if any(v is None for v in lows + highs):
            raise ValueError("enumeration needs bounded variables")
        box = math.prod(h - l + 1 for l, h in zip(lows, highs))
        if box > (1 << limit):
            n_bin = sum(v.is_binary for v in problem.variables)
            if n_bin < problem.n and n_bin <= limit:
                return _hybrid(problem, t0)
            raise ValueError(f"search box of {box} points exceeds 2**{limit}")
        terms = list(problem.objective.terms.items())
        sign = -1 if problem.sense is ObjectiveSense.MAXIMIZE else 1
        constraints = problem.constraints
    n = len(lows)
    radices = [h - l + 1 for l, h in zip(lows, highs)]
    total = math.prod(radices)
    big = _bound(terms, lows, highs) >= _INT64_SAFE or any(
        _bound([((i,), a) for i, a in c.coeffs.items()], lows, highs) + abs(c.rhs) >= _INT64_SAFE
        for c in constraints)
    dtype = object if big else np.int64
    low_arr = np.array(lows, dtype=np.int64)
    if constraints:
        A = np.zeros((len(constraints), n), dtype=np.int64)
        for k, c in enumerate(constraints):
            for i, a in c.coeffs.items():
                A[k, i] = a
        A = A.astype(dtype)
        rhs = np.array([c.rhs for c in constraints], dtype=dtype)
        rel = [c.relation.value for c in constraints]
    best_val, best_x = None, None
    for start in range(0, total, _CHUNK):
        stop = min(total, start + _CHUNK)
        X = (_digits(start, stop, radices) + low_arr).astype(dtype)
        vals = _monomial_values(terms, X)
        if constraints:
            act = X @ A.T
            ok = np.ones(stop - start, dtype=bool)
            for k, r in enumerate(rel):
                col = act[:, k]
                ok &= (col == rhs[k]) if r == "=" else (col <= rhs[k]) if r == "<=" else (col >= rhs[k])
            idx = np.flatnonzero(ok)
            if idx.size == 0:
                continue
        else:
            idx = np.arange(stop - start)
        sub = vals[idx] * sign
        j = idx[int(np.argmin(sub))]
        v = int(vals[j])
        if best_val is None or _better(sign, v, best_val):
            best_val, best_x = v, tuple(int(t) for t in X[j])
    if best_x is None:
        raise NoFeasiblePoint("no feasible assignment in the box")
    return SolveOutcome(best_x, best_val, total, time.perf_counter() - t0)


def _hybrid(model: Model, t0: float) -> SolveOutcome:
    from scipy.optimize import Bounds, LinearConstraint as SciLC, milp

    bins = [i for i, v in enumerate(model.variables) if v.is_binary]
    ints = [i for i, v in enumerate(model.variables) if v.kind is VarKind.INTEGER]
    pos = {i: k for k, i in enumerate(ints)}
    bin_set = set(bins)
    for mono in model.objective.terms:
        if sum(i in pos for i in mono) > 1:
            raise ValueError("integer variables must enter the objective linearly")
    sign = -1 if model.sense is ObjectiveSense.MAXIMIZE else 1
    pure = [c for c in model.constraints if set(c.coeffs) <= bin_set]
    mixed = [c for c in model.constraints if not set(c.coeffs) <= bin_set]
    lb = np.array([model.variables[i].lower for i in ints], dtype=float)
    ub = np.array([model.variables[i].upper for i in ints], dtype=float)
    best_val, best_x, evals = None, None, 0
    for r in range(1 << len(bins)):
        xb = [(r >> (len(bins) - 1 - k)) & 1 for k in range(len(bins))]
        x = [0] * model.n
        for i, b in zip(bins, xb):
            x[i] = b
        if any(c.excess(x) for c in pure):
            continue
        evals += 1
        cvec = np.zeros(len(ints))
        const = 0
        for mono, coef in model.objective.terms.items():
            w = coef
            var = None
            for i in mono:
                if i in pos:
                    var = i
                else:
                    w *= x[i]
            if not w:
                continue
            if var is None:
                const += w
            else:
                cvec[pos[var]] += w
        rows, lo, hi = [], [], []
        feasible = True
        for c in mixed:
            row = np.zeros(len(ints))
            rest = 0
            for i, a in c.coeffs.items():
                if i in pos:
                    row[pos[i]] += a
                else:
                    rest += a * x[i]
            b = c.rhs - rest
            if not row.any():
                if c.relation.value == "=" and b != 0 or c.relation.value == "<=" and b < 0 \
                        or c.relation.value == ">=" and b > 0:
                    feasible = False
                    break
                continue
            rows.append(row)
            lo.append(b if c.relation.value in ("=", ">=") else -np.inf)
            hi.append(b if c.relation.value in ("=", "<=") else np.inf)
        if not feasible:
            continue
        cons = [SciLC(np.array(rows), np.array(lo), np.array(hi))] if rows else []
        res = milp(sign * cvec, integrality=np.ones(len(ints)), bounds=Bounds(lb, ub), constraints=cons)
        if res.status != 0:
            continue
        for i, v in zip(ints, res.x):
            x[i] = int(round(v))
        if model.violations(x):
            raise RuntimeError("integer sub-solve returned an infeasible point")
        val = model.evaluate(x)
        if best_val is None or _better(sign, val, best_val):
            best_val, best_x = val, tuple(x)
    if best_x is None:
        raise NoFeasiblePoint("no feasible assignment")
    return SolveOutcome(best_x, best_val, evals, time.perf_counter() - t0)


def milp_solve(model: Model, time_limit_s: Optional[float] = None) -> SolveOutcome:
    """Solve a linear-objective model with HiGHS and re-verify the answer exactly.

    With a time limit the incumbent is returned even if optimality is unproven.
    """
    from scipy.optimize import Bounds, LinearConstraint as SciLC, milp

    t0 = time.perf_counter()
    if model.objective.degree() > 1:
        raise ValueError("milp_solve handles linear objectives only")
    n = model.n
    sign = -1 if model.sense is ObjectiveSense.MAXIMIZE else 1
    c = np.zeros(n)
    for mono, coef in model.objective.terms.items():
        if mono:
            c[mono[0]] += coef
    A = np.zeros((len(model.constraints), n))
    lo, hi = [], []
    for k, con in enumerate(model.constraints):
        for i, a in con.coeffs.items():
            A[k, i] = a
        lo.append(con.rhs if con.relation.value in ("=", ">=") else -np.inf)
        hi.append(con.rhs if con.relation.value in ("=", "<=") else np.inf)
    lb = [v.lower if v.lower is not None else -np.inf for v in model.variables]
    ub = [v.upper if v.upper is not None else np.inf for v in model.variables]
    cons = [SciLC(A, np.array(lo), np.array(hi))] if model.constraints else []
    options = {"time_limit": time_limit_s} if time_limit_s is not None else {}
    res = milp(sign * c, integrality=np.ones(n), bounds=Bounds(lb, ub), constraints=cons, options=options)
    if res.x is None:
        raise NoFeasiblePoint(f"solver status {res.status}: {res.message}")
    x = tuple(int(round(v)) for v in res.x)
    if model.violations(x):
        raise RuntimeError("solver point fails exact verification")
    return SolveOutcome(x, model.evaluate(x), 1, time.perf_counter() - t0)


# --- subset-sum systems ------------------------------------------------------

def _quarter_sums(keys: Sequence[int], offset: int) -> list[tuple[int, int]]:
    sums = [(0, 0)]
    for k, key in enumerate(keys):
        bit = 1 << (offset + k)
        sums += [(s + key, m | bit) for s, m in sums]
    sums.sort()
    return sums


def _pair_stream(a: list, b: list, descending: bool):
    """Yield (key, mask) over all a[i] + b[j] in sorted order with a small heap."""
    if descending:
        heap = [(-(a[i][0] + b[-1][0]), i, len(b) - 1) for i in range(len(a))]
    else:
        heap = [(a[i][0] + b[0][0], i, 0) for i in range(len(a))]
    heapq.heapify(heap)
    step = -1 if descending else 1
    while heap:
        key, i, j = heapq.heappop(heap)
        yield (-key if descending else key), a[i][1] | b[j][1]
        j2 = j + step
        if 0 <= j2 < len(b):
            nk = a[i][0] + b[j2][0]
            heapq.heappush(heap, (-nk if descending else nk, i, j2))


def meet_in_middle(instance, mode: str = "all", max_n: int = 60) -> list[tuple[int, ...]]:
    """All (or the first) binary x with A x = b, by Schroeppel-Shamir enumeration.

    Rows are packed into one integer per column using a radix wider than any
    row's range, which turns the system into a single subset-sum target.
    """
    A = [list(map(int, row)) for row in instance.A]
    b = [int(v) for v in instance.b]
    m = len(A)
    n = len(A[0]) if m else 0
    if n > max_n:
        raise ValueError(f"n={n} exceeds the enumeration bound {max_n}")
    if mode not in ("first", "all"):
        raise ValueError("mode must be 'first' or 'all'")
    spans = [sum(abs(v) for v in row) for row in A]
    radix = max(spans, default=0) + 1
    col = [sum(A[i][j] * radix ** i for i in range(m)) for j in range(n)]
    target = sum(b[i] * radix ** i for i in range(m))
    cuts = [round(n * k / 4) for k in range(5)]
    quarters = [_quarter_sums(col[cuts[k]:cuts[k + 1]], cuts[k]) for k in range(4)]
    left = _pair_stream(quarters[0], quarters[1], descending=False)
    right = _pair_stream(quarters[2], quarters[3], descending=True)
    found: list[int] = []
    lv = next(left, None)
    rv = next(right, None)
    while lv is not None and rv is not None:
        s = lv[0] + rv[0]
        if s < target:
            lv = next(left, None)
        elif s > target:
            rv = next(right, None)
        else:
            lkey, rkey = lv[0], rv[0]
            lgroup, rgroup = [], []
            while lv is not None and lv[0] == lkey:
                lgroup.append(lv[1])
                lv = next(left, None)
            while rv is not None and rv[0] == rkey:
                rgroup.append(rv[1])
                rv = next(right, None)
            for lm in lgroup:
                for rm in rgroup:
                    found.append(lm | rm)
                    if mode == "first":
                        return [_mask_vector(lm | rm, n)]
    return sorted(_mask_vector(mk, n) for mk in found)


def _mask_vector(mask: int, n: int) -> tuple[int, ...]:
    return tuple((mask >> j) & 1 for j in range(n))


# --- local search --------------------------------------------------------------

class _FlipTable:
    """Per-variable term lists for fast single-flip energy deltas."""

    def __init__(self, q: Hubo):
        self.n = q.n
        self.by_var: list[list[tuple[tuple[int, ...], int]]] = [[] for _ in range(q.n)]
        for mono, c in q.terms.items():
            for i in mono:
                others = tuple(j for j in mono if j != i)
                self.by_var[i].append((others, c))

    def delta(self, x: list[int], i: int) -> int:
        s = 0
        for others, c in self.by_var[i]:
            for j in others:
                if not x[j]:
                    break
            else:
                s += c
        return s if x[i] == 0 else -s


def local_sweeps(q: Hubo, x0: Sequence[int], n_s: int) -> SolveOutcome:
    """Greedy passes in ascending index order, flipping only on strict improvement."""
    if len(x0) != q.n:
        raise ValueError(f"expected {q.n} bits, got {len(x0)}")
    t0 = time.perf_counter()
    table = _FlipTable(q)
    sign = q.cost_sign()
    x = [int(v) for v in x0]
    evals = 0
    for _ in range(n_s):
        flipped = False
        for i in range(q.n):
            evals += 1
            if sign * table.delta(x, i) < 0:
                x[i] ^= 1
                flipped = True
        if not flipped:
            break
    return SolveOutcome(tuple(x), q.energy(x), evals, time.perf_counter() - t0)


def _sweep_rng(seed: int, restart: int, sweep: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed & ((1 << 64) - 1), spawn_key=(restart, sweep))
    return np.random.Generator(np.random.Philox(ss))


def simulated_annealing(q: Hubo, schedule: AnnealSchedule, x0: Optional[Sequence[int]] = None) -> SolveOutcome:
    """Metropolis single-flip annealing, best state over all restarts.

    Random numbers for sweep s of restart r come from a generator keyed by
    (seed, r, s), so restarts can run in any order or in parallel.
    """
    t0 = time.perf_counter()
    table = _FlipTable(q)
    sign = q.cost_sign()
    betas = schedule.betas()
    best_x, best_e, evals = None, None, 0
    for restart in range(schedule.restarts):
        if x0 is not None:
            x = [int(v) for v in x0]
        else:
            x = [int(v) for v in _sweep_rng(schedule.seed, restart, 0).integers(0, 2, q.n)]
        e = q.energy(x)
        if best_e is None or sign * e < sign * best_e:
            best_x, best_e = tuple(x), e
        for s, beta in enumerate(betas):
            u = _sweep_rng(schedule.seed, restart, s + 1).random(q.n)
            for i in range(q.n):
                evals += 1
                d = table.delta(x, i)
                cost = sign * d
                if cost < 0 or (cost == 0 and not math.isinf(beta)) or (
                        not math.isinf(beta) and u[i] < math.exp(-beta * cost)):
                    x[i] ^= 1
                    e += d
                    if sign * e < sign * best_e:
                        best_x, best_e = tuple(x), e
    return SolveOutcome(best_x, best_e, evals, time.perf_counter() - t0)
