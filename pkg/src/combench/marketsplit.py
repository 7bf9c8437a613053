"""Market split instances: A x = b over binary x with a planted solution."""
from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import ObjectiveSense, Verdict, Violation
from .model import LinearConstraint, Model, Polynomial, Relation, VariableSpec


@dataclass(frozen=True)
class Provenance:
    seed: int
    D: int
    attempt: int
    digest: str


@dataclass(frozen=True)
class MarketSplitInstance:
    A: tuple[tuple[int, ...], ...]
    b: tuple[int, ...]
    provenance: Optional[Provenance] = None

    def __post_init__(self):
        A = tuple(tuple(int(v) for v in row) for row in self.A)
        b = tuple(int(v) for v in self.b)
        if not A or len(b) != len(A) or len({len(r) for r in A}) != 1:
            raise ValueError("A must be a non-empty m x n matrix with len(b) = m")
        if any(v < 0 for r in A for v in r):
            raise ValueError("entries of A must be non-negative")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return len(self.A)

    @property
    def n(self) -> int:
        return len(self.A[0])

    def slacks(self, x: Sequence[int]) -> list[int]:
        if len(x) != self.n:
            raise ValueError(f"expected {self.n} entries, got {len(x)}")
        return [bi - sum(a * v for a, v in zip(row, x)) for row, bi in zip(self.A, self.b)]


def planted_digest(x: Sequence[int]) -> str:
    return hashlib.sha256("".join(map(str, x)).encode()).hexdigest()[:16]


def _repair_by_swaps(row: np.ndarray, x: np.ndarray, target: int) -> int:
    """Swap entries between a zero and a one position while |slack| shrinks."""
    ones = np.flatnonzero(x == 1)
    zeros = np.flatnonzero(x == 0)
    while True:
        slack = target - int(row[ones].sum())
        if slack == 0 or not len(ones) or not len(zeros):
            return slack
        # swapping a[j0] <-> a[j1] changes A x by a[j0] - a[j1]
        gain = row[zeros][:, None] - row[ones][None, :]
        after = np.abs(slack - gain)
        k = int(np.argmin(after))
        if after.flat[k] >= abs(slack):
            return slack
        z, o = divmod(k, len(ones))
        j0, j1 = zeros[z], ones[o]
        row[j0], row[j1] = row[j1], row[j0]


def _spread_slack(row, x, slack, D, rng, tries=20) -> bool:
    ones = np.flatnonzero(x == 1)
    zeros = np.flatnonzero(x == 0)
    pairs_all = len(ones) * len(zeros)
    if not pairs_all:
        return False
    c = min(max(1, (3 * len(ones)) // 2), pairs_all)
    base, extra = divmod(abs(slack), c)
    sign = 1 if slack > 0 else -1
    for _ in range(tries):
        picks = rng.choice(pairs_all, size=c, replace=False)
        trial = row.copy()
        for p, k in enumerate(picks):
            q = sign * (base + (1 if p < extra else 0))
            z, o = divmod(int(k), len(ones))
            trial[ones[o]] += q
            trial[zeros[z]] -= q
        if trial.min() >= 0 and trial.max() <= D - 1:
            row[:] = trial
            return True
    return False


def generate(m: int, D: int = 100, seed: int = 0, max_attempts: int = 1000) -> MarketSplitInstance:
    """Random instance with n = 10(m-1) columns and a planted solution."""
    if m < 2 or D < 2:
        raise ValueError("need m >= 2 and D >= 2")
    n = 10 * (m - 1)
    for attempt in range(max_attempts):
        rng = np.random.default_rng(np.random.SeedSequence([seed, m, D, attempt]))
        half = n // 2
        ones = int(rng.integers(max(0, half - 2), min(n, half + 2) + 1))
        x = np.zeros(n, dtype=np.int64)
        x[rng.choice(n, size=ones, replace=False)] = 1
        A = rng.integers(0, D, size=(m, n), dtype=np.int64)
        b = A.sum(axis=1) // 2
        ok = True
        for i in range(m):
            slack = _repair_by_swaps(A[i], x, int(b[i]))
            if slack and not _spread_slack(A[i], x, slack, D, rng):
                ok = False
                break
        if ok and np.array_equal(A @ x, b):
            prov = Provenance(seed, D, attempt, planted_digest(x.tolist()))
            return MarketSplitInstance(tuple(map(tuple, A.tolist())), tuple(b.tolist()), prov)
    raise RuntimeError(f"row repair failed in {max_attempts} attempts")


def planted_solution(inst: MarketSplitInstance) -> tuple[int, ...]:
    """Recover the planted vector by replaying the recorded generation."""
    p = inst.provenance
    if p is None:
        raise ValueError("instance has no generation provenance")
    rng = np.random.default_rng(np.random.SeedSequence([p.seed, inst.m, p.D, p.attempt]))
    n = inst.n
    half = n // 2
    ones = int(rng.integers(max(0, half - 2), min(n, half + 2) + 1))
    x = np.zeros(n, dtype=np.int64)
    x[rng.choice(n, size=ones, replace=False)] = 1
    x = tuple(x.tolist())
    if planted_digest(x) != p.digest:
        raise ValueError("provenance digest does not match the replayed solution")
    return x


def check(inst: MarketSplitInstance, x: Sequence[int]) -> Verdict:
    if any(v not in (0, 1) for v in x):
        raise ValueError("x must be binary")
    slacks = inst.slacks(x)
    viol = [Violation(f"row{i}", f"slack {s}", abs(s)) for i, s in enumerate(slacks) if s]
    return Verdict.from_violations(viol, sense=ObjectiveSense.FEASIBILITY, info={"slacks": slacks})


class Norm(enum.Enum):
    SQUARED_L2 = "l2"
    LINF = "linf"


def to_objective(inst: MarketSplitInstance, norm: Norm = Norm.SQUARED_L2) -> Model:
    n = inst.n
    if norm is Norm.SQUARED_L2:
        obj = Polynomial()
        for row, bi in zip(inst.A, inst.b):
            r = Polynomial.linear({j: -a for j, a in enumerate(row) if a}, bi)
            obj = obj + r * r
        return Model(ObjectiveSense.MINIMIZE, tuple(VariableSpec.binary() for _ in range(n)), obj)
    zmax = max(max(bi, sum(row) - bi) for row, bi in zip(inst.A, inst.b))
    z = n
    cons = []
    for i, (row, bi) in enumerate(zip(inst.A, inst.b)):
        coeffs = {j: a for j, a in enumerate(row) if a}
        cons.append(LinearConstraint({**coeffs, z: -1}, Relation.LE, bi, f"upper{i}"))
        cons.append(LinearConstraint({**coeffs, z: 1}, Relation.GE, bi, f"lower{i}"))
    variables = tuple(VariableSpec.binary() for _ in range(n)) + (VariableSpec.integer(0, max(zmax, 0)),)
    return Model(ObjectiveSense.MINIMIZE, variables, Polynomial.var(z), tuple(cons))


def write_instance(inst: MarketSplitInstance) -> str:
    lines = []
    if inst.provenance:
        p = inst.provenance
        lines.append(f"# seed {p.seed} D {p.D} attempt {p.attempt} planted_digest {p.digest}")
    lines.append(f"{inst.m} {inst.n}")
    lines += [" ".join(map(str, row)) for row in inst.A]
    lines.append(" ".join(map(str, inst.b)))
    return "\n".join(lines) + "\n"


def read_instance(text: str) -> MarketSplitInstance:
    prov = None
    rows = []
    for ln in text.splitlines():
        s = ln.strip()
        if not s:
            continue
        if s.startswith("#"):
            tok = s[1:].split()
            kv = dict(zip(tok[::2], tok[1::2]))
            if {"seed", "D", "attempt", "planted_digest"} <= kv.keys():
                prov = Provenance(int(kv["seed"]), int(kv["D"]), int(kv["attempt"]), kv["planted_digest"])
            continue
        rows.append([int(t) for t in s.split()])
    if not rows or len(rows[0]) != 2:
        raise ValueError("missing 'm n' header")
    m, n = rows[0]
    if len(rows) != m + 2 or any(len(r) != n for r in rows[1:m + 1]) or len(rows[-1]) != m:
        raise ValueError("instance body does not match the 'm n' header")
    return MarketSplitInstance(tuple(map(tuple, rows[1:m + 1])), tuple(rows[-1]), prov)
