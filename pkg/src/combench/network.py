"""Degree-constrained directed network design with integral multicommodity
routing minimizing the largest arc load.

Commodity k originates at node k: it leaves k with net outflow sum_j t[k][j]
and each other node i absorbs t[k][i].
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .core import ObjectiveSense, Verdict, Violation
from .model import LinearConstraint, Model, Polynomial, Relation, VariableSpec

Arc = tuple[int, int]


@dataclass(frozen=True)
class DemandMatrix:
    t: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        t = tuple(tuple(int(v) for v in row) for row in self.t)
        n = len(t)
        if n < 2 or any(len(r) != n for r in t):
            raise ValueError("demand matrix must be square with n >= 2")
        if any(v < 0 for r in t for v in r):
            raise ValueError("demands must be non-negative")
        if any(t[i][i] for i in range(n)):
            raise ValueError("diagonal demands must be zero")
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return len(self.t)

    def head(self, n: int) -> "DemandMatrix":
        """Demands among the first n nodes."""
        return DemandMatrix(tuple(row[:n] for row in self.t[:n]))

    def total(self) -> int:
        return sum(map(sum, self.t))


@dataclass(frozen=True)
class DesignSolution:
    arcs: frozenset
    flows: Mapping[tuple[int, int, int], int] = field(default_factory=dict)  # (k, i, j) -> units
    z: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "arcs", frozenset((int(i), int(j)) for i, j in self.arcs))
        object.__setattr__(self, "flows", {(int(k), int(i), int(j)): int(f) for (k, i, j), f in self.flows.items()})

    def arc_loads(self) -> dict[Arc, int]:
        loads: dict[Arc, int] = {}
        for (k, i, j), f in self.flows.items():
            loads[(i, j)] = loads.get((i, j), 0) + f
        return loads


def check(n: int, p: int, T: DemandMatrix, sol: DesignSolution) -> Verdict:
    """Degrees, arc support of flows, per-commodity conservation; the objective
    is recomputed from the flows and any stated z is only compared."""
    if T.n != n:
        raise ValueError(f"demand matrix is {T.n} x {T.n}, expected n={n}")
    for i, j in sol.arcs:
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ValueError(f"malformed arc ({i}, {j})")
    for k, i, j in sol.flows:
        if not (0 <= k < n and 0 <= i < n and 0 <= j < n) or i == j:
            raise ValueError(f"malformed flow index ({k}, {i}, {j})")
    viol, warns = [], []
    out_deg, in_deg = [0] * n, [0] * n
    for i, j in sol.arcs:
        out_deg[i] += 1
        in_deg[j] += 1
    for v in range(n):
        if out_deg[v] != p:
            viol.append(Violation(f"outdeg[{v + 1}]", f"outdegree {out_deg[v]} != {p}", abs(out_deg[v] - p)))
        if in_deg[v] != p:
            viol.append(Violation(f"indeg[{v + 1}]", f"indegree {in_deg[v]} != {p}", abs(in_deg[v] - p)))
    net = [[0] * n for _ in range(n)]
    for (k, i, j), f in sorted(sol.flows.items()):
        if f < 0:
            viol.append(Violation(f"flow[{k + 1},{i + 1},{j + 1}]", f"negative flow {f}", -f))
        if f and (i, j) not in sol.arcs:
            viol.append(Violation(f"arc[{k + 1},{i + 1},{j + 1}]", f"{f} units on unselected arc", f))
        if f > sum(T.t[k]):
            warns.append(f"commodity {k + 1} carries {f} units on arc {i + 1}->{j + 1}, above its total demand")
        net[k][i] += f
        net[k][j] -= f
    for k in range(n):
        for i in range(n):
            want = sum(T.t[k]) if i == k else -T.t[k][i]
            if net[k][i] != want:
                viol.append(Violation(f"conserve[{k + 1},{i + 1}]", f"net outflow {net[k][i]} != {want}",
                                      abs(net[k][i] - want)))
    z = max(sol.arc_loads().values(), default=0)
    if sol.z is not None and sol.z != z:
        warns.append(f"stated z {sol.z} differs from recomputed {z}")
    return Verdict.from_violations(viol, objective=z, sense=ObjectiveSense.MINIMIZE, warnings=warns,
                                   info={"z": z})


def trivial_solution(n: int, p: int, T: DemandMatrix) -> DesignSolution:
    """Circulant design i -> i+1..i+p; every demand travels the step-1 ring."""
    if not 1 <= p <= n - 1:
        raise ValueError("need 1 <= p <= n-1")
    if T.n != n:
        raise ValueError("demand size mismatch")
    arcs = frozenset((i, (i + s) % n) for i in range(n) for s in range(1, p + 1))
    flows: dict[tuple[int, int, int], int] = {}
    for k in range(n):
        for i in range(n):
            d = T.t[k][i]
            v = k
            while d and v != i:
                w = (v + 1) % n
                flows[(k, v, w)] = flows.get((k, v, w), 0) + d
                v = w
    sol = DesignSolution(arcs, flows)
    return DesignSolution(arcs, flows, max(sol.arc_loads().values(), default=0))


def ring_load(T: DemandMatrix) -> int:
    """Largest arc load when all demand follows the cycle 1 -> 2 -> ... -> n -> 1."""
    n = T.n
    loads = [0] * n  # loads[v] is the arc v -> v+1
    for k in range(n):
        for i in range(n):
            for step in range((i - k) % n):
                loads[(k + step) % n] += T.t[k][i]
    return max(loads)


class MipLayout:
    """Variable positions: x_ij first, then f_kij, then z."""

    def __init__(self, n: int):
        self.n = n
        self.arcs = [(i, j) for i in range(n) for j in range(n) if i != j]
        self.x = {a: idx for idx, a in enumerate(self.arcs)}
        base = len(self.arcs)
        self.f = {(k, i, j): base + k * len(self.arcs) + a for k in range(n) for a, (i, j) in enumerate(self.arcs)}
        self.z = base + n * len(self.arcs)
        self.size = self.z + 1

    def decode(self, v: Sequence[int]) -> DesignSolution:
        arcs = frozenset(a for a, idx in self.x.items() if v[idx])
        flows = {key: int(v[idx]) for key, idx in self.f.items() if v[idx]}
        return DesignSolution(arcs, flows, int(v[self.z]))


def build_mip(n: int, p: int, T: DemandMatrix, M: Optional[int] = None) -> tuple[Model, MipLayout]:
    if T.n != n:
        raise ValueError("demand size mismatch")
    total = T.total()
    if M is None:
        M = total
    L = MipLayout(n)
    variables = [VariableSpec.binary() for _ in L.arcs]
    variables += [VariableSpec.integer(0, M) for _ in L.f]
    variables.append(VariableSpec.integer(0, total))
    cons = []
    for i in range(n):
        cons.append(LinearConstraint({L.x[(i, j)]: 1 for j in range(n) if j != i}, Relation.EQ, p, f"out[{i + 1}]"))
        cons.append(LinearConstraint({L.x[(j, i)]: 1 for j in range(n) if j != i}, Relation.EQ, p, f"in[{i + 1}]"))
    for (k, i, j), idx in L.f.items():
        cons.append(LinearConstraint({idx: 1, L.x[(i, j)]: -M}, Relation.LE, 0, f"support[{k + 1},{i + 1},{j + 1}]"))
    for k in range(n):
        for i in range(n):
            coeffs = {}
            for j in range(n):
                if j != i:
                    coeffs[L.f[(k, i, j)]] = coeffs.get(L.f[(k, i, j)], 0) + 1
                    coeffs[L.f[(k, j, i)]] = coeffs.get(L.f[(k, j, i)], 0) - 1
            rhs = sum(T.t[k]) if i == k else -T.t[k][i]
            cons.append(LinearConstraint(coeffs, Relation.EQ, rhs, f"conserve[{k + 1},{i + 1}]"))
    for i, j in L.arcs:
        coeffs = {L.f[(k, i, j)]: 1 for k in range(n)}
        coeffs[L.z] = -1
        cons.append(LinearConstraint(coeffs, Relation.LE, 0, f"load[{i + 1},{j + 1}]"))
    model = Model(ObjectiveSense.MINIMIZE, tuple(variables), Polynomial.var(L.z), tuple(cons))
    return model, L


# --- text formats ----------------------------------------------------------------

def read_demands(text: str) -> DemandMatrix:
    tok = [int(v) for ln in text.splitlines() if not ln.lstrip().startswith("#") for v in ln.split()]
    if not tok:
        raise ValueError("empty demand file")
    n = tok[0]
    if len(tok) != 1 + n * n:
        raise ValueError(f"expected {n * n} demand entries, got {len(tok) - 1}")
    return DemandMatrix(tuple(tuple(tok[1 + r * n:1 + (r + 1) * n]) for r in range(n)))


def write_demands(T: DemandMatrix) -> str:
    return "\n".join([str(T.n)] + [" ".join(map(str, r)) for r in T.t]) + "\n"


def write_solution(sol: DesignSolution) -> str:
    lines = ["ARCS"] + [f"{i + 1} {j + 1}" for i, j in sorted(sol.arcs)]
    lines += ["FLOWS"] + [f"{k + 1} {i + 1} {j + 1} {f}" for (k, i, j), f in sorted(sol.flows.items()) if f]
    if sol.z is not None:
        lines.append(f"Z {sol.z}")
    return "\n".join(lines) + "\n"


def read_solution(text: str) -> DesignSolution:
    arcs, flows, z, section = set(), {}, None, None
    for ln in text.splitlines():
        tok = ln.split()
        if not tok or tok[0].startswith("#"):
            continue
        if tok[0] in ("ARCS", "FLOWS"):
            section = tok[0]
        elif tok[0] == "Z":
            z = int(tok[1])
        elif section == "ARCS" and len(tok) == 2:
            arcs.add((int(tok[0]) - 1, int(tok[1]) - 1))
        elif section == "FLOWS" and len(tok) == 4:
            k, i, j, f = map(int, tok)
            flows[(k - 1, i - 1, j - 1)] = flows.get((k - 1, i - 1, j - 1), 0) + f
        else:
            raise ValueError(f"unexpected line {ln!r}")
    return DesignSolution(frozenset(arcs), flows, z)
