"""Capacitated vehicle routing: TSPLIB/CVRPLIB I/O, route checking, the
Clarke-Wright savings construction, the two-index MTZ model and tight
instance generation.

Node 0 is the depot and customers are 1..n.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import ObjectiveSense, Verdict, Violation
from .model import LinearConstraint, Model, Polynomial, Relation, VariableSpec


@dataclass(frozen=True)
class CvrpInstance:
    n: int
    K: int
    Q: int
    demands: tuple[int, ...]          # demands[i-1] is customer i
    cost: tuple[tuple[int, ...], ...]  # (n+1) x (n+1), depot first
    name: str = "cvrp"
    coords: Optional[tuple[tuple[int, int], ...]] = None  # depot first, for EUC_2D
    metric: bool = False
    comment: str = field(default="", compare=False)

    def __post_init__(self):
        d = tuple(int(v) for v in self.demands)
        c = tuple(tuple(int(v) for v in r) for r in self.cost)
        if self.n < 1 or self.K < 1 or self.Q < 1:
            raise ValueError("need n, K, Q >= 1")
        if len(d) != self.n or any(v < 1 for v in d):
            raise ValueError("each of the n customers needs a positive demand")
        N = self.n + 1
        if len(c) != N or any(len(r) != N for r in c):
            raise ValueError(f"cost matrix must be {N} x {N}")
        if any(c[i][i] for i in range(N)) or any(v < 0 for r in c for v in r):
            raise ValueError("costs must be non-negative with a zero diagonal")
        if any(c[i][j] != c[j][i] for i in range(N) for j in range(i)):
            raise ValueError("costs must be symmetric")
        object.__setattr__(self, "demands", d)
        object.__setattr__(self, "cost", c)
        if self.metric and not self.satisfies_triangle():
            raise ValueError("instance is flagged metric but violates the triangle inequality")

    def satisfies_triangle(self) -> bool:
        C = np.array(self.cost)
        via = (C[:, :, None] + C[None, :, :]).min(axis=1)
        return bool((C <= via).all())

    def demand(self, i: int) -> int:
        return self.demands[i - 1]


@dataclass(frozen=True)
class RouteSet:
    routes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        routes = tuple(tuple(int(v) for v in r) for r in self.routes)
        if any(not r for r in routes):
            raise ValueError("routes must be non-empty")
        object.__setattr__(self, "routes", routes)


def route_cost(inst: CvrpInstance, route: Sequence[int]) -> int:
    stops = [0, *route, 0]
    return sum(inst.cost[a][b] for a, b in zip(stops, stops[1:]))


def check(inst: CvrpInstance, rs: RouteSet) -> Verdict:
    for r in rs.routes:
        for v in r:
            if not 1 <= v <= inst.n:
                raise ValueError(f"unknown customer {v}")
    viol = []
    seen: dict[int, int] = {}
    for r in rs.routes:
        for v in r:
            seen[v] = seen.get(v, 0) + 1
    for v in range(1, inst.n + 1):
        if seen.get(v, 0) != 1:
            viol.append(Violation(f"visit[{v}]", f"customer visited {seen.get(v, 0)} times", abs(seen.get(v, 0) - 1)))
    if len(rs.routes) > inst.K:
        viol.append(Violation("vehicles", f"{len(rs.routes)} routes > {inst.K}", len(rs.routes) - inst.K))
    for k, r in enumerate(rs.routes, 1):
        load = sum(inst.demand(v) for v in r)
        if load > inst.Q:
            viol.append(Violation(f"capacity[{k}]", f"load {load} > {inst.Q}", load - inst.Q))
    total = sum(route_cost(inst, r) for r in rs.routes)
    return Verdict.from_violations(viol, objective=total, sense=ObjectiveSense.MINIMIZE)


# --- savings -----------------------------------------------------------------------

class Infeasible(RuntimeError):
    pass


def _pack(demands: dict[int, int], K: int, Q: int) -> Optional[list[list[int]]]:
    """Exact bin packing by depth-first search, largest items first."""
    items = sorted(demands, key=lambda v: (-demands[v], v))
    bins: list[list[int]] = [[] for _ in range(K)]
    loads = [0] * K

    def place(idx: int) -> bool:
        if idx == len(items):
            return True
        v = items[idx]
        tried = set()
        for b in range(K):
            if loads[b] + demands[v] > Q or loads[b] in tried:
                continue
            tried.add(loads[b])
            bins[b].append(v)
            loads[b] += demands[v]
            if place(idx + 1):
                return True
            bins[b].pop()
            loads[b] -= demands[v]
        return False

    return [b for b in bins if b] if place(0) else None


def _merge_all(inst: CvrpInstance, customers: Sequence[int], limit: Optional[int]) -> list[list[int]]:
    """Parallel savings restricted to ``customers``; stops early once at most
    ``limit`` routes remain after the positive-saving pass."""
    route_of = {v: [v] for v in customers}
    load = {v: inst.demand(v) for v in customers}
    c = inst.cost
    pairs = sorted(((c[0][i] + c[0][j] - c[i][j], i, j) for i, j in itertools.combinations(sorted(customers), 2)),
                   key=lambda s: (-s[0], s[1], s[2]))
    n_routes = len(customers)
    for positive in (True, False):
        if not positive and (limit is None or n_routes <= limit):
            break
        for s, i, j in pairs:
            if (s > 0) != positive:
                continue
            if not positive and n_routes <= limit:
                break
            ri, rj = route_of[i], route_of[j]
            if ri is rj or load[ri[0]] + load[rj[0]] > inst.Q:
                continue
            if ri[-1] == i and rj[0] == j:
                merged = ri + rj
            elif ri[0] == i and rj[-1] == j:
                merged = rj + ri
            elif ri[-1] == i and rj[-1] == j:
                merged = ri + rj[::-1]
            elif ri[0] == i and rj[0] == j:
                merged = ri[::-1] + rj
            else:
                continue
            total = load[ri[0]] + load[rj[0]]
            for v in merged:
                route_of[v] = merged
            load[merged[0]] = total
            n_routes -= 1
    out, seen = [], set()
    for v in customers:
        r = route_of[v]
        if id(r) not in seen:
            seen.add(id(r))
            out.append(r)
    return out


def savings(inst: CvrpInstance) -> RouteSet:
    """Clarke-Wright parallel savings, ties broken by (i, j).

    Positive savings are merged first. If more than K routes remain, merges
    with non-positive savings continue in the same order; if that still
    leaves too many routes, customers are packed into K bins exactly and the
    savings merge runs inside each bin.
    """
    if any(d > inst.Q for d in inst.demands):
        raise Infeasible("a single demand exceeds the capacity")
    routes = _merge_all(inst, list(range(1, inst.n + 1)), inst.K)
    if len(routes) > inst.K:
        bins = _pack({v: inst.demand(v) for v in range(1, inst.n + 1)}, inst.K, inst.Q)
        if bins is None:
            raise Infeasible(f"demands do not fit into {inst.K} vehicles")
        routes = []
        for b in bins:
            routes += _merge_all(inst, sorted(b), 1)
    return RouteSet(tuple(tuple(r) for r in routes))


def brute_force_optimum(inst: CvrpInstance) -> tuple[int, RouteSet]:
    """Optimal cost over all set partitions and visiting orders (tiny n only)."""
    if inst.n > 9:
        raise ValueError("exhaustive routing is limited to n <= 9")

    best_route: dict[frozenset, tuple[int, tuple[int, ...]]] = {}

    def best_order(group: frozenset):
        if group not in best_route:
            best_route[group] = min((route_cost(inst, p), p) for p in itertools.permutations(sorted(group)))
        return best_route[group]

    best = None

    def partitions(rest: list[int]):
        if not rest:
            yield []
            return
        head, tail = rest[0], rest[1:]
        for r in range(len(tail) + 1):
            for combo in itertools.combinations(tail, r):
                group = frozenset((head, *combo))
                left = [v for v in tail if v not in combo]
                for part in partitions(left):
                    yield [group] + part

    for part in partitions(list(range(1, inst.n + 1))):
        if len(part) > inst.K or any(sum(inst.demand(v) for v in g) > inst.Q for g in part):
            continue
        orders = [best_order(g) for g in part]
        total = sum(o[0] for o in orders)
        if best is None or total < best[0]:
            best = (total, RouteSet(tuple(o[1] for o in orders)))
    if best is None:
        raise Infeasible("no feasible routing")
    return best


# --- MTZ model ------------------------------------------------------------------

class MtzLayout:
    """x_ij over ordered pairs i != j of 0..n+1 (node n+1 is the depot copy), then y_0..y_{n+1}."""

    def __init__(self, n: int):
        self.n = n
        nodes = range(n + 2)
        self.pairs = [(i, j) for i in nodes for j in nodes if i != j]
        self.x = {p: k for k, p in enumerate(self.pairs)}
        self.y = {i: len(self.pairs) + i for i in nodes}
        self.size = len(self.pairs) + n + 2

    def routes(self, v: Sequence[int]) -> RouteSet:
        n = self.n
        succ: dict[int, list[int]] = {}
        for (i, j), k in self.x.items():
            if v[k]:
                succ.setdefault(i, []).append(j)
        out = []
        for start in sorted(succ.get(0, [])):
            route, cur = [], start
            while cur != n + 1 and cur != 0 and len(route) <= n:
                route.append(cur)
                nxt = succ.get(cur, [])
                cur = nxt[0] if nxt else n + 1
            if route:
                out.append(tuple(route))
        return RouteSet(tuple(out))


def _mtz_cost(inst: CvrpInstance, i: int, j: int) -> int:
    end = inst.n + 1
    i = 0 if i == end else i
    j = 0 if j == end else j
    return inst.cost[i][j]


def build_mtz(inst: CvrpInstance) -> tuple[Model, MtzLayout]:
    n, Q = inst.n, inst.Q
    L = MtzLayout(n)
    end = n + 1
    d = [0, *inst.demands, 0]
    obj = Polynomial.linear({k: _mtz_cost(inst, i, j) for (i, j), k in L.x.items() if _mtz_cost(inst, i, j)})
    cons = []
    for i in range(1, n + 1):
        cons.append(LinearConstraint({L.x[(i, j)]: 1 for j in range(1, end + 1) if j != i}, Relation.EQ, 1,
                                     f"leave[{i}]"))
    for h in range(1, n + 1):
        coeffs = {L.x[(i, h)]: 1 for i in range(0, n + 1) if i != h}
        for j in range(1, end + 1):
            if j != h:
                coeffs[L.x[(h, j)]] = coeffs.get(L.x[(h, j)], 0) - 1
        cons.append(LinearConstraint(coeffs, Relation.EQ, 0, f"flow[{h}]"))
    cons.append(LinearConstraint({L.x[(0, j)]: 1 for j in range(1, n + 1)}, Relation.LE, inst.K, "fleet"))
    for i, j in L.pairs:
        # y_j - y_i - (d_j + Q) x_ij >= -Q
        cons.append(LinearConstraint({L.y[j]: 1, L.y[i]: -1, L.x[(i, j)]: -(d[j] + Q)}, Relation.GE, -Q,
                                     f"load[{i},{j}]"))
    variables = [VariableSpec.binary() for _ in L.pairs] + [VariableSpec.integer(d[i], Q) for i in range(n + 2)]
    return Model(ObjectiveSense.MINIMIZE, tuple(variables), obj, tuple(cons)), L


# --- generation ----------------------------------------------------------------

def _euc_2d(coords) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(math.floor(math.hypot(a[0] - b[0], a[1] - b[1]) + 0.5)) for b in coords) for a in coords)


def generate_tight(n: int, K: int, seed: int = 0, Q: int = 100, grid: int = 100) -> CvrpInstance:
    """Random EUC_2D instance whose demands total exactly K * Q.

    Customers are split into K non-empty groups and each group's demands are a
    random composition of Q, so a K-route solution always exists.
    """
    if n < K or K < 1:
        raise ValueError("need n >= K >= 1")
    rng = np.random.default_rng(np.random.SeedSequence([seed, n, K, Q]))
    order = rng.permutation(n)
    cuts = sorted(rng.choice(np.arange(1, n), size=K - 1, replace=False).tolist()) if K > 1 else []
    groups = np.split(order, cuts)
    if any(len(g) > Q for g in groups):
        raise ValueError(f"capacity {Q} is too small for groups of {max(map(len, groups))} customers")
    demands = [0] * n
    for g in groups:
        inner = sorted(rng.choice(np.arange(1, Q), size=len(g) - 1, replace=False).tolist()) if len(g) > 1 else []
        parts = [b - a for a, b in zip([0, *inner], [*inner, Q])]
        for v, part in zip(g, parts):
            demands[int(v)] = part
    coords = tuple((int(a), int(b)) for a, b in rng.integers(0, grid + 1, size=(n + 1, 2)))
    return CvrpInstance(n, K, Q, tuple(demands), _euc_2d(coords), f"tight-n{n}-k{K}-s{seed}", coords)


# --- TSPLIB / CVRPLIB ----------------------------------------------------------------

_HEADER = re.compile(r"^\s*([A-Z_]+)\s*:?\s*(.*?)\s*$")
_SECTIONS = {"NODE_COORD_SECTION", "EDGE_WEIGHT_SECTION", "DEMAND_SECTION", "DEPOT_SECTION"}
_KEYS = {"NAME", "COMMENT", "TYPE", "DIMENSION", "CAPACITY", "EDGE_WEIGHT_TYPE", "EDGE_WEIGHT_FORMAT", "VEHICLES",
         "NODE_COORD_TYPE", "DISPLAY_DATA_TYPE"}


def _explicit_matrix(values: list[int], N: int, fmt: str) -> list[list[int]]:
    M = [[0] * N for _ in range(N)]
    it = iter(values)
    try:
        if fmt == "FULL_MATRIX":
            for i in range(N):
                for j in range(N):
                    M[i][j] = next(it)
        else:
            cells = {
                "LOWER_ROW": [(i, j) for i in range(N) for j in range(i)],
                "LOWER_DIAG_ROW": [(i, j) for i in range(N) for j in range(i + 1)],
                "UPPER_ROW": [(i, j) for i in range(N) for j in range(i + 1, N)],
                "UPPER_DIAG_ROW": [(i, j) for i in range(N) for j in range(i, N)],
            }[fmt]
            for i, j in cells:
                M[i][j] = M[j][i] = next(it)
    except KeyError:
        raise ValueError(f"unsupported EDGE_WEIGHT_FORMAT {fmt}") from None
    except StopIteration:
        raise ValueError("EDGE_WEIGHT_SECTION is too short") from None
    if next(it, None) is not None:
        raise ValueError("EDGE_WEIGHT_SECTION is too long")
    return M


def _vehicles(head: dict) -> int:
    if "VEHICLES" in head:
        return int(head["VEHICLES"])
    for text in (head.get("COMMENT", ""), head.get("NAME", "")):
        m = re.search(r"(?:trucks|vehicles)\D*(\d+)", text, re.I) or re.search(r"-k(\d+)", text)
        if m:
            return int(m.group(1))
    raise ValueError("number of vehicles not given (VEHICLES, COMMENT or -k<K> in NAME)")


def parse_cvrplib(text: str) -> CvrpInstance:
    head: dict[str, str] = {}
    body: dict[str, list[list[str]]] = {}
    section = None
    for ln in text.splitlines():
        s = ln.strip()
        if not s:
            continue
        if s == "EOF":
            break
        key = s.split(":")[0].strip() if ":" in s else s.split()[0]
        if key in _SECTIONS:
            section = key
            body[section] = []
            continue
        if key in _KEYS and (":" in s or section is None):
            head[key] = s.split(":", 1)[1].strip() if ":" in s else s[len(key):].strip()
            section = None
            continue
        if section is None:
            raise ValueError(f"unknown section or keyword {s!r}")
        body[section].append(s.split())
    N = int(head.get("DIMENSION", 0))
    if N < 2:
        raise ValueError("DIMENSION must be at least 2")
    Q = int(head["CAPACITY"])
    kind = head.get("EDGE_WEIGHT_TYPE", "")
    dem = {int(r[0]): int(r[1]) for r in body.get("DEMAND_SECTION", [])}
    if len(dem) != N:
        raise ValueError(f"DEMAND_SECTION lists {len(dem)} nodes, DIMENSION is {N}")
    depots = [int(r[0]) for r in body.get("DEPOT_SECTION", []) if int(r[0]) != -1]
    depot = depots[0] if depots else 1
    order = [depot] + [v for v in range(1, N + 1) if v != depot]
    coords = None
    if kind == "EUC_2D":
        pts = {int(r[0]): (int(float(r[1])), int(float(r[2]))) for r in body.get("NODE_COORD_SECTION", [])}
        if len(pts) != N:
            raise ValueError("NODE_COORD_SECTION does not match DIMENSION")
        coords = tuple(pts[v] for v in order)
        cost = _euc_2d(coords)
    elif kind == "EXPLICIT":
        values = [int(float(v)) for r in body.get("EDGE_WEIGHT_SECTION", []) for v in r]
        M = _explicit_matrix(values, N, head.get("EDGE_WEIGHT_FORMAT", "FULL_MATRIX"))
        cost = tuple(tuple(M[a - 1][b - 1] for b in order) for a in order)
    else:
        raise ValueError(f"unsupported EDGE_WEIGHT_TYPE {kind!r}")
    return CvrpInstance(N - 1, _vehicles(head), Q, tuple(dem[v] for v in order[1:]), cost,
                        head.get("NAME", "cvrp"), coords, comment=head.get("COMMENT", ""))


def write_cvrplib(inst: CvrpInstance) -> str:
    N = inst.n + 1
    lines = [f"NAME : {inst.name}"]
    if inst.comment:
        lines.append(f"COMMENT : {inst.comment}")
    lines += ["TYPE : CVRP", f"DIMENSION : {N}", f"VEHICLES : {inst.K}", f"CAPACITY : {inst.Q}"]
    if inst.coords is not None and _euc_2d(inst.coords) == inst.cost:
        lines += ["EDGE_WEIGHT_TYPE : EUC_2D", "NODE_COORD_SECTION"]
        lines += [f"{v + 1} {x} {y}" for v, (x, y) in enumerate(inst.coords)]
    else:
        lines += ["EDGE_WEIGHT_TYPE : EXPLICIT", "EDGE_WEIGHT_FORMAT : FULL_MATRIX", "EDGE_WEIGHT_SECTION"]
        lines += [" ".join(map(str, r)) for r in inst.cost]
    lines.append("DEMAND_SECTION")
    lines += [f"{v + 1} {d}" for v, d in enumerate((0, *inst.demands))]
    lines += ["DEPOT_SECTION", "1", "-1", "EOF"]
    return "\n".join(lines) + "\n"


def write_solution(inst: CvrpInstance, rs: RouteSet) -> str:
    lines = [f"Route #{k}: {' '.join(map(str, r))}" for k, r in enumerate(rs.routes, 1)]
    lines.append(f"Cost {sum(route_cost(inst, r) for r in rs.routes)}")
    return "\n".join(lines) + "\n"


def read_solution(text: str) -> tuple[RouteSet, Optional[int]]:
    routes, cost = [], None
    for ln in text.splitlines():
        s = ln.strip()
        if s.lower().startswith("route"):
            _, _, rest = s.partition(":")
            routes.append(tuple(int(v) for v in rest.split()))
        elif s.lower().startswith("cost"):
            cost = int(float(s.split()[1]))
        elif s:
            raise ValueError(f"unexpected line {s!r}")
    return RouteSet(tuple(routes)), cost
