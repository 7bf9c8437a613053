"""Maximum independent set: graph I/O, checking, greedy repair of candidate
vectors and the linear / penalized quadratic models."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import ObjectiveSense, Verdict, Violation
from .model import LinearConstraint, Model, Polynomial, Qubo, Relation, VariableSpec


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset  # of (u, v) with u < v

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_networkx(cls, g) -> "Graph":
        nodes = sorted(g.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        return cls(len(nodes), frozenset((index[a], index[b]) for a, b in g.edges() if a != b))

    def adjacency(self) -> list[set[int]]:
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def karate() -> Graph:
    import networkx as nx
    return Graph.from_networkx(nx.karate_club_graph())


def _members(g: Graph, s: Iterable[int]) -> list[int]:
    members = sorted(set(int(v) for v in s))
    if any(not 0 <= v < g.n for v in members):
        raise ValueError("vertex out of range")
    return members


def check(g: Graph, s: Iterable[int]) -> Verdict:
    members = _members(g, s)
    inside = set(members)
    viol = [Violation(f"edge({u + 1},{v + 1})", "both endpoints selected", 1)
            for u, v in sorted(g.edges) if u in inside and v in inside]
    return Verdict.from_violations(viol, objective=len(members), sense=ObjectiveSense.MAXIMIZE)


def _violation_counts(adj, x) -> list[int]:
    return [sum(x[w] for w in adj[v]) if x[v] else 0 for v in range(len(x))]


def greedy_postprocess(g: Graph, x: Sequence[int], retry_removed: bool = False) -> list[int]:
    """Repair then extend a 0/1 vector; returns the sorted vertex set.

    Repair drops the vertex in the most violated edges (lowest index on ties)
    until no edge has both ends set; each dropped vertex also leaves the pool
    of candidates, so it is not offered again in the extension pass unless
    ``retry_removed`` is set. The extension pass pops candidates from the end
    of the pool (highest index first) and keeps each one that stays feasible.
    """
    if len(x) != g.n:
        raise ValueError(f"expected {g.n} entries, got {len(x)}")
    x = [1 if v else 0 for v in x]
    adj = g.adjacency()
    pool = list(range(g.n))
    removed = []
    counts = _violation_counts(adj, x)
    while sum(counts):
        worst = max(range(g.n), key=lambda v: (counts[v], -v))
        x[worst] = 0
        pool.remove(worst)
        removed.append(worst)
        counts = _violation_counts(adj, x)
    if retry_removed:
        pool = sorted(pool + removed)
    while pool:
        u = pool.pop()
        if not x[u] and not any(x[w] for w in adj[u]):
            x[u] = 1
    return [v for v in range(g.n) if x[v]]


def is_maximal(g: Graph, s: Iterable[int]) -> bool:
    inside = set(s)
    adj = g.adjacency()
    return all(v in inside or adj[v] & inside for v in range(g.n))


def build_blp(g: Graph) -> Model:
    cons = tuple(LinearConstraint({u: 1, v: 1}, Relation.LE, 1, f"edge({u + 1},{v + 1})") for u, v in sorted(g.edges))
    return Model(ObjectiveSense.MAXIMIZE, tuple(VariableSpec.binary() for _ in range(g.n)),
                 Polynomial.linear({i: 1 for i in range(g.n)}), cons)


def build_qubo(g: Graph, lam: int = 2) -> Qubo:
    """Maximize sum(x) - lam * sum over edges of x_u x_v."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    terms = {(i,): 1 for i in range(g.n)}
    terms.update({(u, v): -lam for u, v in g.edges})
    return Qubo(g.n, terms, 0, ObjectiveSense.MAXIMIZE)


def exact_mis_size(g: Graph) -> int:
    """Independence number by branching on a maximum-degree vertex."""
    adj = g.adjacency()

    def solve(alive: frozenset) -> int:
        if not alive:
            return 0
        v = max(alive, key=lambda u: (len(adj[u] & alive), -u))
        if not adj[v] & alive:
            isolated = [u for u in alive if not adj[u] & alive]
            return len(isolated) + solve(alive - frozenset(isolated))
        take = 1 + solve(alive - {v} - adj[v])
        skip = solve(alive - {v}) if len(adj[v] & alive) > 1 else 0
        return max(take, skip)

    return solve(frozenset(range(g.n)))


# --- text formats ---------------------------------------------------------------

def read_gph(text: str) -> Graph:
    n, edges = None, set()
    for ln in text.splitlines():
        tok = ln.split()
        if not tok or tok[0] in ("c", "%", "#"):
            continue
        if tok[0] == "p":
            n = int(tok[2])
        elif tok[0] == "e":
            if n is None:
                raise ValueError("edge before the 'p edge n m' header")
            edges.add((int(tok[1]) - 1, int(tok[2]) - 1))
        else:
            raise ValueError(f"unrecognized line {ln!r}")
    if n is None:
        raise ValueError("missing 'p edge n m' header")
    return Graph(n, frozenset(edges))


def write_gph(g: Graph) -> str:
    lines = [f"p edge {g.n} {len(g.edges)}"] + [f"e {u + 1} {v + 1}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def read_vertex_set(text: str) -> list[int]:
    return sorted(int(t) - 1 for t in text.split())


def write_vertex_set(s: Iterable[int]) -> str:
    return " ".join(str(v + 1) for v in sorted(s)) + "\n"
