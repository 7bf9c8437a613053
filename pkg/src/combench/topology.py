"""Order/degree problem: exact diameter and ASPL of simple graphs, certificate
checking and a random-regular start improved by degree-preserving edge swaps."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Union

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .core import ObjectiveSense, Verdict, Violation

DENSE_LIMIT = 3000


@dataclass(frozen=True)
class OdpInstance:
    n: int
    d: int
    k_target: Optional[int] = None

    def __post_init__(self):
        if self.n < 2 or self.d < 1:
            raise ValueError("need n >= 2 and d >= 1")


@dataclass(frozen=True)
class GraphCertificate:
    n: int
    edges: frozenset

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            e = (min(u, v), max(u, v))
            if e in norm:
                raise ValueError(f"duplicate edge {e}")
            norm.add(e)
        object.__setattr__(self, "edges", frozenset(norm))

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


class Unreachable(NamedTuple):
    pairs: int  # unordered vertex pairs with no path


class Distances(NamedTuple):
    diameter: Union[int, Unreachable]
    aspl: Fraction  # over reachable unordered pairs


def _dense_stats(n: int, edges) -> tuple[int, int, int, int]:
    """(reachable pairs, distance sum, max distance, unreachable pairs), ordered pairs halved."""
    A = np.zeros((n, n), dtype=np.float32)
    for u, v in edges:
        A[u, v] = A[v, u] = 1
    seen = np.eye(n, dtype=bool)
    frontier = seen.copy()
    total, level, far = 0, 0, 0
    while frontier.any():
        level += 1
        frontier = ((frontier.astype(np.float32) @ A) > 0) & ~seen
        count = int(frontier.sum())
        if count:
            total += level * count
            far = level
        seen |= frontier
    reach = int(seen.sum()) - n
    return reach // 2, total // 2, far, (n * n - n - reach) // 2


def _sparse_stats(n: int, edges) -> tuple[int, int, int, int]:
    if edges:
        rows, cols = zip(*edges)
    else:
        rows, cols = (), ()
    A = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    total = far = reach = 0
    for s in range(n):
        dist = shortest_path(A, directed=False, unweighted=True, indices=s)
        finite = dist[np.isfinite(dist)]
        reach += len(finite) - 1
        total += int(finite.sum())
        far = max(far, int(finite.max()))
    return reach // 2, total // 2, far, (n * n - n - reach) // 2


def diameter_aspl(g: GraphCertificate) -> Distances:
    stats = _dense_stats if g.n <= DENSE_LIMIT else _sparse_stats
    reach, total, far, missing = stats(g.n, sorted(g.edges))
    aspl = Fraction(total, reach) if reach else Fraction(0)
    return Distances(Unreachable(missing) if missing else far, aspl)


def _within(diameter, k: int) -> bool:
    return not isinstance(diameter, Unreachable) and diameter <= k


def check(inst: OdpInstance, g: GraphCertificate, k: Optional[int] = None) -> Verdict:
    """Order, degree bound and diameter bound; the ASPL is reported in ``info``."""
    k = inst.k_target if k is None else k
    viol = []
    if g.n != inst.n:
        viol.append(Violation("order", f"{g.n} vertices instead of {inst.n}", abs(g.n - inst.n)))
    for v, deg in enumerate(g.degrees()):
        if deg > inst.d:
            viol.append(Violation(f"degree[{v}]", f"degree {deg} > {inst.d}", deg - inst.d))
    dist = diameter_aspl(g)
    if k is not None and not _within(dist.diameter, k):
        shown = f"{dist.diameter.pairs} unreachable pairs" if isinstance(dist.diameter, Unreachable) \
            else f"diameter {dist.diameter}"
        viol.append(Violation("diameter", f"{shown} exceeds {k}", 1))
    objective = None if isinstance(dist.diameter, Unreachable) else dist.diameter
    return Verdict.from_violations(viol, objective=objective, sense=ObjectiveSense.MINIMIZE,
                                   info={"diameter": dist.diameter, "aspl": dist.aspl})


def _score(n: int, edges) -> tuple[int, int, int]:
    reach, total, far, missing = _dense_stats(n, edges)
    return missing, far, total


def _start_graph(n: int, d: int, rng: np.random.Generator) -> nx.Graph:
    seq = [d] * n
    if (n * d) % 2:
        seq[-1] = d - 1
    for _ in range(100):
        try:
            if len(set(seq)) == 1:
                return nx.random_regular_graph(d, n, seed=int(rng.integers(2**31)))
            return nx.random_degree_sequence_graph(seq, seed=int(rng.integers(2**31)), tries=50)
        except (nx.NetworkXError, nx.NetworkXUnfeasible):
            continue
    # pairing model with loops and parallel edges dropped
    g = nx.Graph(nx.configuration_model(seq, seed=int(rng.integers(2**31))))
    g.remove_edges_from(nx.selfloop_edges(g))
    return g


def construct(n: int, d: int, seed: int = 0, budget: int = 3000) -> GraphCertificate:
    """Best-effort low-diameter graph with maximum degree d.

    Starts from a random d-regular graph (one vertex of degree d-1 when n*d is
    odd) and applies up to ``budget`` random two-edge swaps, keeping a swap
    when (unreachable pairs, diameter, total distance) does not get worse.
    Swaps never change the degree sequence.
    """
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    if n <= d + 1:
        return GraphCertificate(n, frozenset((u, v) for u in range(n) for v in range(u + 1, n)))
    rng = np.random.default_rng(np.random.SeedSequence([seed, n, d]))
    g = _start_graph(n, d, rng)
    edges = sorted((min(e), max(e)) for e in g.edges())
    present = set(edges)
    best = _score(n, edges)
    for _ in range(budget):
        if best[0] == 0 and best[1] <= 1:
            break
        i, j = rng.choice(len(edges), size=2, replace=False)
        (a, b), (c, e) = edges[i], edges[j]
        if rng.random() < 0.5:
            c, e = e, c
        new1, new2 = (min(a, c), max(a, c)), (min(b, e), max(b, e))
        if a == c or b == e or new1 in present or new2 in present or new1 == new2:
            continue
        trial = list(edges)
        trial[i], trial[j] = new1, new2
        score = _score(n, trial)
        if score <= best:
            present -= {edges[i], edges[j]}
            present |= {new1, new2}
            edges, best = trial, score
    return GraphCertificate(n, frozenset(edges))


def read_edge_list(text: str, n: Optional[int] = None) -> GraphCertificate:
    edges = []
    for ln in text.splitlines():
        s = ln.strip()
        if not s or s.startswith("#"):
            continue
        u, v = map(int, s.split())
        edges.append((u, v))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return GraphCertificate(n, frozenset(edges))


def write_edge_list(g: GraphCertificate) -> str:
    return "".join(f"{u} {v}\n" for u, v in sorted(g.edges))
