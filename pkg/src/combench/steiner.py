"""Steiner tree packing on S x S x L grid graphs with holes.

Vertices are (x, y, z) with layer z = 0 as the top layer, where all terminals sit
on the border.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import ObjectiveSense, Verdict, Violation

Vertex = tuple[int, int, int]
Edge = frozenset


@dataclass(frozen=True)
class GridSteinerInstance:
    S: int
    L: int
    holes: frozenset
    nets: tuple[frozenset, ...]

    def __post_init__(self):
        if self.S < 2 or self.L < 1:
            raise ValueError("need S >= 2 and L >= 1")
        holes = frozenset(tuple(v) for v in self.holes)
        nets = tuple(frozenset(tuple(v) for v in net) for net in self.nets)
        seen = set()
        for k, net in enumerate(nets):
            if len(net) < 2:
                raise ValueError(f"net {k} needs at least two terminals")
            for v in net:
                if v in seen:
                    raise ValueError(f"terminal {v} belongs to two nets")
                if not self.on_top_border(v):
                    raise ValueError(f"terminal {v} is not on the top-layer border")
                if v in holes:
                    raise ValueError(f"terminal {v} lies in a hole")
                seen.add(v)
        if any(not self.in_grid(v) for v in holes):
            raise ValueError("hole outside the grid")
        object.__setattr__(self, "holes", holes)
        object.__setattr__(self, "nets", nets)

    def in_grid(self, v: Vertex) -> bool:
        x, y, z = v
        return 0 <= x < self.S and 0 <= y < self.S and 0 <= z < self.L

    def on_top_border(self, v: Vertex) -> bool:
        x, y, z = v
        return self.in_grid(v) and z == 0 and (x in (0, self.S - 1) or y in (0, self.S - 1))

    def neighbors(self, v: Vertex) -> list[Vertex]:
        x, y, z = v
        out = []
        for dx, dy, dz in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)):
            w = (x + dx, y + dy, z + dz)
            if self.in_grid(w) and w not in self.holes:
                out.append(w)
        return out


def make_edge(u: Vertex, v: Vertex) -> Edge:
    return frozenset((tuple(u), tuple(v)))


def _validate_edge(inst: GridSteinerInstance, e) -> tuple[Vertex, Vertex]:
    if len(e) != 2:
        raise ValueError(f"degenerate edge {set(e)}")
    u, v = sorted(e)
    for w in (u, v):
        if not inst.in_grid(w):
            raise ValueError(f"edge endpoint {w} outside the grid")
        if w in inst.holes:
            raise ValueError(f"edge endpoint {w} lies in a hole")
    if sum(abs(a - b) for a, b in zip(u, v)) != 1:
        raise ValueError(f"{u}-{v} is not a grid edge")
    return u, v


def check(inst: GridSteinerInstance, edges: Iterable) -> Verdict:
    """Forest, per-net connectivity, node-disjointness and no terminal-free trees."""
    edges = {frozenset(map(tuple, e)) for e in edges}
    parent: dict[Vertex, Vertex] = {}

    def find(u):
        parent.setdefault(u, u)
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    violations = []
    for e in sorted(edges, key=sorted):
        u, v = _validate_edge(inst, e)
        ru, rv = find(u), find(v)
        if ru == rv:
            violations.append(Violation("forest", f"edge {u}-{v} closes a cycle", 1))
        else:
            parent[ru] = rv
    comp_nets: dict[Vertex, set[int]] = {}
    for k, net in enumerate(inst.nets):
        roots = set()
        for t in net:
            if t not in parent:
                violations.append(Violation("connect", f"net {k} terminal {t} is not covered", 1))
                continue
            r = find(t)
            roots.add(r)
            comp_nets.setdefault(r, set()).add(k)
        if len(roots) > 1:
            violations.append(Violation("connect", f"net {k} is split over {len(roots)} trees", len(roots) - 1))
    for r in sorted({find(u) for u in parent}):
        nets = comp_nets.get(r, set())
        if len(nets) > 1:
            violations.append(Violation("disjoint", f"nets {sorted(nets)} share a tree", len(nets) - 1))
        elif not nets:
            violations.append(Violation("stray", f"tree at {r} holds no terminal", 1))
    return Verdict.from_violations(violations, objective=len(edges), sense=ObjectiveSense.MINIMIZE)


def _bfs_path(inst, tree: set, target: Vertex, blocked: set, rng) -> Optional[list[Vertex]]:
    """Shortest path from the tree to ``target`` through free vertices, random tie order."""
    prev = {v: None for v in tree}
    queue = deque(sorted(tree))
    while queue:
        u = queue.popleft()
        if u == target:
            path = []
            while u is not None and u not in tree:
                path.append(u)
                u = prev[u]
            path.append(u)
            return path[::-1]
        nbrs = inst.neighbors(u)
        rng.shuffle(nbrs)
        for w in nbrs:
            if w not in prev and (w == target or w not in blocked):
                prev[w] = u
                queue.append(w)
    return None


def generate(S: int, L: int, T: int = 3, H: int = 0, seed: int = 0, n_nets: Optional[int] = None,
             max_attempts: int = 50) -> tuple[GridSteinerInstance, frozenset]:
    """Route nets one after another, then carve holes away from the routing.

    Each net gets 2..T terminals on the top border; its tree grows by BFS paths
    from the partial tree to the next terminal over unused vertices. Holes are
    axis-aligned boxes up to max(1, S // 6) wide that may span several layers.
    """
    if T < 2:
        raise ValueError("nets need at least two terminals")
    if n_nets is None:
        n_nets = max(1, (2 * S) // 5)
    blank = GridSteinerInstance(S, L, frozenset(), ())
    border = sorted(v for v in ((x, y, 0) for x in range(S) for y in range(S)) if blank.on_top_border(v))
    failure = ""
    for attempt in range(max_attempts):
        rng = np.random.default_rng(np.random.SeedSequence([seed, S, L, T, H, n_nets, attempt]))
        order = [border[i] for i in rng.permutation(len(border))]
        sizes = [int(rng.integers(2, T + 1)) for _ in range(n_nets)]
        if sum(sizes) > len(order):
            raise ValueError(f"{n_nets} nets do not fit on {len(order)} border vertices")
        nets, pos = [], 0
        for k in sizes:
            nets.append(order[pos:pos + k])
            pos += k
        used = {v for net in nets for v in net}
        edges: set = set()
        ok = True
        for net in nets:
            tree = {net[0]}
            for t in net[1:]:
                path = _bfs_path(blank, tree, t, used - tree, rng)
                if path is None:
                    ok, failure = False, f"attempt {attempt}: terminal {t} unreachable"
                    break
                for a, b in zip(path, path[1:]):
                    edges.add(make_edge(a, b))
                tree.update(path)
            if not ok:
                break
            used |= tree
        if not ok:
            continue
        holes = _carve_holes(S, L, H, used, rng)
        if holes is None:
            failure = f"attempt {attempt}: could not place {H} holes"
            continue
        inst = GridSteinerInstance(S, L, frozenset(holes), tuple(frozenset(n) for n in nets))
        return inst, frozenset(edges)
    raise RuntimeError(f"generation failed after {max_attempts} attempts; last: {failure}")


def _carve_holes(S, L, H, used, rng, tries=500):
    holes = set()
    span = max(1, S // 6)
    for _ in range(H):
        for _ in range(tries):
            w, h = int(rng.integers(1, span + 1)), int(rng.integers(1, span + 1))
            d = int(rng.integers(1, L + 1))
            x0, y0 = int(rng.integers(0, S - w + 1)), int(rng.integers(0, S - h + 1))
            z0 = int(rng.integers(0, L - d + 1))
            box = {(x, y, z) for x in range(x0, x0 + w) for y in range(y0, y0 + h) for z in range(z0, z0 + d)}
            if not box & used and not box <= holes:
                holes |= box
                break
        else:
            return None
    return holes


# --- text formats --------------------------------------------------------------

def _node_id(inst, v: Vertex) -> int:
    x, y, z = v
    return 1 + x + inst.S * y + inst.S * inst.S * z


def _vertex(inst, k: int) -> Vertex:
    k -= 1
    return (k % inst.S, (k // inst.S) % inst.S, k // (inst.S * inst.S))


def grid_edges(inst: GridSteinerInstance) -> list[tuple[Vertex, Vertex]]:
    out = []
    for z in range(inst.L):
        for y in range(inst.S):
            for x in range(inst.S):
                u = (x, y, z)
                if u in inst.holes:
                    continue
                for w in ((x + 1, y, z), (x, y + 1, z), (x, y, z + 1)):
                    if inst.in_grid(w) and w not in inst.holes:
                        out.append((u, w))
    return out


def write_stp(inst: GridSteinerInstance) -> str:
    lines = ["33D32945 STP File, STP Format Version 1.0", f"# grid {inst.S} {inst.L}"]
    lines += [f"# hole {x} {y} {z}" for x, y, z in sorted(inst.holes)]
    edges = grid_edges(inst)
    lines += ["", "SECTION Graph", f"Nodes {inst.S * inst.S * inst.L}", f"Edges {len(edges)}"]
    lines += [f"E {_node_id(inst, u)} {_node_id(inst, v)} 1" for u, v in edges]
    lines += ["END", "", "SECTION Terminals", f"Terminals {sum(len(n) for n in inst.nets)}"]
    for k, net in enumerate(inst.nets, 1):
        lines += [f"T {_node_id(inst, v)} {k}" for v in sorted(net)]
    lines += ["END", "", "EOF"]
    return "\n".join(lines) + "\n"


def read_stp(text: str) -> GridSteinerInstance:
    S = L = None
    holes, terms, edges = set(), {}, []
    for ln in text.splitlines():
        tok = ln.split()
        if not tok:
            continue
        if tok[0] == "#" and len(tok) >= 4 and tok[1] == "grid":
            S, L = int(tok[2]), int(tok[3])
        elif tok[0] == "#" and len(tok) == 5 and tok[1] == "hole":
            holes.add(tuple(map(int, tok[2:])))
        elif tok[0] == "E" and len(tok) >= 3:
            edges.append((int(tok[1]), int(tok[2])))
        elif tok[0] == "T" and len(tok) == 3:
            terms.setdefault(int(tok[2]), []).append(int(tok[1]))
    if S is None:
        raise ValueError("missing '# grid S L' metadata")
    probe = GridSteinerInstance(S, L, frozenset(holes), ())
    nets = tuple(frozenset(_vertex(probe, v) for v in terms[k]) for k in sorted(terms))
    inst = GridSteinerInstance(S, L, frozenset(holes), nets)
    expected = {(_node_id(inst, u), _node_id(inst, v)) for u, v in grid_edges(inst)}
    if {tuple(sorted(e)) for e in edges} != expected:
        raise ValueError("graph section does not match the grid metadata")
    return inst


def write_solution(edges: Iterable) -> str:
    rows = sorted(tuple(sorted(map(tuple, e))) for e in edges)
    return "".join(f"{u[0]} {u[1]} {u[2]} {v[0]} {v[1]} {v[2]}\n" for u, v in rows)


def read_solution(text: str) -> frozenset:
    out = set()
    for ln in text.splitlines():
        if ln.strip() and not ln.startswith("#"):
            vals = list(map(int, ln.split()))
            if len(vals) != 6:
                raise ValueError(f"bad edge line {ln!r}")
            out.add(make_edge(tuple(vals[:3]), tuple(vals[3:])))
    return frozenset(out)
