"""Scaled doubly stochastic matrices, Birkhoff decompositions and the compact
permutation encodings (Lehmer index, combinatorial number system)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class ScaledDoublyStochastic:
    """Integer matrix whose rows and columns all sum to ``s``."""

    s: int
    M: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        M = tuple(tuple(int(v) for v in row) for row in self.M)
        n = len(M)
        if n == 0 or any(len(r) != n for r in M):
            raise ValueError("matrix must be square and non-empty")
        if self.s <= 0:
            raise ValueError("scale must be positive")
        if any(v < 0 for r in M for v in r):
            raise ValueError("entries must be non-negative")
        if any(sum(r) != self.s for r in M) or any(sum(col) != self.s for col in zip(*M)):
            raise ValueError(f"every row and column must sum to {self.s}")
        object.__setattr__(self, "M", M)

    @property
    def n(self) -> int:
        return len(self.M)


def _check_perm(p: Sequence[int]) -> tuple[int, ...]:
    p = tuple(int(v) for v in p)
    if sorted(p) != list(range(1, len(p) + 1)):
        raise ValueError(f"{list(p)} is not a permutation of 1..{len(p)}")
    return p


@dataclass(frozen=True)
class Decomposition:
    """Weighted permutations; ``p[i]`` is the (1-based) column of row i's one."""

    items: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        items = tuple((int(c), _check_perm(p)) for c, p in self.items)
        if any(c < 0 for c, _ in items):
            raise ValueError("weights must be non-negative")
        perms = [p for c, p in items if c > 0]
        if len(set(perms)) != len(perms):
            raise ValueError("permutations must be pairwise distinct")
        object.__setattr__(self, "items", items)

    @property
    def length(self) -> int:
        return sum(1 for c, _ in self.items if c > 0)

    @property
    def total_weight(self) -> int:
        return sum(c for c, _ in self.items)


def verify(D: ScaledDoublyStochastic, dec: Decomposition) -> tuple[int, int]:
    """(number of permutations used, largest absolute entry of the residual)."""
    n = D.n
    R = np.array(D.M, dtype=object)
    for c, p in dec.items:
        if len(p) != n:
            raise ValueError(f"permutation of size {len(p)} for an n={n} matrix")
        for i, col in enumerate(p):
            R[i, col - 1] -= c
    residual = max(abs(int(v)) for v in R.flat)
    return dec.length, residual


def is_exact(D: ScaledDoublyStochastic, dec: Decomposition) -> bool:
    return verify(D, dec)[1] == 0 and dec.total_weight == D.s


def _random_composition(total: int, parts: int, rng: np.random.Generator) -> list[int]:
    cuts = np.sort(rng.choice(np.arange(1, total), size=parts - 1, replace=False)) if parts > 1 else []
    edges = [0, *map(int, cuts), total]
    return [b - a for a, b in zip(edges, edges[1:])]


def generate(n: int, density: str = "sparse", seed: int = 0, digits: Optional[int] = None,
             n_perms: Optional[int] = None) -> tuple[ScaledDoublyStochastic, Decomposition]:
    """Sum of ``n`` (sparse) or ``n*n`` (dense) distinct random permutations.

    Weights are positive integers summing to ``s = 10**digits``. The returned
    decomposition is a feasibility witness, not necessarily a shortest one.
    """
    if density not in ("sparse", "dense"):
        raise ValueError("density must be 'sparse' or 'dense'")
    k = n_perms if n_perms is not None else (n if density == "sparse" else n * n)
    k = min(k, math.factorial(n))
    if k < 1:
        raise ValueError("need at least one permutation")
    if digits is None:
        digits = len(str(k)) + 1
    s = 10 ** digits
    if s < k:
        raise ValueError(f"scale 10**{digits} is too small for {k} positive weights")
    rng = np.random.default_rng(np.random.SeedSequence([seed, n, k, digits]))
    perms: list[tuple[int, ...]] = []
    seen = set()
    while len(perms) < k:
        p = tuple(int(v) + 1 for v in rng.permutation(n))
        if p not in seen:
            seen.add(p)
            perms.append(p)
    weights = _random_composition(s, k, rng)
    M = [[0] * n for _ in range(n)]
    for c, p in zip(weights, perms):
        for i, col in enumerate(p):
            M[i][col - 1] += c
    return ScaledDoublyStochastic(s, tuple(map(tuple, M))), Decomposition(tuple(zip(weights, perms)))


def _augment(row: int, support, match_col, seen) -> bool:
    for col in support[row]:
        if col in seen:
            continue
        seen.add(col)
        if match_col[col] < 0 or _augment(match_col[col], support, match_col, seen):
            match_col[col] = row
            return True
    return False


def greedy_decompose(D: ScaledDoublyStochastic) -> Decomposition:
    """Classical Birkhoff algorithm: peel off a perfect matching on the positive
    support, weighted by its smallest entry, until nothing is left.

    The matching is kept between steps and only rows whose matched entry hit
    zero are re-augmented.
    """
    n = D.n
    R = [list(r) for r in D.M]
    match_col = [-1] * n
    items = []
    while any(any(r) for r in R):
        support = [[j for j in range(n) if R[i][j] > 0] for i in range(n)]
        row_of = {c: r for c, r in enumerate(match_col) if r >= 0}
        for c, r in list(row_of.items()):
            if R[r][c] == 0:
                match_col[c] = -1
        matched_rows = {r for r in match_col if r >= 0}
        for r in range(n):
            if r not in matched_rows and not _augment(r, support, match_col, set()):
                raise RuntimeError("no perfect matching: input is not doubly stochastic")
        perm = [0] * n
        for c, r in enumerate(match_col):
            perm[r] = c + 1
        w = min(R[i][perm[i] - 1] for i in range(n))
        for i in range(n):
            R[i][perm[i] - 1] -= w
        items.append((w, tuple(perm)))
    return Decomposition(tuple(items))


# --- encodings ---------------------------------------------------------------

def lehmer_code(p: Sequence[int]) -> list[int]:
    p = _check_perm(p)
    return [sum(1 for j in range(i) if p[j] < p[i]) for i in range(len(p))]


def lehmer_encode(p: Sequence[int]) -> int:
    """Index in [0, n!) from the Lehmer array weighted by factorials."""
    return sum(math.factorial(i) * li for i, li in enumerate(lehmer_code(p)))


def lehmer_decode(index: int, n: int) -> tuple[int, ...]:
    if not 0 <= index < math.factorial(n):
        raise ValueError(f"index {index} outside [0, {n}!)")
    code = [(index // math.factorial(i)) % (i + 1) for i in range(n)]
    remaining = list(range(1, n + 1))
    p = [0] * n
    for i in range(n - 1, -1, -1):
        p[i] = remaining.pop(code[i])
    return tuple(p)


def index_bits(n: int) -> int:
    return (math.factorial(n) - 1).bit_length()


def to_bitstring(index: int, width: int) -> str:
    if index < 0 or index.bit_length() > width:
        raise ValueError(f"{index} does not fit in {width} bits")
    return format(index, f"0{width}b") if width else ""


def permutation_from_bits(bits: str, n: int) -> tuple[int, ...]:
    """Decode a bitstring to a permutation; strings for indices >= n! are rejected."""
    return lehmer_decode(int(bits, 2) if bits else 0, n)


def cns_encode(indices: Iterable[int]) -> int:
    a = sorted(int(v) for v in indices)
    if len(set(a)) != len(a):
        raise ValueError("indices must be distinct")
    if a and a[0] < 0:
        raise ValueError("indices must be non-negative")
    return sum(math.comb(v, i) for i, v in enumerate(a, 1))


def cns_decode(code: int, k: int) -> list[int]:
    if code < 0:
        raise ValueError("code must be non-negative")
    out = []
    for i in range(k, 0, -1):
        v = i - 1
        while math.comb(v + 1, i) <= code:
            v += 1
        out.append(v)
        code -= math.comb(v, i)
    return sorted(out)


def qubit_count(n: int, k: int) -> int:
    """Bits needed to index every k-subset of the n! permutations."""
    total = math.factorial(n)
    if not 0 <= k <= total:
        raise ValueError(f"k must lie in [0, {n}!]")
    return (math.comb(total, k) - 1).bit_length()


# --- text formats --------------------------------------------------------------

def write_matrix(D: ScaledDoublyStochastic) -> str:
    return "\n".join([f"{D.n} {D.s}"] + [" ".join(map(str, r)) for r in D.M]) + "\n"


def read_matrix(text: str) -> ScaledDoublyStochastic:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise ValueError("missing 'n s' header")
    n, s = map(int, rows[0])
    if len(rows) != n + 1:
        raise ValueError(f"expected {n} matrix rows")
    return ScaledDoublyStochastic(s, tuple(tuple(map(int, r)) for r in rows[1:]))


def write_decomposition(dec: Decomposition) -> str:
    return "".join(f"{c} {' '.join(map(str, p))}\n" for c, p in dec.items)


def read_decomposition(text: str) -> Decomposition:
    items = []
    for ln in text.splitlines():
        if ln.strip() and not ln.startswith("#"):
            vals = list(map(int, ln.split()))
            items.append((vals[0], tuple(vals[1:])))
    return Decomposition(tuple(items))
