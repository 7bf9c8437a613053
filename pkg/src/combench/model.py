"""Optimization-model IR (polynomial objective, linear constraints) and the
binary-form conversions: penalties, binarization, quadratization, SWAP masks."""
from __future__ import annotations

import enum
import itertools
import re
from collections import defaultdict
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

from .core import (DensityKind, ModelStats, ObjectiveSense, Violation,
                   density_classify)

Monomial = tuple[int, ...]


class Polynomial:
    """Integer-coefficient polynomial keyed by sorted index tuples (repeats allowed)."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Union[Mapping, Iterable, None] = None):
        acc: dict[Monomial, int] = defaultdict(int)
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        for mono, coeff in items:
            if not isinstance(coeff, int):
                if int(coeff) != coeff:
                    raise ValueError(f"non-integer coefficient {coeff!r}")
                coeff = int(coeff)
            acc[tuple(sorted(mono))] += coeff
        self._terms = MappingProxyType({m: c for m, c in acc.items() if c})

    @classmethod
    def constant(cls, c: int) -> "Polynomial":
        return cls({(): c})

    @classmethod
    def var(cls, i: int, coeff: int = 1) -> "Polynomial":
        return cls({(i,): coeff})

    @classmethod
    def linear(cls, coeffs: Mapping[int, int], const: int = 0) -> "Polynomial":
        terms = {(i,): c for i, c in coeffs.items()}
        terms[()] = const
        return cls(terms)

    @property
    def terms(self) -> Mapping[Monomial, int]:
        return self._terms

    @property
    def const(self) -> int:
        return self._terms.get((), 0)

    def degree(self) -> int:
        return max((len(m) for m in self._terms), default=0)

    def variables(self) -> set[int]:
        return {i for m in self._terms for i in m}

    def evaluate(self, x: Sequence[int]) -> int:
        total = 0
        for mono, c in self._terms.items():
            p = c
            for i in mono:
                p *= x[i]
                if not p:
                    break
            total += p
        return total

    def reduce_binary(self, binary: Optional[Iterable[int]] = None) -> "Polynomial":
        """Apply x*x = x for the given indices (all indices when ``binary`` is None)."""
        keep = None if binary is None else set(binary)
        out = []
        for mono, c in self._terms.items():
            if keep is None:
                mono = tuple(sorted(set(mono)))
            else:
                seen, reduced = set(), []
                for i in mono:
                    if i in keep:
                        if i in seen:
                            continue
                        seen.add(i)
                    reduced.append(i)
                mono = tuple(reduced)
            out.append((mono, c))
        return Polynomial(out)

    def substitute(self, mapping: Mapping[int, "Polynomial"]) -> "Polynomial":
        result: dict[Monomial, int] = defaultdict(int)
        for mono, c in self._terms.items():
            part = Polynomial.constant(c)
            rest = []
            for i in mono:
                if i in mapping:
                    part = part * mapping[i]
                else:
                    rest.append(i)
            for m2, c2 in part._terms.items():
                result[tuple(sorted(rest + list(m2)))] += c2
        return Polynomial(result)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, int):
            return Polynomial.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(itertools.chain(self._terms.items(), other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return Polynomial({m: c * other for m, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[Monomial, int] = defaultdict(int)
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                acc[tuple(sorted(m1 + m2))] += c1 * c2
        return Polynomial(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = Polynomial.constant(other)
        return isinstance(other, Polynomial) and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __len__(self):
        return len(self._terms)

    def __repr__(self):
        return f"Polynomial({dict(self._terms)!r})"


class VarKind(enum.Enum):
    BINARY = "binary"
    INTEGER = "integer"


@dataclass(frozen=True)
class VariableSpec:
    kind: VarKind = VarKind.BINARY
    lower: Optional[int] = 0
    upper: Optional[int] = 1

    def __post_init__(self):
        if self.kind is VarKind.BINARY:
            object.__setattr__(self, "lower", 0)
            object.__setattr__(self, "upper", 1)
        elif self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError("integer variable with lower > upper")

    @classmethod
    def binary(cls) -> "VariableSpec":
        return cls(VarKind.BINARY)

    @classmethod
    def integer(cls, lower: Optional[int], upper: Optional[int]) -> "VariableSpec":
        return cls(VarKind.INTEGER, lower, upper)

    @property
    def is_binary(self) -> bool:
        return self.kind is VarKind.BINARY

    @property
    def bounded(self) -> bool:
        return self.lower is not None and self.upper is not None


class Relation(enum.Enum):
    LE = "<="
    EQ = "="
    GE = ">="


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: Mapping[int, int]
    relation: Relation
    rhs: int
    name: str = ""

    def __post_init__(self):
        items = {int(i): int(c) for i, c in dict(self.coeffs).items() if c}
        if not items:
            raise ValueError("constraint without non-zero coefficients")
        object.__setattr__(self, "coeffs", MappingProxyType(dict(sorted(items.items()))))

    def activity(self, x: Sequence[int]) -> int:
        return sum(c * x[i] for i, c in self.coeffs.items())

    def excess(self, x: Sequence[int]) -> int:
        """Signed amount by which the constraint is violated (0 when satisfied)."""
        r = self.activity(x) - self.rhs
        if self.relation is Relation.EQ:
            return r
        if self.relation is Relation.LE:
            return max(r, 0)
        return min(r, 0)


@dataclass(frozen=True)
class Model:
    sense: ObjectiveSense
    variables: tuple[VariableSpec, ...]
    objective: Polynomial = field(default_factory=Polynomial)
    constraints: tuple[LinearConstraint, ...] = ()
    objective_scale: int = 1

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        n = len(self.variables)
        used = self.objective.variables()
        for c in self.constraints:
            used.update(c.coeffs)
        if any(i < 0 or i >= n for i in used):
            raise ValueError("model references an undeclared variable")
        if self.objective_scale < 1:
            raise ValueError("objective_scale must be positive")
        binary = [i for i, v in enumerate(self.variables) if v.is_binary]
        object.__setattr__(self, "objective", self.objective.reduce_binary(binary))

    @property
    def n(self) -> int:
        return len(self.variables)

    def all_binary(self) -> bool:
        return all(v.is_binary for v in self.variables)

    def evaluate(self, x: Sequence[int]) -> int:
        return self.objective.evaluate(x)

    def violations(self, x: Sequence[int]) -> list[Violation]:
        if len(x) != self.n:
            raise ValueError(f"expected {self.n} values, got {len(x)}")
        out = []
        for i, (v, xi) in enumerate(zip(self.variables, x)):
            if (v.lower is not None and xi < v.lower) or (v.upper is not None and xi > v.upper):
                out.append(Violation(f"bound[{i}]", f"value {xi} outside [{v.lower}, {v.upper}]", 1))
        for k, c in enumerate(self.constraints):
            e = c.excess(x)
            if e:
                out.append(Violation(c.name or f"c{k}", f"excess {e}", abs(e)))
        return out

    def is_feasible(self, x: Sequence[int]) -> bool:
        return not self.violations(x)


def _normalize_terms(terms) -> tuple[dict[Monomial, int], int]:
    items = terms.items() if isinstance(terms, Mapping) else terms
    poly = Polynomial(items).reduce_binary()
    offset = poly.const
    return {m: c for m, c in poly.terms.items() if m}, offset


@dataclass(frozen=True)
class Hubo:
    """Binary polynomial ``sum c * prod x + offset``; ``sense`` says which way to optimize."""

    n: int
    terms: Mapping[Monomial, int]
    offset: int = 0
    sense: ObjectiveSense = ObjectiveSense.MINIMIZE
    swap_layers: Optional[int] = None

    max_degree = None

    def __post_init__(self):
        terms, extra = _normalize_terms(self.terms)
        if any(m[-1] >= self.n or m[0] < 0 for m in terms):
            raise ValueError("monomial index out of range")
        if self.max_degree is not None and any(len(m) > self.max_degree for m in terms):
            raise ValueError(f"degree above {self.max_degree}")
        if self.sense is ObjectiveSense.FEASIBILITY:
            raise ValueError("binary forms must minimize or maximize")
        object.__setattr__(self, "terms", MappingProxyType(dict(sorted(terms.items()))))
        object.__setattr__(self, "offset", int(self.offset) + extra)

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def polynomial(self) -> Polynomial:
        return Polynomial(dict(self.terms)) + self.offset

    def energy(self, x: Sequence[int]) -> int:
        return energy(self, x)

    def cost_sign(self) -> int:
        """+1 when smaller energy is better, -1 otherwise."""
        return 1 if self.sense is ObjectiveSense.MINIMIZE else -1


@dataclass(frozen=True)
class Qubo(Hubo):
    max_degree = 2

    @classmethod
    def from_hubo(cls, h: Hubo) -> "Qubo":
        return cls(h.n, h.terms, h.offset, h.sense, h.swap_layers)


def energy(q: Hubo, x: Sequence[int]) -> int:
    if len(x) != q.n:
        raise ValueError(f"expected {q.n} bits, got {len(x)}")
    total = q.offset
    for mono, c in q.terms.items():
        if all(x[i] for i in mono):
            total += c
    return total


def as_binary_form(model: Model) -> Hubo:
    """Unconstrained all-binary model viewed as a Hubo (or Qubo when quadratic)."""
    if not model.all_binary() or model.constraints:
        raise ValueError("only unconstrained binary models convert directly")
    sense = ObjectiveSense.MINIMIZE if model.sense is ObjectiveSense.FEASIBILITY else model.sense
    h = Hubo(model.n, model.objective.terms, 0, sense)
    return Qubo.from_hubo(h) if h.degree() <= 2 else h


# --- penalties ---------------------------------------------------------------

class PenaltyResult(NamedTuple):
    hubo: Hubo
    penalty: int
    penalty_min: int

    @property
    def certified(self) -> bool:
        return self.penalty >= self.penalty_min


def objective_range_bound(poly: Polynomial) -> int:
    """Upper bound on max - min of a binary polynomial over the box."""
    return sum(abs(c) for m, c in poly.terms.items() if m)


def penalty_unconstrain(model: Model, M: Optional[int] = None) -> PenaltyResult:
    """Fold equality constraints into the objective as ``M * residual**2``.

    The returned ``penalty_min`` exceeds the objective's spread over the box, so
    any infeasible point scores strictly worse than every feasible one.
    """
    if not model.all_binary():
        raise ValueError("penalty_unconstrain needs binary variables; binarize first")
    for c in model.constraints:
        if c.relation is not Relation.EQ:
            raise ValueError(f"inequality {c.name or c} must be slacked before penalizing")
    f = model.objective if model.sense is not ObjectiveSense.FEASIBILITY else Polynomial()
    m_min = 1 + objective_range_bound(f)
    if M is None:
        M = m_min
    if M <= 0:
        raise ValueError("penalty weight must be positive")
    pen = Polynomial()
    for c in model.constraints:
        r = Polynomial.linear(c.coeffs, -c.rhs)
        pen = pen + r * r
    if model.sense is ObjectiveSense.MAXIMIZE:
        total, sense = f - pen * M, ObjectiveSense.MAXIMIZE
    else:
        total, sense = f + pen * M, ObjectiveSense.MINIMIZE
    total = total.reduce_binary()
    h = Hubo(model.n, total.terms, 0, sense)
    if h.degree() <= 2:
        h = Qubo.from_hubo(h)
    return PenaltyResult(h, M, m_min)


def add_slack(model: Model) -> Model:
    """Turn each inequality into an equality with a bounded integer slack variable."""
    variables = list(model.variables)
    constraints = []
    for c in model.constraints:
        if c.relation is Relation.EQ:
            constraints.append(c)
            continue
        lo = hi = 0
        for i, a in c.coeffs.items():
            v = variables[i]
            if not v.bounded:
                raise ValueError("slack needs bounded variables")
            lo += min(a * v.lower, a * v.upper)
            hi += max(a * v.lower, a * v.upper)
        coeffs = dict(c.coeffs)
        # activity + s = rhs (Le) or activity - s = rhs (Ge), s >= 0
        span = c.rhs - lo if c.relation is Relation.LE else hi - c.rhs
        if span < 0:
            raise ValueError(f"constraint {c.name or c} cannot be satisfied")
        s = len(variables)
        variables.append(VariableSpec.integer(0, span) if span > 1 else VariableSpec.binary())
        coeffs[s] = 1 if c.relation is Relation.LE else -1
        constraints.append(LinearConstraint(coeffs, Relation.EQ, c.rhs, c.name))
    return replace(model, variables=tuple(variables), constraints=tuple(constraints))


# --- binarization ------------------------------------------------------------

def binary_weights(span: int) -> list[int]:
    """Powers of two with a truncated last weight so the sums cover exactly [0, span]."""
    weights, total, w = [], 0, 1
    while total + w <= span:
        weights.append(w)
        total += w
        w *= 2
    if total < span:
        weights.append(span - total)
    return weights


@dataclass(frozen=True)
class BinaryEncoding:
    """Per original variable: (offset, ((binary index, weight), ...))."""

    n_binary: int
    parts: tuple[tuple[int, tuple[tuple[int, int], ...]], ...]

    def decode(self, bits: Sequence[int]) -> list[int]:
        if len(bits) != self.n_binary:
            raise ValueError("bit vector has the wrong length")
        return [off + sum(w * bits[i] for i, w in ws) for off, ws in self.parts]

    def encode(self, values: Sequence[int]) -> list[int]:
        bits = [0] * self.n_binary
        for value, (off, ws) in zip(values, self.parts):
            rest = value - off
            if rest < 0 or rest > sum(w for _, w in ws):
                raise ValueError(f"value {value} outside the encoded range")
            powers = list(itertools.takewhile(lambda t: t[1][1] == 1 << t[0], enumerate(ws)))
            powers = [iw for _, iw in powers]
            tail = ws[len(powers):]
            if rest > sum(w for _, w in powers):
                i, w = tail[0]
                bits[i] = 1
                rest -= w
            for k, (i, w) in enumerate(powers):
                bits[i] = (rest >> k) & 1
        return bits


def binarize_integers(model: Model) -> tuple[Model, BinaryEncoding]:
    parts, mapping, variables = [], {}, []
    for idx, v in enumerate(model.variables):
        if v.is_binary:
            b = len(variables)
            variables.append(VariableSpec.binary())
            parts.append((0, ((b, 1),)))
            mapping[idx] = Polynomial.var(b)
            continue
        if not v.bounded:
            raise ValueError(f"variable {idx} is unbounded; binarization needs finite bounds")
        ws = []
        for w in binary_weights(v.upper - v.lower):
            ws.append((len(variables), w))
            variables.append(VariableSpec.binary())
        parts.append((v.lower, tuple(ws)))
        mapping[idx] = Polynomial.linear({i: w for i, w in ws}, v.lower)
    objective = model.objective.substitute(mapping).reduce_binary()
    constraints = []
    for c in model.constraints:
        coeffs: dict[int, int] = defaultdict(int)
        rhs = c.rhs
        for i, a in c.coeffs.items():
            off, ws = parts[i]
            rhs -= a * off
            for j, w in ws:
                coeffs[j] += a * w
        coeffs = {j: a for j, a in coeffs.items() if a}
        if not coeffs:
            # all variables fixed; keep feasibility information as 0-row check
            if not _constant_row_ok(c.relation, rhs):
                raise ValueError(f"constraint {c.name} is infeasible after fixing variables")
            continue
        constraints.append(LinearConstraint(coeffs, c.relation, rhs, c.name))
    enc = BinaryEncoding(len(variables), tuple(parts))
    return Model(model.sense, tuple(variables), objective, tuple(constraints), model.objective_scale), enc


def _constant_row_ok(rel: Relation, rhs: int) -> bool:
    return {Relation.EQ: rhs == 0, Relation.LE: 0 <= rhs, Relation.GE: 0 >= rhs}[rel]


# --- quadratization ----------------------------------------------------------

def quadratize(hubo: Hubo) -> tuple[Qubo, dict[int, tuple[int, int]]]:
    """Reduce degree by substituting y = x_a x_b with a Rosenberg penalty.

    The most frequent pair among monomials of degree > 2 goes first, ties to the
    lexicographically smallest pair.
    """
    if hubo.degree() <= 2:
        return Qubo.from_hubo(hubo), {}
    weight = 1 + sum(abs(c) for c in hubo.terms.values())
    sign = hubo.cost_sign()
    monos: list[list] = []            # [sorted index list, coeff]
    low: dict[Monomial, int] = defaultdict(int)
    pair_members: dict[tuple[int, int], set[int]] = defaultdict(set)
    for mono, c in hubo.terms.items():
        if len(mono) <= 2:
            low[mono] += c
            continue
        k = len(monos)
        monos.append([list(mono), c])
        for p in itertools.combinations(mono, 2):
            pair_members[p].add(k)
    n = hubo.n
    aux: dict[int, tuple[int, int]] = {}
    while pair_members:
        best = min(pair_members, key=lambda p: (-len(pair_members[p]), p))
        a, b = best
        y = n
        n += 1
        aux[y] = (a, b)
        for k in sorted(pair_members[best]):
            mono = monos[k][0]
            for p in itertools.combinations(mono, 2):
                s = pair_members.get(p)
                if s is not None:
                    s.discard(k)
                    if not s:
                        del pair_members[p]
            mono = [i for i in mono if i != a and i != b] + [y]
            monos[k][0] = mono
            if len(mono) > 2:
                for p in itertools.combinations(sorted(mono), 2):
                    pair_members[p].add(k)
        pair_members.pop(best, None)
        pen = sign * weight
        low[(a, b)] += pen
        low[(a, y)] -= 2 * pen
        low[(b, y)] -= 2 * pen
        low[(y,)] += 3 * pen
    for mono, c in monos:
        low[tuple(sorted(mono))] += c
    q = Qubo(n, dict(low), hubo.offset, hubo.sense)
    return q, aux


# --- SWAP-network mask -------------------------------------------------------

def swap_distances(n: int) -> dict[tuple[int, int], int]:
    """Layer at which each logical pair first sits on neighbouring line positions.

    Layer 0 is the initial line; layer L applies the brick of swaps on
    positions (p, p+1) with p = L-1 mod 2. All pairs meet by layer n-2.
    """
    where = list(range(n))      # position -> logical qubit
    dist: dict[tuple[int, int], int] = {}
    layer = 0
    while True:
        for p in range(n - 1):
            a, b = where[p], where[p + 1]
            dist.setdefault((min(a, b), max(a, b)), layer)
        if len(dist) == n * (n - 1) // 2:
            return dist
        layer += 1
        for p in range((layer - 1) % 2, n - 1, 2):
            where[p], where[p + 1] = where[p + 1], where[p]


def _components(n: int, edges: Iterable[tuple[int, int]], nodes: Iterable[int]) -> int:
    parent = list(range(n))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(u) for u in nodes})


def swap_mask(qubo: Qubo, k: int) -> Qubo:
    """Keep couplings realizable within ``k`` SWAP layers on a line of qubits."""
    n = qubo.n
    if not 0 <= k <= max(n - 2, 0):
        raise ValueError(f"layer count must lie in [0, {max(n - 2, 0)}]")
    dist = swap_distances(n) if n >= 2 else {}
    kept = {m: c for m, c in qubo.terms.items() if len(m) < 2 or dist[m] <= k}
    nodes = {i for m in qubo.terms if len(m) == 2 for i in m}
    before = _components(n, [m for m in qubo.terms if len(m) == 2], nodes)
    after = _components(n, [m for m in kept if len(m) == 2], nodes)
    if after > before:
        raise ValueError(f"masking with k={k} disconnects the coupling graph ({before} -> {after} components)")
    return Qubo(n, kept, qubo.offset, qubo.sense, k)


# --- statistics --------------------------------------------------------------

def model_stats(model: Union[Model, Hubo]) -> ModelStats:
    if isinstance(model, Hubo):
        coeffs = [abs(c) for c in model.terms.values()]
        nnz = len(coeffs)
        n_con = 0
        density = density_classify(max(model.n, 1), 0, nnz, DensityKind.QUBO_UPPER_TRIANGLE)
        n_vars = model.n
    else:
        coeffs = [abs(c) for m, c in model.objective.terms.items() if m]
        a_nnz = 0
        for c in model.constraints:
            coeffs.extend(abs(v) for v in c.coeffs.values())
            a_nnz += len(c.coeffs)
        nnz = len(coeffs)
        n_con = len(model.constraints)
        n_vars = model.n
        density = density_classify(max(n_vars, 1), n_con, a_nnz, DensityKind.MIP_CONSTRAINT_MATRIX)
    return ModelStats(n_vars, n_con, nnz, min(coeffs, default=None), max(coeffs, default=None), density)


# --- text formats --------------------------------------------------------------

def write_hubo(q: Hubo) -> str:
    kind = "QUBO" if isinstance(q, Qubo) else "HUBO"
    head = f"{kind} n {q.n} offset {q.offset}"
    if q.sense is ObjectiveSense.MAXIMIZE:
        head += " sense max"
    if q.swap_layers is not None:
        head += f" swap_layers {q.swap_layers}"
    lines = [head]
    for mono, c in q.terms.items():
        if kind == "QUBO":
            i, j = (mono[0], mono[0]) if len(mono) == 1 else mono
            lines.append(f"{i} {j} {c}")
        else:
            lines.append(" ".join(map(str, (len(mono),) + mono + (c,))))
    return "\n".join(lines) + "\n"


def read_hubo(text: str) -> Hubo:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or rows[0][0] not in ("QUBO", "HUBO"):
        raise ValueError("missing QUBO/HUBO header")
    head = rows[0]
    kind = head[0]
    opts = dict(zip(head[1::2], head[2::2]))
    try:
        n, offset = int(opts["n"]), int(opts.get("offset", 0))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad header {' '.join(head)!r}") from exc
    sense = ObjectiveSense.MAXIMIZE if opts.get("sense") == "max" else ObjectiveSense.MINIMIZE
    layers = int(opts["swap_layers"]) if "swap_layers" in opts else None
    terms: dict[Monomial, int] = defaultdict(int)
    for r in rows[1:]:
        vals = [int(t) for t in r]
        if kind == "QUBO":
            if len(vals) != 3:
                raise ValueError(f"bad QUBO line {' '.join(r)!r}")
            i, j, c = vals
            if i > j:
                raise ValueError("QUBO lines must have i <= j")
            terms[(i,) if i == j else (i, j)] += c
        else:
            d = vals[0]
            if len(vals) != d + 2:
                raise ValueError(f"bad HUBO line {' '.join(r)!r}")
            terms[tuple(sorted(vals[1:d + 1]))] += vals[-1]
    cls = Qubo if kind == "QUBO" else Hubo
    return cls(n, dict(terms), offset, sense, layers)


def _fmt_terms(poly_terms) -> str:
    parts = []
    for mono, c in poly_terms:
        sign = "-" if c < 0 else "+"
        body = " ".join([str(abs(c))] + [f"x{i}" for i in mono])
        parts.append(f"{sign} {body}")
    if not parts:
        return "0"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def write_model(model: Model) -> str:
    """LP-flavoured text; product terms are written as ``c xi xj ...``."""
    head = {ObjectiveSense.MINIMIZE: "Minimize", ObjectiveSense.MAXIMIZE: "Maximize",
            ObjectiveSense.FEASIBILITY: "Feasibility"}[model.sense]
    lines = [head, f" obj: {_fmt_terms(sorted(model.objective.terms.items(), key=lambda t: (len(t[0]), t[0])))}"]
    if model.objective_scale != 1:
        lines += ["Scale", f" {model.objective_scale}"]
    lines.append("Subject To")
    for k, c in enumerate(model.constraints):
        name = c.name or f"c{k}"
        lines.append(f" {name}: {_fmt_terms(((i,), a) for i, a in c.coeffs.items())} {c.relation.value} {c.rhs}")
    ints = [i for i, v in enumerate(model.variables) if not v.is_binary]
    if ints:
        lines.append("Bounds")
        for i in ints:
            v = model.variables[i]
            lo = "-inf" if v.lower is None else v.lower
            hi = "+inf" if v.upper is None else v.upper
            lines.append(f" {lo} <= x{i} <= {hi}")
    bins = [i for i, v in enumerate(model.variables) if v.is_binary]
    lines.append("Binaries")
    lines.extend(f" x{i}" for i in bins)
    lines.append("Generals")
    lines.extend(f" x{i}" for i in ints)
    lines.append(f"End n {model.n}")
    return "\n".join(lines) + "\n"


def _parse_expr(text: str) -> list[tuple[Monomial, int]]:
    terms, sign, coeff, mono, started = [], 1, None, [], False
    text = text.strip()
    if text == "0":
        return []
    for tok in text.split():
        if tok in "+-":
            if started:
                terms.append((tuple(mono), sign * (1 if coeff is None else coeff)))
            sign, coeff, mono, started = (1 if tok == "+" else -1), None, [], True
        elif tok.isdigit():
            coeff, started = int(tok), True
        elif re.fullmatch(r"x\d+", tok):
            mono.append(int(tok[1:]))
            started = True
        else:
            raise ValueError(f"unexpected token {tok!r}")
    if started:
        terms.append((tuple(mono), sign * (1 if coeff is None else coeff)))
    return terms


def read_model(text: str) -> Model:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("\\")]
    senses = {"Minimize": ObjectiveSense.MINIMIZE, "Maximize": ObjectiveSense.MAXIMIZE,
              "Feasibility": ObjectiveSense.FEASIBILITY}
    if not lines or lines[0] not in senses:
        raise ValueError("model text must start with Minimize/Maximize/Feasibility")
    sense = senses[lines[0]]
    section, objective, scale, cons, bounds, ints, n = "obj", [], 1, [], {}, set(), None
    for ln in lines[1:]:
        if ln in ("Scale", "Subject To", "Bounds", "Binaries", "Generals"):
            section = ln
            continue
        if ln.startswith("End"):
            bits = ln.split()
            if len(bits) == 3 and bits[1] == "n":
                n = int(bits[2])
            break
        if section == "obj":
            _, _, expr = ln.partition(":")
            objective = _parse_expr(expr)
        elif section == "Scale":
            scale = int(ln)
        elif section == "Subject To":
            name, _, rest = ln.partition(":")
            m = re.fullmatch(r"(.*?)\s*(<=|>=|=)\s*(-?\d+)", rest.strip())
            if not m:
                raise ValueError(f"bad constraint line {ln!r}")
            coeffs: dict[int, int] = defaultdict(int)
            for mono, c in _parse_expr(m.group(1)):
                if len(mono) != 1:
                    raise ValueError(f"non-linear constraint term in {ln!r}")
                coeffs[mono[0]] += c
            cons.append(LinearConstraint(coeffs, Relation(m.group(2)), int(m.group(3)), name.strip()))
        elif section == "Bounds":
            m = re.fullmatch(r"(\S+)\s*<=\s*x(\d+)\s*<=\s*(\S+)", ln)
            if not m:
                raise ValueError(f"bad bound line {ln!r}")
            lo = None if m.group(1) == "-inf" else int(m.group(1))
            hi = None if m.group(3) in ("+inf", "inf") else int(m.group(3))
            bounds[int(m.group(2))] = (lo, hi)
        elif section == "Generals":
            ints.update(int(t[1:]) for t in ln.split())
        elif section == "Binaries":
            pass
    used = {i for mono, _ in objective for i in mono} | {i for c in cons for i in c.coeffs} | ints
    if n is None:
        n = max(used, default=-1) + 1
    variables = [VariableSpec.integer(*bounds.get(i, (0, None))) if i in ints else VariableSpec.binary()
                 for i in range(n)]
    return Model(sense, tuple(variables), Polynomial(objective), tuple(cons), scale)
