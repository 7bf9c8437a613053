"""Multiperiod binary portfolio selection with transaction, short-selling and
cash-interest terms, evaluated in exact rational arithmetic.

Each period uses an expanded vector of 2*k*n slots: the first k*n slots are long
units (k per asset), the remaining k*n are short units. Slot e belongs to asset
``(e % (k*n)) // k`` and carries sign +1 (long) or -1 (short).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import ObjectiveSense, Verdict, Violation
from .model import LinearConstraint, Model, Polynomial, Relation, VariableSpec

NU = Fraction(1, 10_000)        # risk-free rate per period
DELTA = Fraction(1, 1_000)      # transaction cost rate
RHO = Fraction(25, 1_000_000)   # loan rate on short positions
CASH_UNITS = 10
UNITS_PER_ASSET = 3

# position bounds used for the published size grid; other n fall back to 2n/5
_B_BY_N = {10: 4, 50: 20, 200: 50, 400: 100}

PRICE_DIGITS = 4
COV_DIGITS = 8


def _frac_matrix(rows) -> tuple:
    return tuple(tuple(Fraction(v) for v in r) for r in rows)


@dataclass(frozen=True)
class PortfolioInstance:
    n: int
    m: int
    k: int
    B: int
    C: int
    u: Fraction
    lam: Fraction
    nu: Fraction
    delta: Fraction
    rho: Fraction
    prices: tuple            # n rows of m prices
    cov: tuple               # m matrices of n x n covariances
    shortable: frozenset = frozenset()

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.k < 1 or self.C < 1 or self.B < 0:
            raise ValueError("n, m, k, C must be positive and B non-negative")
        for name in ("u", "lam", "nu", "delta", "rho"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        prices = _frac_matrix(self.prices)
        if len(prices) != self.n or any(len(r) != self.m for r in prices):
            raise ValueError("prices must be n rows of m values")
        if any(p < 0 for r in prices for p in r):
            raise ValueError("prices must be non-negative")
        cov = tuple(_frac_matrix(S) for S in self.cov)
        if len(cov) != self.m or any(len(S) != self.n or any(len(r) != self.n for r in S) for S in cov):
            raise ValueError("cov must hold m matrices of size n x n")
        for t, S in enumerate(cov):
            if any(S[i][j] != S[j][i] for i in range(self.n) for j in range(i)):
                raise ValueError(f"covariance of period {t + 1} is not symmetric")
        shortable = frozenset(int(a) for a in self.shortable)
        if any(not 0 <= a < self.n for a in shortable):
            raise ValueError("shortable asset index out of range")
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "shortable", shortable)

    @property
    def n_slots(self) -> int:
        return 2 * self.k * self.n

    @property
    def n_cash_bits(self) -> int:
        return math.floor(math.log2(self.C)) + 1

    def asset_of(self, e: int) -> int:
        return (e % (self.k * self.n)) // self.k

    def sign(self, e: int) -> int:
        return 1 if e < self.k * self.n else -1

    def short_slots(self) -> list[int]:
        return [e for e in range(self.k * self.n, self.n_slots) if self.asset_of(e) in self.shortable]

    def price(self, e: int, t: int) -> Fraction:
        return self.prices[self.asset_of(e)][t]

    def min_eigenvalues(self) -> list[float]:
        return [float(np.linalg.eigvalsh(np.array(S, dtype=float)).min()) if self.n else 0.0 for S in self.cov]


@dataclass(frozen=True)
class PortfolioSolution:
    x: tuple   # n_slots rows of m bits
    y: tuple   # n_cash_bits rows of m bits

    def __post_init__(self):
        x = tuple(tuple(int(v) for v in r) for r in self.x)
        y = tuple(tuple(int(v) for v in r) for r in self.y)
        if any(v not in (0, 1) for r in x + y for v in r):
            raise ValueError("solution entries must be binary")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def all_cash(cls, inst: PortfolioInstance) -> "PortfolioSolution":
        """No positions; cash bits hold the greedy binary encoding of C (or as close as the bits allow)."""
        bits = [(inst.C >> c) & 1 for c in range(inst.n_cash_bits)]
        return cls(tuple((0,) * inst.m for _ in range(inst.n_slots)),
                   tuple((b,) * inst.m for b in bits))


def _check_dims(inst: PortfolioInstance, sol: PortfolioSolution):
    if len(sol.x) != inst.n_slots or any(len(r) != inst.m for r in sol.x):
        raise ValueError(f"x must be {inst.n_slots} x {inst.m}")
    if len(sol.y) != inst.n_cash_bits or any(len(r) != inst.m for r in sol.y):
        raise ValueError(f"y must be {inst.n_cash_bits} x {inst.m}")


def _ranges(inst: PortfolioInstance, full_range: bool):
    N = inst.n_slots
    ret = range(N) if full_range else range(N - 1)
    trans = range(N) if full_range else range(1, N)
    return ret, trans


def objective_value(inst: PortfolioInstance, sol: PortfolioSolution, full_range: bool = False) -> Fraction:
    """Exact objective. Returns cover periods 1..m-1 (the last has no successor
    price), in-horizon rebalancing covers periods 2..m, and the first purchase
    and final liquidation are charged separately. ``full_range`` lifts the
    slot truncation on the return and rebalancing sums."""
    _check_dims(inst, sol)
    x, m, N = sol.x, inst.m, inst.n_slots
    ret, trans = _ranges(inst, full_range)
    total = Fraction(0)
    for t in range(m):
        held = [e for e in range(N) if x[e][t]]
        S = inst.cov[t]
        risk = Fraction(0)
        for e in held:
            we = inst.sign(e) * inst.price(e, t)
            for f in held:
                risk += we * S[inst.asset_of(e)][inst.asset_of(f)] * inst.sign(f) * inst.price(f, t)
        total += inst.lam * risk
        if t + 1 < m:
            total -= sum((inst.sign(e) * (inst.price(e, t + 1) - inst.price(e, t)) for e in ret if x[e][t]),
                         Fraction(0))
        if t >= 1:
            total += inst.delta * sum((inst.price(e, t) for e in trans if x[e][t - 1] != x[e][t]), Fraction(0))
        total -= inst.nu * inst.u * sum((1 << c) * sol.y[c][t] for c in range(inst.n_cash_bits))
        total += inst.rho * sum((inst.price(f, t) for f in inst.short_slots() if x[f][t]), Fraction(0))
    total += inst.delta * sum((inst.price(e, 0) * x[e][0] + inst.price(e, m - 1) * x[e][m - 1] for e in range(N)),
                              Fraction(0))
    return total


def constraint_violations(inst: PortfolioInstance, sol: PortfolioSolution) -> list[Violation]:
    _check_dims(inst, sol)
    out = []
    for t in range(inst.m):
        net = sum(inst.sign(e) * sol.x[e][t] for e in range(inst.n_slots))
        cash = sum((1 << c) * sol.y[c][t] for c in range(inst.n_cash_bits))
        if net + cash != inst.C:
            out.append(Violation(f"cash[{t + 1}]", f"net {net} + cash {cash} != {inst.C}", abs(net + cash - inst.C)))
        held = sum(sol.x[e][t] for e in range(inst.n_slots))
        if held > inst.B:
            out.append(Violation(f"assets[{t + 1}]", f"{held} positions > {inst.B}", held - inst.B))
    return out


def evaluate(inst: PortfolioInstance, sol: PortfolioSolution, full_range: bool = False) -> Verdict:
    value = objective_value(inst, sol, full_range)
    return Verdict.from_violations(constraint_violations(inst, sol), objective=value,
                                   sense=ObjectiveSense.MINIMIZE, info={"objective": value})


# --- model ----------------------------------------------------------------------

def x_index(inst: PortfolioInstance, e: int, t: int) -> int:
    return t * inst.n_slots + e


def y_index(inst: PortfolioInstance, c: int, t: int) -> int:
    return inst.m * inst.n_slots + t * inst.n_cash_bits + c


def _objective_terms(inst: PortfolioInstance, full_range: bool) -> dict:
    terms: dict[tuple, Fraction] = {}

    def add(mono, c):
        if c:
            key = tuple(sorted(mono))
            terms[key] = terms.get(key, Fraction(0)) + c

    m, N = inst.m, inst.n_slots
    ret, trans = _ranges(inst, full_range)
    shorts = inst.short_slots()
    for t in range(m):
        S = inst.cov[t]
        for e in range(N):
            we = inst.sign(e) * inst.price(e, t)
            for f in range(N):
                wf = inst.sign(f) * inst.price(f, t)
                add((x_index(inst, e, t), x_index(inst, f, t)) if e != f else (x_index(inst, e, t),),
                    inst.lam * we * S[inst.asset_of(e)][inst.asset_of(f)] * wf)
        if t + 1 < m:
            for e in ret:
                add((x_index(inst, e, t),), -inst.sign(e) * (inst.price(e, t + 1) - inst.price(e, t)))
        if t >= 1:
            for e in trans:
                d = inst.delta * inst.price(e, t)
                a, b = x_index(inst, e, t - 1), x_index(inst, e, t)
                add((a,), d)
                add((b,), d)
                add((a, b), -2 * d)
        for c in range(inst.n_cash_bits):
            add((y_index(inst, c, t),), -inst.nu * inst.u * (1 << c))
        for f in shorts:
            add((x_index(inst, f, t),), inst.rho * inst.price(f, t))
    for e in range(N):
        add((x_index(inst, e, 0),), inst.delta * inst.price(e, 0))
        add((x_index(inst, e, m - 1),), inst.delta * inst.price(e, m - 1))
    return {k: v for k, v in terms.items() if v}


def build_bqp(inst: PortfolioInstance, full_range: bool = False) -> Model:
    """Binary quadratic model whose objective, divided by ``objective_scale``,
    equals :func:`objective_value` at every assignment."""
    terms = _objective_terms(inst, full_range)
    scale = math.lcm(1, *(c.denominator for c in terms.values()))
    poly = Polynomial({mono: int(c * scale) for mono, c in terms.items()})
    n_vars = inst.m * (inst.n_slots + inst.n_cash_bits)
    cons = []
    for t in range(inst.m):
        cash = {x_index(inst, e, t): inst.sign(e) for e in range(inst.n_slots)}
        cash.update({y_index(inst, c, t): 1 << c for c in range(inst.n_cash_bits)})
        cons.append(LinearConstraint(cash, Relation.EQ, inst.C, f"cash[{t + 1}]"))
        cons.append(LinearConstraint({x_index(inst, e, t): 1 for e in range(inst.n_slots)}, Relation.LE, inst.B,
                                     f"assets[{t + 1}]"))
    return Model(ObjectiveSense.MINIMIZE, tuple(VariableSpec.binary() for _ in range(n_vars)), poly,
                 tuple(cons), scale)


def solution_from_vector(inst: PortfolioInstance, v: Sequence[int]) -> PortfolioSolution:
    x = tuple(tuple(v[x_index(inst, e, t)] for t in range(inst.m)) for e in range(inst.n_slots))
    y = tuple(tuple(v[y_index(inst, c, t)] for t in range(inst.m)) for c in range(inst.n_cash_bits))
    return PortfolioSolution(x, y)


def solution_to_vector(inst: PortfolioInstance, sol: PortfolioSolution) -> list[int]:
    _check_dims(inst, sol)
    v = [0] * (inst.m * (inst.n_slots + inst.n_cash_bits))
    for e in range(inst.n_slots):
        for t in range(inst.m):
            v[x_index(inst, e, t)] = sol.x[e][t]
    for c in range(inst.n_cash_bits):
        for t in range(inst.m):
            v[y_index(inst, c, t)] = sol.y[c][t]
    return v


# --- synthetic data ---------------------------------------------------------------

def _fixed(value: float, digits: int) -> Fraction:
    return Fraction(round(value * 10 ** digits), 10 ** digits)


def generate(n: int, m: int, seed: int = 0, k: int = UNITS_PER_ASSET, B: Optional[int] = None,
             C: int = CASH_UNITS, u=3, lam=Fraction(1, 10_000), volatility: float = 0.02,
             drift: float = 0.0003, window: int = 30, history: int = 30, df: int = 5,
             outlier_rate: float = 0.02, short_fraction: float = 0.5) -> PortfolioInstance:
    """Synthetic instance from a perturbed log-price random walk.

    A Gaussian log-price walk runs for ``history`` steps before the horizon.
    Each horizon step draws a Student-t return shaped by the mean and
    covariance of the preceding ``window`` returns; rare outliers add a shock
    of several standard deviations. Prices are normalized so one cash unit
    buys u worth of each asset at the first period, and per-period
    covariances come from the same rolling window.
    """
    if n < 2 or m < 2:
        raise ValueError("need n >= 2 and m >= 2")
    if history < 2:
        raise ValueError("history must hold at least two steps")
    if window > history:
        warnings.warn(f"window {window} exceeds the {history}-step history; using {history}")
        window = history
    if B is None:
        B = _B_BY_N.get(n, max(1, 2 * n // 5))
    rng = np.random.default_rng(np.random.SeedSequence([seed, n, m, k]))
    mu = drift + volatility * rng.standard_normal(n) * 0.1
    returns = [mu + volatility * rng.standard_normal(n) for _ in range(history)]
    covs = []
    for _ in range(m):
        past = np.array(returns[-window:])
        mean = past.mean(axis=0)
        cov = np.cov(past, rowvar=False) if volatility > 0 else np.zeros((n, n))
        covs.append(cov)
        w, V = np.linalg.eigh(cov)
        root = V * np.sqrt(np.clip(w, 0, None))
        t_draw = rng.standard_t(df, size=n) * math.sqrt((df - 2) / df)
        step = mean + root @ t_draw
        if volatility > 0 and rng.random() < outlier_rate:
            step[int(rng.integers(n))] += rng.choice([-1, 1]) * 5 * volatility
        returns.append(step)
    horizon = np.array(returns[history:history + m])
    if volatility == 0:
        horizon = np.zeros((m, n))
    log_rel = np.vstack([np.zeros(n), np.cumsum(horizon, axis=0)[:-1]])
    u = Fraction(u)
    prices = tuple(tuple(_fixed(float(u) * math.exp(log_rel[t, i]), PRICE_DIGITS) for t in range(m))
                   for i in range(n))
    cov_fixed = tuple(tuple(tuple(_fixed((c[i, j] + c[j, i]) / 2, COV_DIGITS) for j in range(n)) for i in range(n))
                      for c in covs)
    shortable = frozenset(int(a) for a in np.flatnonzero(rng.random(n) < short_fraction))
    return PortfolioInstance(n, m, k, B, C, u, Fraction(lam), NU, DELTA, RHO, prices, cov_fixed, shortable)


# --- text formats -----------------------------------------------------------------

_PARAMS = ("n", "m", "k", "B", "C", "u", "lam", "nu", "delta", "rho")


def _scale_of(values) -> int:
    return math.lcm(1, *(Fraction(v).denominator for v in values))


def write_instance(inst: PortfolioInstance) -> str:
    lines = ["PARAMS"] + [f"{name} {getattr(inst, name)}" for name in _PARAMS]
    lines.append("SHORTABLE " + " ".join(str(a) for a in sorted(inst.shortable)))
    ps = _scale_of(p for r in inst.prices for p in r)
    lines.append(f"PRICES scale {ps}")
    lines += [" ".join(str(int(p * ps)) for p in r) for r in inst.prices]
    for t, S in enumerate(inst.cov, 1):
        cs = _scale_of(v for r in S for v in r)
        lines.append(f"COV t={t} scale {cs}")
        lines += [" ".join(str(int(v * cs)) for v in r) for r in S]
    return "\n".join(lines) + "\n"


def read_instance(text: str) -> PortfolioInstance:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    params, shortable, prices, cov = {}, (), [], []
    i = 0
    while i < len(lines):
        tok = lines[i]
        if tok[0] == "PARAMS":
            i += 1
            while i < len(lines) and lines[i][0] in _PARAMS:
                params[lines[i][0]] = Fraction(lines[i][1])
                i += 1
            continue
        if tok[0] == "SHORTABLE":
            shortable = tuple(int(v) for v in tok[1:])
        elif tok[0] in ("PRICES", "COV"):
            if "scale" not in tok:
                raise ValueError(f"{tok[0]} section lacks a scale")
            scale = int(tok[tok.index("scale") + 1])
            rows = int(params["n"])
            body = lines[i + 1:i + 1 + rows]
            mat = [[Fraction(int(v), scale) for v in r] for r in body]
            (prices if tok[0] == "PRICES" else cov).append(mat)
            i += rows
        else:
            raise ValueError(f"unexpected line {' '.join(tok)!r}")
        i += 1
    missing = set(_PARAMS) - params.keys()
    if missing or len(prices) != 1:
        raise ValueError(f"incomplete instance (missing {sorted(missing) or 'PRICES'})")
    ints = {name: int(params[name]) for name in ("n", "m", "k", "B", "C")}
    return PortfolioInstance(**ints, u=params["u"], lam=params["lam"], nu=params["nu"], delta=params["delta"],
                             rho=params["rho"], prices=prices[0], cov=cov, shortable=shortable)


def write_solution(sol: PortfolioSolution) -> str:
    """One line per period: slot bits, a space, then cash bits."""
    m = len(sol.x[0]) if sol.x else len(sol.y[0])
    return "".join("".join(str(r[t]) for r in sol.x) + " " + "".join(str(r[t]) for r in sol.y) + "\n"
                   for t in range(m))


def read_solution(text: str) -> PortfolioSolution:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows or any(len(r) != 2 for r in rows):
        raise ValueError("each period line needs slot bits and cash bits")
    xs, ys = [r[0] for r in rows], [r[1] for r in rows]
    x = tuple(tuple(int(s[e]) for s in xs) for e in range(len(xs[0])))
    y = tuple(tuple(int(s[c]) for s in ys) for c in range(len(ys[0])))
    return PortfolioSolution(x, y)
