"""Phased double round robins: circle-method construction, hard-constraint
validation and a reader for the RobinX XML subset used by ITC2021 instances.

Teams and slots are 0-based internally; timetable text files are 1-based.
"""
from __future__ import annotations

import itertools
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Iterable, Union

from .core import ObjectiveSense, Verdict, Violation

Game = tuple[int, int]  # (home, away)


@dataclass(frozen=True)
class Timetable:
    n: int
    slots: tuple[tuple[Game, ...], ...]

    def __post_init__(self):
        slots = tuple(tuple((int(h), int(a)) for h, a in games) for games in self.slots)
        for games in slots:
            for h, a in games:
                if not (0 <= h < self.n and 0 <= a < self.n):
                    raise ValueError(f"team index out of range in game {h}-{a}")
        object.__setattr__(self, "slots", slots)

    def mirrored(self) -> "Timetable":
        """Append the same rounds again with home and away swapped."""
        second = tuple(tuple((a, h) for h, a in games) for games in self.slots)
        return Timetable(self.n, self.slots + second)


# --- constraints ---------------------------------------------------------------

def _mode_match(mode: str, team_home: bool) -> bool:
    return mode == "HA" or (mode == "H") == team_home


@dataclass(frozen=True)
class CA1:
    """Each listed team plays between ``min`` and ``max`` home (or away) games in ``slots``."""
    teams: frozenset
    slots: frozenset
    max: int
    min: int = 0
    mode: str = "H"
    kind = "CA1"


@dataclass(frozen=True)
class CA2:
    """Each team of ``teams1`` plays between min and max games against ``teams2`` in ``slots``."""
    teams1: frozenset
    teams2: frozenset
    slots: frozenset
    max: int
    min: int = 0
    mode1: str = "HA"
    kind = "CA2"


@dataclass(frozen=True)
class CA3:
    """In every window of ``intp`` consecutive slots, each team of ``teams1`` plays
    at most ``max`` games (per ``mode1``) against ``teams2``."""
    teams1: frozenset
    teams2: frozenset
    max: int
    intp: int
    min: int = 0
    mode1: str = "HA"
    kind = "CA3"


def consecutive_limit(n: int, run: int = 2) -> list[CA3]:
    """No team plays more than ``run`` consecutive home, or consecutive away, games."""
    everyone = frozenset(range(n))
    return [CA3(everyone, everyone, run, run + 1, 0, "H"), CA3(everyone, everyone, run, run + 1, 0, "A")]


@dataclass(frozen=True)
class CA4:
    """Games of ``teams1`` (home/away per ``mode1``) against ``teams2`` in ``slots``,
    counted over all slots (GLOBAL) or per slot (EVERY)."""
    teams1: frozenset
    teams2: frozenset
    slots: frozenset
    max: int
    min: int = 0
    mode1: str = "H"
    mode2: str = "GLOBAL"
    kind = "CA4"


@dataclass(frozen=True)
class BR1:
    """Each listed team has at most ``max`` breaks in ``slots``."""
    teams: frozenset
    slots: frozenset
    max: int
    mode2: str = "HA"
    kind = "BR1"


@dataclass(frozen=True)
class BR2:
    """The listed teams have at most ``max`` breaks in ``slots`` in total."""
    teams: frozenset
    slots: frozenset
    max: int
    kind = "BR2"


@dataclass(frozen=True)
class GA1:
    """Between ``min`` and ``max`` of the given (home, away) meetings fall in ``slots``."""
    meetings: frozenset
    slots: frozenset
    max: int
    min: int = 0
    kind = "GA1"


@dataclass(frozen=True)
class FA2:
    """After every slot in ``slots``, home-game counts of any two listed teams differ by at most ``intp``."""
    teams: frozenset
    slots: frozenset
    intp: int = 2
    kind = "FA2"


@dataclass(frozen=True)
class SE1:
    """At least ``min`` slots lie strictly between the two meetings of any two listed teams."""
    teams: frozenset
    min: int = 10
    kind = "SE1"


Constraint = Union[CA1, CA2, CA3, CA4, BR1, BR2, GA1, FA2, SE1]


@dataclass(frozen=True)
class SportsInstance:
    n: int
    phased: bool = True
    constraints: tuple = ()
    dropped: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ValueError("the number of teams must be even and at least 2")
        n_slots = 2 * (self.n - 1)
        for c in self.constraints:
            teams = set()
            for name in ("teams", "teams1", "teams2"):
                teams |= set(getattr(c, name, ()))
            for h, a in getattr(c, "meetings", ()):
                teams |= {h, a}
            if any(not 0 <= t < self.n for t in teams):
                raise ValueError(f"{c.kind} references a team outside 0..{self.n - 1}")
            if any(not 0 <= s < n_slots for s in getattr(c, "slots", ())):
                raise ValueError(f"{c.kind} references a slot outside 0..{n_slots - 1}")
        object.__setattr__(self, "constraints", tuple(self.constraints))


# --- construction ------------------------------------------------------------

def circle_method(n: int) -> Timetable:
    """Phased 2RR: circle-method rounds, then the same rounds with venues swapped."""
    if n < 2 or n % 2:
        raise ValueError("circle method needs an even number of teams")
    m = n - 1
    rounds = []
    for r in range(m):
        games = [(r, m) if r % 2 == 0 else (m, r)]
        for i in range(1, n // 2):
            a, b = (r + i) % m, (r - i) % m
            games.append((a, b) if i % 2 else (b, a))
        rounds.append(tuple(games))
    return Timetable(n, tuple(rounds)).mirrored()


# --- validation ----------------------------------------------------------------

def _structure(tt: Timetable, phased: bool) -> list[Violation]:
    n = tt.n
    out = []
    if len(tt.slots) != 2 * (n - 1):
        out.append(Violation("2RR", f"{len(tt.slots)} slots instead of {2 * (n - 1)}", abs(len(tt.slots) - 2 * (n - 1))))
    for s, games in enumerate(tt.slots):
        counts = [0] * n
        for h, a in games:
            if h == a:
                out.append(Violation("2RR", f"slot {s + 1}: team {h + 1} plays itself", 1))
            counts[h] += 1
            counts[a] += 1
        bad = [t + 1 for t, c in enumerate(counts) if c != 1]
        if bad:
            out.append(Violation("2RR", f"slot {s + 1} is not a perfect matching (teams {bad})", len(bad)))
    seen: dict[Game, int] = {}
    for games in tt.slots:
        for g in games:
            seen[g] = seen.get(g, 0) + 1
    for h in range(n):
        for a in range(n):
            if h != a and seen.get((h, a), 0) != 1:
                out.append(Violation("2RR", f"game {h + 1}-{a + 1} occurs {seen.get((h, a), 0)} times",
                                     abs(seen.get((h, a), 0) - 1)))
    if phased and len(tt.slots) == 2 * (n - 1):
        first = [frozenset(g) for games in tt.slots[:n - 1] for g in games]
        dup = len(first) - len(set(first))
        if dup or len(set(first)) != n * (n - 1) // 2:
            out.append(Violation("PHASED", "first half is not a single round robin", max(dup, 1)))
    return out


class _View:
    """Per-team venue and opponent lookups for a structurally valid timetable."""

    def __init__(self, tt: Timetable):
        self.n = tt.n
        self.n_slots = len(tt.slots)
        self.home = [[False] * self.n_slots for _ in range(tt.n)]
        self.opp = [[-1] * self.n_slots for _ in range(tt.n)]
        self.slot_of: dict[Game, int] = {}
        for s, games in enumerate(tt.slots):
            for h, a in games:
                self.home[h][s] = True
                self.opp[h][s], self.opp[a][s] = a, h
                self.slot_of[(h, a)] = s

    def is_break(self, t: int, s: int) -> bool:
        return s > 0 and self.home[t][s] == self.home[t][s - 1]

    def games_vs(self, t: int, others, slots: Iterable[int], mode: str) -> int:
        return sum(1 for s in slots if self.opp[t][s] in others and _mode_match(mode, self.home[t][s]))


def _bounds(cid, what, value, lo, hi):
    if value > hi:
        return [Violation(cid, f"{what}: {value} > max {hi}", value - hi)]
    if value < lo:
        return [Violation(cid, f"{what}: {value} < min {lo}", lo - value)]
    return []


def _check(c: Constraint, cid: str, v: _View) -> list[Violation]:
    out = []
    if isinstance(c, CA1):
        for t in sorted(c.teams):
            k = sum(1 for s in c.slots if _mode_match(c.mode, v.home[t][s]))
            out += _bounds(cid, f"team {t + 1} {c.mode} games", k, c.min, c.max)
    elif isinstance(c, CA2):
        for t in sorted(c.teams1):
            out += _bounds(cid, f"team {t + 1} games vs set", v.games_vs(t, c.teams2, c.slots, c.mode1), c.min, c.max)
    elif isinstance(c, CA3):
        for t in sorted(c.teams1):
            for start in range(0, v.n_slots - c.intp + 1):
                k = v.games_vs(t, c.teams2, range(start, start + c.intp), c.mode1)
                out += _bounds(cid, f"team {t + 1} slots {start + 1}-{start + c.intp}", k, c.min, c.max)
    elif isinstance(c, CA4):
        groups = [sorted(c.slots)] if c.mode2 == "GLOBAL" else [[s] for s in sorted(c.slots)]
        for group in groups:
            k = sum(v.games_vs(t, c.teams2, group, c.mode1) for t in c.teams1)
            out += _bounds(cid, f"slots {[s + 1 for s in group]}", k, c.min, c.max)
    elif isinstance(c, BR1):
        for t in sorted(c.teams):
            k = sum(1 for s in c.slots if v.is_break(t, s) and _mode_match(c.mode2, v.home[t][s]))
            out += _bounds(cid, f"team {t + 1} breaks", k, 0, c.max)
    elif isinstance(c, BR2):
        k = sum(1 for t in c.teams for s in c.slots if v.is_break(t, s))
        out += _bounds(cid, "total breaks", k, 0, c.max)
    elif isinstance(c, GA1):
        k = sum(1 for g in c.meetings if v.slot_of.get(g) in c.slots)
        out += _bounds(cid, "meetings in slots", k, c.min, c.max)
    elif isinstance(c, FA2):
        teams = sorted(c.teams)
        played = [0] * v.n
        for s in range(v.n_slots):
            for t in teams:
                played[t] += v.home[t][s]
            if s in c.slots:
                hi = max(played[t] for t in teams)
                lo = min(played[t] for t in teams)
                if hi - lo > c.intp:
                    out.append(Violation(cid, f"after slot {s + 1} home counts differ by {hi - lo}", hi - lo - c.intp))
    elif isinstance(c, SE1):
        for i, j in itertools.combinations(sorted(c.teams), 2):
            s1, s2 = sorted((v.slot_of[(i, j)], v.slot_of[(j, i)]))
            gap = s2 - s1 - 1
            if gap < c.min:
                out.append(Violation(cid, f"teams {i + 1},{j + 1}: {gap} slots apart", c.min - gap))
    else:
        raise TypeError(f"unsupported constraint {c!r}")
    return out


def constraint_ids(inst: SportsInstance) -> list[str]:
    return [f"{c.kind}[{k}]" for k, c in enumerate(inst.constraints)]


def validate(tt: Timetable, inst: SportsInstance) -> Verdict:
    if tt.n != inst.n:
        raise ValueError(f"timetable has {tt.n} teams, instance {inst.n}")
    violations = _structure(tt, inst.phased)
    if not violations:
        view = _View(tt)
        for cid, c in zip(constraint_ids(inst), inst.constraints):
            violations += _check(c, cid, view)
    return Verdict.from_violations(violations, sense=ObjectiveSense.FEASIBILITY)


def count_breaks(tt: Timetable) -> int:
    v = _View(tt)
    return sum(v.is_break(t, s) for t in range(tt.n) for s in range(v.n_slots))


# --- RobinX XML subset -----------------------------------------------------------

class UnsupportedFeature(ValueError):
    pass


def _ids(text) -> frozenset:
    return frozenset(int(t) for t in (text or "").replace(",", ";").split(";") if t.strip())


def _meetings(text) -> frozenset:
    out = set()
    for part in (text or "").split(";"):
        if part.strip():
            h, a = part.split(",")
            out.add((int(h), int(a)))
    return frozenset(out)


def _int(el, name, default=None):
    v = el.get(name)
    if v is None:
        if default is None:
            raise ValueError(f"{el.tag} lacks attribute {name!r}")
        return default
    return int(v)


_BUILDERS = {
    "CA1": lambda e: CA1(_ids(e.get("teams")), _ids(e.get("slots")), _int(e, "max"), _int(e, "min", 0),
                         e.get("mode", "H")),
    "CA2": lambda e: CA2(_ids(e.get("teams1")), _ids(e.get("teams2")), _ids(e.get("slots")), _int(e, "max"),
                         _int(e, "min", 0), e.get("mode1", "HA")),
    "CA3": lambda e: CA3(_ids(e.get("teams1")), _ids(e.get("teams2")), _int(e, "max"), _int(e, "intp"),
                         _int(e, "min", 0), e.get("mode1", "HA")),
    "CA4": lambda e: CA4(_ids(e.get("teams1")), _ids(e.get("teams2")), _ids(e.get("slots")), _int(e, "max"),
                         _int(e, "min", 0), e.get("mode1", "H"), e.get("mode2", "GLOBAL")),
    "BR1": lambda e: BR1(_ids(e.get("teams")), _ids(e.get("slots")), _int(e, "intp"), e.get("mode2", "HA")),
    "BR2": lambda e: BR2(_ids(e.get("teams")), _ids(e.get("slots")), _int(e, "intp")),
    "GA1": lambda e: GA1(_meetings(e.get("meetings")), _ids(e.get("slots")), _int(e, "max"), _int(e, "min", 0)),
    "FA2": lambda e: FA2(_ids(e.get("teams")), _ids(e.get("slots")), _int(e, "intp", 2)),
    "SE1": lambda e: SE1(_ids(e.get("teams")), _int(e, "min", 10)),
}
_GROUPS = {"CapacityConstraints", "GameConstraints", "BreakConstraints", "FairnessConstraints",
           "SeparationConstraints"}


def parse_robinx(xml_text: str, ignore_soft: bool = True) -> SportsInstance:
    """Read teams, phase mode and hard constraints from a RobinX document.

    Soft constraints are dropped with a warning when ``ignore_soft`` is set and
    rejected otherwise.
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise ValueError(f"malformed XML: {exc}") from exc
    teams = root.findall("./Resources/Teams/team")
    if not teams:
        raise ValueError("document lists no teams")
    n = len(teams)
    mode = root.findtext("./Structure/Format/gameMode", default="P").strip()
    rr = root.findtext("./Structure/Format/numberRoundRobin", default="2").strip()
    if rr != "2":
        raise UnsupportedFeature(f"numberRoundRobin={rr}")
    constraints, dropped = [], []
    cons_root = root.find("./Constraints")
    for group in (list(cons_root) if cons_root is not None else []):
        if group.tag not in _GROUPS:
            raise UnsupportedFeature(f"constraint group {group.tag}")
        for el in group:
            soft = el.get("type", "HARD").upper() == "SOFT"
            if el.tag not in _BUILDERS:
                if soft and ignore_soft:
                    dropped.append(el.tag)
                    continue
                raise UnsupportedFeature(f"constraint type {el.tag}")
            if soft:
                if not ignore_soft:
                    raise UnsupportedFeature(f"soft {el.tag} constraint")
                dropped.append(el.tag)
                continue
            constraints.append(_BUILDERS[el.tag](el))
    if dropped:
        warnings.warn(f"ignored {len(dropped)} soft constraints: {', '.join(sorted(set(dropped)))}")
    return SportsInstance(n, mode == "P", tuple(constraints), tuple(dropped))


def parse_robinx_solution(xml_text: str, n: int) -> Timetable:
    root = ET.fromstring(xml_text)
    matches = root.findall(".//ScheduledMatch")
    if not matches:
        raise ValueError("no ScheduledMatch elements")
    by_slot: dict[int, list[Game]] = {}
    for el in matches:
        by_slot.setdefault(int(el.get("slot")), []).append((int(el.get("home")), int(el.get("away"))))
    n_slots = max(by_slot) + 1
    return Timetable(n, tuple(tuple(by_slot.get(s, [])) for s in range(n_slots)))


# --- timetable text files --------------------------------------------------------

def write_timetable(tt: Timetable) -> str:
    return "".join(" ".join(f"{h + 1}-{a + 1}" for h, a in games) + "\n" for games in tt.slots)


def read_timetable(text: str, n: int = None) -> Timetable:
    slots = []
    for ln in text.splitlines():
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        games = []
        for tok in ln.split():
            h, sep, a = tok.partition("-")
            if not sep:
                raise ValueError(f"bad game token {tok!r}")
            games.append((int(h) - 1, int(a) - 1))
        slots.append(tuple(games))
    if n is None:
        n = 1 + max((max(h, a) for games in slots for h, a in games), default=-1)
    return Timetable(n, tuple(slots))
