"""Low-autocorrelation binary sequences: energy, run-length codes, known optima,
exhaustive search and the quartic binary form."""
from __future__ import annotations

import itertools
from typing import Optional, Sequence, Union

import numpy as np

from .core import ObjectiveSense, Verdict
from .model import Hubo, Polynomial

# n -> (run-length code, optimal energy)
KNOWN_OPTIMA: dict[int, tuple[str, int]] = {
    2: ("2", 1), 3: ("12", 1), 4: ("112", 2), 5: ("113", 2), 6: ("1113", 7),
    7: ("1123", 3), 8: ("1124", 8), 9: ("121113", 12), 10: ("111124", 13),
    11: ("331211", 5), 12: ("111522", 10), 13: ("5221111", 6), 14: ("41112221", 19),
    15: ("11213133", 15), 16: ("2112113131", 24), 17: ("11312144", 32),
    18: ("1112115222", 25), 19: ("4111142212", 29), 20: ("11114142122", 26),
    21: ("27221111121", 26), 22: ("11111212723", 39), 23: ("231131121413", 47),
    24: ("122121111732", 36), 25: ("122121111733", 36), 26: ("3371111212211", 45),
    27: ("34313131211211", 37), 28: ("112112131313431", 50), 29: ("112212111117323", 62),
    30: ("132311111212164", 59), 31: ("1112111122122337", 67), 32: ("71112111133221221", 64),
    33: ("742112111111122221", 64), 34: ("22229421121111111", 65),
    35: ("11111132326612121", 73), 36: ("1121112121311132363", 82),
    37: ("22228421121121111111", 86), 38: ("1222211111112112448", 87),
    39: ("11111112343212112128", 99), 40: ("44412112131121313131", 108),
    41: ("343111111222281211211", 108),
}


def _spins(seq: Sequence[int]) -> np.ndarray:
    s = np.asarray(seq, dtype=np.int64)
    if s.ndim != 1 or len(s) < 2:
        raise ValueError("a sequence needs at least two spins")
    if not np.all(np.abs(s) == 1):
        raise ValueError("spins must be +1 or -1")
    return s


def correlations(seq: Sequence[int]) -> list[int]:
    s = _spins(seq)
    return [int(s[:-j] @ s[j:]) for j in range(1, len(s))]


def energy(seq: Sequence[int]) -> int:
    return sum(c * c for c in correlations(seq))


def decode_runlength(code: Union[str, Sequence[int]]) -> tuple[int, ...]:
    """Alternating runs starting with +1; strings are read one digit per run."""
    digits = [int(ch) for ch in code] if isinstance(code, str) else [int(d) for d in code]
    if not digits:
        raise ValueError("empty run-length code")
    if any(d <= 0 for d in digits):
        raise ValueError("run lengths must be positive")
    out, spin = [], 1
    for d in digits:
        out += [spin] * d
        spin = -spin
    return tuple(out)


def encode_runlength(seq: Sequence[int]) -> list[int]:
    s = list(_spins(seq))
    return [len(list(g)) for _, g in itertools.groupby(s)]


def known_optimum(n: int) -> Optional[int]:
    row = KNOWN_OPTIMA.get(n)
    return row[1] if row else None


def check(seq: Sequence[int]) -> Verdict:
    """Energy of a candidate, flagged as a gap when it misses the tabulated optimum."""
    e = energy(seq)
    best = known_optimum(len(seq))
    warnings = []
    if best is not None and e != best:
        warnings.append(f"energy {e} differs from known optimum {best}")
    return Verdict.from_violations([], objective=e, sense=ObjectiveSense.MINIMIZE,
                                   warnings=warnings, info={"known_optimum": best})


def _energies(S: np.ndarray) -> np.ndarray:
    n = S.shape[1]
    E = np.zeros(S.shape[0], dtype=np.int64)
    for j in range(1, n):
        c = np.einsum("ij,ij->i", S[:, :-j], S[:, j:])
        E += c * c
    return E


def exhaustive(n: int, chunk_bits: int = 18) -> tuple[int, tuple[int, ...]]:
    """Optimal energy and the lexicographically smallest optimal sequence with s1 = s2 = +1.

    Fixing two leading spins is safe: a global flip fixes s1 and negating every
    second spin (which leaves every |C_j| unchanged) fixes s2.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if n > 28:
        raise ValueError("exhaustive search is limited to n <= 28")
    free = n - 2
    total = 1 << free
    best_e, best_s = None, None
    step = 1 << min(free, chunk_bits)
    shifts = np.arange(free - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, step):
        r = np.arange(start, min(total, start + step), dtype=np.int64)
        bits = (r[:, None] >> shifts) & 1
        # bit 0 -> -1 so counting order is lexicographic with -1 < +1
        S = np.empty((len(r), n), dtype=np.int64)
        S[:, :2] = 1
        S[:, 2:] = 2 * bits - 1
        E = _energies(S)
        k = int(np.argmin(E))
        if best_e is None or E[k] < best_e:
            best_e, best_s = int(E[k]), tuple(int(v) for v in S[k])
    return best_e, best_s


def to_hubo(n: int) -> Hubo:
    """Quartic binary form via s_i = 1 - 2 x_i."""
    if n < 2:
        raise ValueError("n must be at least 2")
    spin = [Polynomial({(): 1, (i,): -2}) for i in range(n)]
    total = Polynomial()
    for j in range(1, n):
        c = Polynomial()
        for i in range(n - j):
            c = c + (spin[i] * spin[i + j]).reduce_binary()
        total = total + (c * c).reduce_binary()
    return Hubo(n, dict(total.terms), 0)


def spins_to_bits(seq: Sequence[int]) -> list[int]:
    return [(1 - s) // 2 for s in _spins(seq)]


def bits_to_spins(x: Sequence[int]) -> tuple[int, ...]:
    return tuple(1 - 2 * v for v in x)


def write_sequence(seq: Sequence[int]) -> str:
    return "".join("+" if s > 0 else "-" for s in _spins(seq)) + "\n"


def read_sequence(text: str) -> tuple[int, ...]:
    body = "".join(text.split())
    if body and set(body) <= set("+-"):
        return tuple(1 if ch == "+" else -1 for ch in body)
    if body.isdigit():
        return decode_runlength(body)
    raise ValueError("expected a +/- string or a run-length digit string")
