"""Exhaustive LABS optima next to the tabulated values, with timings."""
import time
from dataclasses import dataclass

from combench import labs

from common import parse_config


@dataclass(frozen=True)
class LabsTableConfig:
    """Range of sequence lengths to search exhaustively."""
    n_min: int = 2
    n_max: int = 20


def main(cfg: LabsTableConfig):
    print(f"{'n':>3} {'E*':>5} {'table':>5} {'seconds':>8}  sequence")
    for n in range(cfg.n_min, cfg.n_max + 1):
        t = time.perf_counter()
        e, seq = labs.exhaustive(n)
        dt = time.perf_counter() - t
        code = "".join(map(str, labs.encode_runlength(seq)))
        print(f"{n:>3} {e:>5} {labs.known_optimum(n) or '-':>5} {dt:>8.3f}  {code}")


if __name__ == "__main__":
    main(parse_config(LabsTableConfig))
