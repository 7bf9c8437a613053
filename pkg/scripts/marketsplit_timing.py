"""Time to the first and to all solutions of generated market split instances."""
import time
from dataclasses import dataclass

from combench import marketsplit, solvers

from common import parse_config


@dataclass(frozen=True)
class MarketSplitConfig:
    """Row counts, coefficient ranges and seeds to time."""
    rows: tuple = (2, 3, 4)
    ranges: tuple = (50, 100, 200)
    seeds: int = 5
    all_solutions: bool = True


def main(cfg: MarketSplitConfig):
    print(f"{'m':>2} {'D':>4} {'seed':>4} {'first_s':>8} {'all_s':>8} {'#sol':>5}")
    for m in cfg.rows:
        for D in cfg.ranges:
            for seed in range(cfg.seeds):
                inst = marketsplit.generate(m, D, seed)
                t = time.perf_counter()
                solvers.meet_in_middle(inst, mode="first")
                first = time.perf_counter() - t
                if cfg.all_solutions:
                    t = time.perf_counter()
                    count = len(solvers.meet_in_middle(inst, mode="all"))
                    every = f"{time.perf_counter() - t:>8.3f}"
                else:
                    count, every = "-", f"{'-':>8}"
                print(f"{m:>2} {D:>4} {seed:>4} {first:>8.3f} {every} {count:>5}")


if __name__ == "__main__":
    main(parse_config(MarketSplitConfig))
