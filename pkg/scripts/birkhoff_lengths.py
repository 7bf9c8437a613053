"""Greedy decomposition lengths on generated instances against the generating witness."""
import statistics
from dataclasses import dataclass

from combench import birkhoff

from common import parse_config


@dataclass(frozen=True)
class BirkhoffConfig:
    """Matrix sizes, instance count per size and permutation density."""
    n_min: int = 3
    n_max: int = 10
    instances: int = 20
    density: str = "sparse"
    seed: int = 0


def main(cfg: BirkhoffConfig):
    print(f"{'n':>3} {'witness':>8} {'greedy':>8} {'max':>5} {'bound':>6}")
    for n in range(cfg.n_min, cfg.n_max + 1):
        wit, greedy = [], []
        for k in range(cfg.instances):
            D, witness = birkhoff.generate(n, cfg.density, cfg.seed + k)
            dec = birkhoff.greedy_decompose(D)
            assert birkhoff.is_exact(D, dec)
            wit.append(witness.length)
            greedy.append(dec.length)
        print(f"{n:>3} {statistics.mean(wit):>8.2f} {statistics.mean(greedy):>8.2f} {max(greedy):>5} "
              f"{(n - 1) ** 2 + 1:>6}")


if __name__ == "__main__":
    main(parse_config(BirkhoffConfig))
