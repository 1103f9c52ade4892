"""Fit log-log slopes of coordinate magnitude against word length, per weight.

    python3 scripts/growth_law.py --group tests/data/ut4.ngp --samples 20
"""
import argparse
import math
import random
from dataclasses import dataclass

from malcev import parse_presentation


@dataclass
class GrowthConfig:
    group: str = "tests/data/heis.ngp"
    min_exp: int = 5
    max_exp: int = 12
    samples: int = 20
    seed: int = 0


def slope(xs, ys):
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)


def run(cfg: GrowthConfig) -> dict[int, float]:
    with open(cfg.group) as fh:
        P = parse_presentation(fh.read())
    col = P.collector
    rng = random.Random(cfg.seed)
    top = [i for i in range(P.m) if P.weights[i] == 1]
    lengths = [2**k for k in range(cfg.min_exp, cfg.max_exp + 1)]
    weights = sorted(set(P.weights))
    table = {w: [] for w in weights}
    print(f"{'L':>6} " + " ".join(f"{'w' + str(w):>12}" for w in weights))
    for L in lengths:
        samples = [
            col.word_to_coords([(rng.choice(top), rng.choice([-1, 1])) for _ in range(L)]) for _ in range(cfg.samples)
        ]
        row = []
        for w in weights:
            cols = [j for j in range(P.m) if P.weights[j] == w]
            mean = sum(max(abs(g[j]) for j in cols) for g in samples) / len(samples)
            table[w].append(math.log(mean + 1))
            row.append(mean)
        print(f"{L:>6} " + " ".join(f"{v:>12.1f}" for v in row))
    xs = [math.log(L) for L in lengths]
    fits = {w: slope(xs, ys) for w, ys in table.items()}
    for w, s in fits.items():
        print(f"weight {w}: slope {s:.3f} (bound {w})")
    return fits


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(GrowthConfig()).items():
        ap.add_argument("--" + name.replace("_", "-"), type=type(default), default=default)
    run(GrowthConfig(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
