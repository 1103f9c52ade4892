"""Wall time of collection against word length, and of doubling programs against depth.

    python3 scripts/scaling.py --max-exp 20
"""
import argparse
import random
import time
from dataclasses import dataclass

from malcev import parse_presentation, parse_slp, slp_to_coords


@dataclass
class ScalingConfig:
    group: str = "tests/data/heis.ngp"
    min_exp: int = 14
    max_exp: int = 20
    max_depth: int = 4000
    seed: int = 0


def best_time(fn, reps=3):
    out = float("inf")
    for _ in range(reps):
        t = time.perf_counter()
        fn()
        out = min(out, time.perf_counter() - t)
    return out


def run(cfg: ScalingConfig) -> None:
    with open(cfg.group) as fh:
        P = parse_presentation(fh.read())
    col = P.collector
    rng = random.Random(cfg.seed)
    print("word length   seconds   ratio")
    prev = None
    for k in range(cfg.min_exp, cfg.max_exp + 1):
        w = [(rng.randrange(P.m), rng.choice([-1, 1])) for _ in range(2**k)]
        s = best_time(lambda: col.word_to_coords(w))
        ratio = f"{s / prev:7.2f}" if prev else "       "
        print(f"2^{k:<9} {s:9.4f} {ratio}")
        prev = s
    print("depth   seconds   bits of a3")
    d = 125
    while d <= cfg.max_depth:
        lines = ["term X a1", "term Y a2", "prod B0 X Y"]
        lines += [f"prod B{j} B{j - 1} B{j - 1}" for j in range(1, d + 1)]
        A = parse_slp("\n".join(lines + [f"root B{d}"]))
        res = []
        s = best_time(lambda: res.append(slp_to_coords(P, A)), reps=1)
        print(f"{d:<7} {s:9.4f}   {res[-1][-1].bit_length()}")
        d *= 2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(ScalingConfig()).items():
        ap.add_argument("--" + name.replace("_", "-"), type=type(default), default=default)
    run(ScalingConfig(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
