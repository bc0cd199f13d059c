"""Fit log2 sup_alpha |E_{n<2^L} t(n) e(n alpha)| against L and print columnar data."""

import argparse
import dataclasses
import math
import time
from dataclasses import dataclass

import numpy as np

from autoseq import builtin_sequence, sup_linear


@dataclass
class Config:
    sequence: str = "thue-morse"
    l_min: int = 8
    l_max: int = 22
    target_error: float = 1e-6


def run(cfg: Config) -> dict:
    seq = builtin_sequence(cfg.sequence)
    rows = []
    for length in range(cfg.l_min, cfg.l_max + 1):
        start = time.perf_counter()
        rep = sup_linear(seq, seq.base**length, cfg.target_error)
        rows.append((length, rep.value, rep.error_bound, rep.alpha, time.perf_counter() - start))
    lengths = [r[0] for r in rows]
    slope, _ = np.polyfit(lengths, [math.log(r[1], seq.base) for r in rows], 1)
    return {"rows": rows, "c": -slope}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    for f in dataclasses.fields(Config):
        parser.add_argument(f"--{f.name.replace('_', '-')}", type=f.type, default=f.default)
    cfg = Config(**vars(parser.parse_args()))
    print("#", dataclasses.asdict(cfg))
    out = run(cfg)
    print(f"{'L':>3} {'sup':>14} {'err':>10} {'alpha':>14} {'sec':>6}")
    for length, value, err, alpha, sec in out["rows"]:
        print(f"{length:>3} {value:>14.12g} {err:>10.3g} {alpha:>14.12g} {sec:>6.2f}")
    print(f"fitted c = {out['c']:.6f}; 1 - log 3 / log 4 = {1 - math.log(3) / math.log(4):.6f}")


if __name__ == "__main__":
    main()
