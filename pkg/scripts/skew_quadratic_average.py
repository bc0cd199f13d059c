"""Weighted averages E_{n<N} a(n) f(T^{n^2} x) on the skew product, across checkpoints."""

import argparse
import dataclasses
from dataclasses import dataclass

from autoseq import builtin_sequence, parse_phase
from autoseq.ergodic import convergence_report, parse_observable, parse_system


@dataclass
class Config:
    system: str = "skew:alpha=sqrt2-1"
    observable: str = "char:1"
    weight: str = "thue-morse"
    phase: str = "poly:0,0,1"
    points: int = 32
    log2_min: int = 14
    log2_max: int = 20
    seed: int = 0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    for f in dataclasses.fields(Config):
        parser.add_argument(f"--{f.name.replace('_', '-')}", type=f.type, default=f.default)
    cfg = Config(**vars(parser.parse_args()))
    print("#", dataclasses.asdict(cfg))
    system = parse_system(cfg.system)
    rep = convergence_report(
        system,
        parse_observable(cfg.observable, system.dim),
        builtin_sequence(cfg.weight),
        parse_phase(cfg.phase),
        cfg.points,
        [2**j for j in range(cfg.log2_min, cfg.log2_max + 1)],
        seed=cfg.seed,
    )
    print(f"{'N':>9} {'sup':>12} {'L2':>12}")
    for n, sup, l2 in zip(rep.trace.checkpoints, rep.sup, rep.l2):
        print(f"{n:>9} {sup:>12.6g} {l2:>12.6g}")
    print(rep.note)


if __name__ == "__main__":
    main()
