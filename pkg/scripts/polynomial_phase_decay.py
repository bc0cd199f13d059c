"""Max |E_{n<N} a(n) e(p(n))| over sampled phases of degree <= d, at several N."""

import argparse
import dataclasses
from dataclasses import dataclass

from autoseq import builtin_sequence
from autoseq.expsum import poly_sup_sample, sample_phases


@dataclass
class Config:
    sequence: str = "thue-morse"
    degree: int = 2
    count: int = 200
    seed: int = 0
    log2_min: int = 12
    log2_max: int = 20
    step: int = 2


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    for f in dataclasses.fields(Config):
        parser.add_argument(f"--{f.name.replace('_', '-')}", type=f.type, default=f.default)
    cfg = Config(**vars(parser.parse_args()))
    print("#", dataclasses.asdict(cfg))
    seq = builtin_sequence(cfg.sequence)
    phases = sample_phases(cfg.degree, cfg.count, cfg.seed)
    print(f"{'N':>9} {'max|mean|':>12} {'worst phase'}")
    for j in range(cfg.log2_min, cfg.log2_max + 1, cfg.step):
        sample = poly_sup_sample(seq, cfg.degree, 2**j, phases=phases)
        worst = max(sample.reports, key=lambda r: r.abs)
        print(f"{2**j:>9} {sample.max_abs:>12.6g} {worst.phase}")


if __name__ == "__main__":
    main()
