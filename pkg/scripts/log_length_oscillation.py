"""Cesaro means of floor(log2 n) mod 2 at N = 2^L, and a bounded coboundary average."""

import argparse
import dataclasses
from dataclasses import dataclass

from autoseq.ergodic import counterexample_demo


@dataclass
class Config:
    log2_max: int = 24
    coboundary_log2_max: int = 18


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    for f in dataclasses.fields(Config):
        parser.add_argument(f"--{f.name.replace('_', '-')}", type=f.type, default=f.default)
    cfg = Config(**vars(parser.parse_args()))
    print("#", dataclasses.asdict(cfg))
    rep = counterexample_demo(1 << cfg.log2_max, 1 << cfg.coboundary_log2_max)
    print(f"{'L':>3} {'mean':>22} {'float':>14}")
    for length, m in zip(rep.lengths, rep.means):
        print(f"{length:>3} {str(m):>22} {float(m):>14.12g}")
    print(f"closed form ok: {rep.closed_form_ok}, halving ok: {rep.halving_ok}")
    print(f"limsup {float(rep.limsup):.6f}, liminf {float(rep.liminf):.6f}, gap {float(rep.gap):.6f}")
    print(f"{'N':>9} {'|coboundary avg|':>18}")
    for n, v in zip(rep.coboundary_checkpoints, rep.coboundary_values):
        print(f"{n:>9} {v:>18.6g}")
    print(f"coboundary within (2 log2 N + 2)/N: {rep.coboundary_ok}")


if __name__ == "__main__":
    main()
