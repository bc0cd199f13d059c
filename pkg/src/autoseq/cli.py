"""``autoseq`` command line.

Exit status is 0 on success, 1 on a domain error (bad automaton, unmet
hypothesis, unbalanced input, ...) and 2 on a usage error.  Every report
starts with the resolved configuration so that runs are self-describing.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

from .analysis import (
    decay_exponent,
    invertible_decomposition,
    is_balanced,
    is_totally_balanced,
    partial_sum,
    periodic_automaton,
)
from .automaton import AutomaticSequence, Automaton, AutomatonError, base_change, restrict_ap, shift
from .builtins import BUILTINS, builtin_automaton
from .equidist import HypothesisError
from .ergodic import convergence_report, counterexample_demo, parse_observable, parse_system
from .expsum import (
    exp_sum_direct,
    exp_sum_interval,
    exp_sum_transfer,
    sup_linear,
)
from .invariants import CHECKS, run_checks
from .phase import PhasePolynomial, parse_phase
from .structure import check_aperiodic, cycle_gcd, decompose_aperiodic, invertibility, scc_analysis
from .textfmt import format_automaton, parse_automaton_file, parse_value

DIGITS = 12
THREADS_ENV = "AUTOSEQ_THREADS"


class UsageError(Exception):
    pass


# -- argument helpers ------------------------------------------------------------


def parse_count(text: str) -> int:
    """Integers written as ``4096``, ``2^12``, ``2**12``, ``1e5`` or ``3*2^10+5``."""
    expr = text.strip().replace("**", "^")
    if not re.fullmatch(r"[0-9eE^*+\- ]+", expr):
        raise argparse.ArgumentTypeError(f"not an integer expression: {text!r}")
    total = 0
    for sign, term in re.findall(r"([+-]?)\s*([^+-]+)", expr):
        value = 1
        for factor in term.split("*"):
            factor = factor.strip()
            if "^" in factor:
                b, e = factor.split("^")
                value *= int(b) ** int(e)
            elif re.fullmatch(r"\d+[eE]\d+", factor):
                m, e = re.split("[eE]", factor)
                value *= int(m) * 10 ** int(e)
            else:
                value *= int(factor)
        total += -value if sign == "-" else value
    return total


def parse_counts(text: str) -> list[int]:
    return [parse_count(t) for t in text.split(",") if t.strip()]


def parse_range(text: str) -> list[int]:
    """``a:b`` inclusive or a comma list."""
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",")]


def _round(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    if isinstance(x, float):
        return x if not math.isfinite(x) else float(f"{x:.{DIGITS}g}")
    if isinstance(x, complex):
        return {"re": _round(x.real), "im": _round(x.imag)}
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if hasattr(x, "item"):
        return _round(x.item())
    return str(x)


def _text(value) -> str:
    if isinstance(value, float):
        return f"{value:.{DIGITS}g}"
    if isinstance(value, dict) and set(value) == {"re", "im"}:
        return f"{_text(value['re'])}{'+' if value['im'] >= 0 else '-'}{_text(abs(value['im']))}i"
    if isinstance(value, list):
        return "[" + ", ".join(_text(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_text(v)}" for k, v in value.items()) + "}"
    return str(value)


def emit(args, result: dict, out=None):
    out = out or sys.stdout
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    payload = _round({"config": config, "result": result})
    if args.json:
        out.write(json.dumps(payload, sort_keys=False) + "\n")
        return
    out.write("# config: " + json.dumps(payload["config"], sort_keys=True) + "\n")
    width = max((len(k) for k in payload["result"]), default=0)
    for key, value in payload["result"].items():
        out.write(f"{key.ljust(width)}  {_text(value)}\n")


# -- input resolution ------------------------------------------------------------


def load_automaton(source: str) -> Automaton:
    path = Path(source)
    if path.exists():
        return parse_automaton_file(path)
    if source in BUILTINS:
        return builtin_automaton(source)
    raise AutomatonError(f"{source!r} is neither a file nor a builtin ({', '.join(BUILTINS)})")


def load_sequence(source: str) -> AutomaticSequence:
    a = load_automaton(source)
    if a.initial is None or a.output is None:
        raise AutomatonError("incomplete automaton: no initial state or output declared")
    return AutomaticSequence.from_automaton(a, Path(source).stem)


def write_automaton(a: Automaton, target: str | None, comment: str) -> str | None:
    text = format_automaton(a, comment)
    if target is None:
        sys.stdout.write(text)
        return None
    Path(target).write_text(text, encoding="utf-8")
    return target


# -- verbs -----------------------------------------------------------------------


def cmd_eval(args):
    seq = load_sequence(args.source)
    return {f"a({n})": seq(n) for n in args.n}


def cmd_analyze(args):
    a = load_automaton(args.source)
    report = scc_analysis(a)
    result = {
        "base": a.base,
        "states": a.n_states,
        "sccs": [[a.labels[s] for s in c] for c in report.components],
        "terminal": [[a.labels[s] for s in c] for c in report.terminal_components],
    }
    for i, comp in enumerate(report.terminal_components):
        sub = a.restricted_to(comp)
        cert = check_aperiodic(sub)
        result[f"terminal[{i}].cycle_gcd"] = cycle_gcd(sub)
        result[f"terminal[{i}].strongly_aperiodic"] = cert.holds
        result[f"terminal[{i}].reason"] = cert.reason
    group = invertibility(a)
    result["invertible"] = group is not None
    if group is not None:
        result["group_order"] = group.order
    if a.initial is None or a.output is None:
        result["balance"] = "skipped: incomplete automaton"
        return result
    seq = AutomaticSequence.from_automaton(a)
    bal = is_balanced(seq)
    result["balanced"] = bal.balanced
    result["balanced.reason"] = bal.reason
    if bal.balanced:
        total = is_totally_balanced(seq, args.q_bound)
        result["totally_balanced"] = total.holds
        result["q_bound"] = args.q_bound
        result["witness"] = list(total.witness) if total.witness else None
    return result


def _sum_method(seq, phase: PhasePolynomial, n: int, method: str):
    if method == "auto":
        if phase.is_constant:
            method = "exact"
        elif phase.degree == 1 and phase.coeffs[0] == 0 and _power(seq.base, n) is not None:
            method = "transfer"
        elif phase.degree == 1:
            method = "interval"
        else:
            method = "direct"
    if method == "exact":
        if not phase.is_constant:
            raise UsageError("--method exact needs a constant phase")
        total = complex(partial_sum(seq, n)) * complex(phase(0)[()])
        return {"N": n, "phase": phase.describe(), "re": total.real / n, "im": total.imag / n,
                "abs": abs(total) / n, "method": "exact", "err": 0.0}
    if method == "transfer":
        length = _power(seq.base, n)
        if length is None or phase.degree != 1 or phase.coeffs[0] != 0:
            raise UsageError("--method transfer needs N = k^L and a phase lin:<alpha>")
        return exp_sum_transfer(seq, phase.coeffs[1], length).as_dict()
    if method == "interval":
        return exp_sum_interval(seq, phase, n).as_dict()
    return exp_sum_direct(seq, phase, n).as_dict()


def _power(k: int, n: int):
    length = 0
    while n > 1 and n % k == 0:
        n //= k
        length += 1
    return length if n == 1 else None


def cmd_sum(args):
    seq = load_sequence(args.source)
    phase = parse_phase(args.phase) if args.phase else PhasePolynomial((0,))
    return _sum_method(seq, phase, args.N, args.method)


def cmd_sup(args):
    seq = load_sequence(args.source)
    return {"N": args.N, **sup_linear(seq, args.N, args.err).as_dict()}


def cmd_decay(args):
    seq = load_sequence(args.source)
    if args.sup:
        points = []
        for length in args.L:
            rep = sup_linear(seq, seq.base**length, args.err)
            points.append((length, rep.value))
        xs = [p[0] for p in points]
        ys = [math.log(p[1], seq.base) for p in points]
        mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
        slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)
        return {"L": xs, "sup": [p[1] for p in points], "slope": slope, "c": -slope}
    weight = None
    if args.weight:
        if args.weight.startswith("per:"):
            weight = [parse_value(t) for t in args.weight[4:].split(",")]
        else:
            weight = parse_phase(args.weight)
    fit = decay_exponent(seq, weight, args.L)
    return {
        "N": [p[0] for p in fit.points],
        "mean_abs": [p[1] for p in fit.points],
        "zero_at": list(fit.zero_points),
        "c": fit.exponent,
        "band": list(fit.band),
        "residual": fit.residual,
        "exact_check": fit.exact_check,
    }


def cmd_restrict(args):
    seq = load_sequence(args.source)
    if args.shift:
        seq = shift(seq, args.shift)
    if args.q is not None:
        seq = restrict_ap(seq, args.q, args.r)
    a = seq.automaton
    if args.base_power > 1:
        a = base_change(a, args.base_power)
    desc = f"n -> a({args.q or 1} n + {args.r}) after shift {args.shift}, base power {args.base_power}"
    written = write_automaton(a, args.output, desc)
    return {"states": a.n_states, "base": a.base, "written": written}


def cmd_decompose(args):
    seq = load_sequence(args.source)
    outdir = Path(args.outdir) if args.outdir else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    files = []

    def put(a, name, comment):
        if outdir is None:
            return
        path = outdir / name
        path.write_text(format_automaton(a, comment), encoding="utf-8")
        files.append(str(path))

    if args.kind == "invertible":
        dec = invertible_decomposition(seq)
        put(periodic_automaton(list(dec.periodic), seq.base), "per.aut", "periodic part")
        put(dec.balanced.automaton, "bal.aut", "totally balanced part")
        total = is_totally_balanced(dec.balanced, args.q_bound)
        return {
            "per": list(dec.periodic),
            "group_order": dec.group_order,
            "bal_states": dec.balanced.automaton.n_states,
            "bal_totally_balanced": total.holds,
            "q_bound": args.q_bound,
            "files": files,
        }
    dec = decompose_aperiodic(seq)
    for r, part in enumerate(dec.parts):
        put(part.automaton, f"part_{r}.aut", f"a({dec.q} n + {r}) in base {dec.base}")
    return {
        "base": dec.base,
        "level": dec.level,
        "q": dec.q,
        "part_states": [p.automaton.n_states for p in dec.parts],
        "all_strongly_aperiodic": dec.all_aperiodic,
        "files": files,
    }


def cmd_ergodic(args):
    if args.demo == "counterexample":
        return counterexample_demo(args.n_max).as_dict()
    if not (args.system and args.observable and args.weight):
        raise UsageError("ergodic needs --system, --observable and --weight (or --demo counterexample)")
    system = parse_system(args.system)
    f = parse_observable(args.observable, system.dim)
    seq = load_sequence(args.weight)
    p = parse_phase(args.p)
    rep = convergence_report(system, f, seq, p, args.points, args.N, seed=args.seed)
    return {"system": system.describe(), "totally_ergodic": system.totally_ergodic, **rep.as_dict()}


def cmd_builtin(args):
    if args.list or not args.name:
        return {"builtins": list(BUILTINS)}
    if args.name not in BUILTINS:
        raise AutomatonError(f"unknown builtin {args.name!r}")
    a = builtin_automaton(args.name)
    if args.output:
        write_automaton(a, args.output, args.name)
        return {"name": args.name, "states": a.n_states, "written": args.output}
    sys.stdout.write(format_automaton(a, args.name))
    return None


def cmd_check(args):
    results = run_checks(args.seed, args.only)
    out = {r.name: f"{'ok' if r.passed else 'FAIL'} ({r.seconds:.1f}s) {r.detail}" for r in results}
    out["passed"] = all(r.passed for r in results)
    if not out["passed"]:
        emit(args, out)
        raise SystemExit(1)
    return out


# -- parser ----------------------------------------------------------------------


def _common(suppress: bool) -> argparse.ArgumentParser:
    def default(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=default(False), help="machine-readable output")
    common.add_argument("--seed", type=int, default=default(0), help="seed for every randomized sampler")
    common.add_argument(
        "--threads",
        type=int,
        default=default(int(os.environ.get(THREADS_ENV, "1"))),
        help=f"worker cap (default from ${THREADS_ENV}); never changes results",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    # options may appear before or after the verb; the subcommand copies do not reset them
    common = _common(suppress=True)
    parser = argparse.ArgumentParser(prog="autoseq", description=__doc__.splitlines()[0], parents=[_common(False)])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a(n)")
    p.add_argument("source", help="automaton file or builtin name")
    p.add_argument("--n", type=parse_count, nargs="+", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze", parents=[common], help="structure and balance certificates")
    p.add_argument("source")
    p.add_argument("--q-bound", type=int, default=12)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sum", parents=[common], help="E_{n<N} a(n) e(p(n))")
    p.add_argument("source")
    p.add_argument("--N", type=parse_count, required=True)
    p.add_argument("--phase", help="lin:<alpha> | poly:<c0>,<c1>,... | rat:<p>/<q>")
    p.add_argument("--method", choices=["auto", "direct", "transfer", "interval", "exact"], default="auto")
    p.set_defaults(func=cmd_sum)

    p = sub.add_parser("sup", parents=[common], help="certified sup over linear phases")
    p.add_argument("source")
    p.add_argument("--N", type=parse_count, required=True)
    p.add_argument("--err", type=float, default=1e-6)
    p.set_defaults(func=cmd_sup)

    p = sub.add_parser("decay", parents=[common], help="fit a power-law decay exponent")
    p.add_argument("source")
    p.add_argument("--L", type=parse_range, default=list(range(4, 16)), help="lengths, a:b or a,b,c")
    p.add_argument("--weight", help="per:<v0>,<v1>,... or a phase spec")
    p.add_argument("--sup", action="store_true", help="fit the sup over linear phases instead")
    p.add_argument("--err", type=float, default=1e-5)
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("restrict", parents=[common], help="emit an automaton for a(q n + r)")
    p.add_argument("source")
    p.add_argument("--q", type=int)
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--shift", type=int, default=0)
    p.add_argument("--base-power", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("decompose", parents=[common], help="aperiodic or per+bal decomposition")
    p.add_argument("source")
    p.add_argument("--kind", choices=["aperiodic", "invertible"], default="aperiodic")
    p.add_argument("--q-bound", type=int, default=12)
    p.add_argument("-o", "--outdir")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("ergodic", parents=[common], help="weighted ergodic averages")
    p.add_argument("--system")
    p.add_argument("--observable")
    p.add_argument("--weight", help="automaton file or builtin name")
    p.add_argument("--p", default="poly:0,1", help="integer polynomial, e.g. poly:0,0,1")
    p.add_argument("--points", type=int, default=32)
    p.add_argument("--N", type=parse_counts, default=[2**j for j in range(10, 17)])
    p.add_argument("--demo", choices=["counterexample"])
    p.add_argument("--n-max", type=parse_count, default=1 << 24)
    p.set_defaults(func=cmd_ergodic)

    p = sub.add_parser("builtin", parents=[common], help="print or write a builtin automaton")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_builtin)

    p = sub.add_parser("check", parents=[common], help="run the invariant suite")
    p.add_argument("--only", nargs="+", choices=list(CHECKS), metavar="CHECK")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (AutomatonError, HypothesisError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"autoseq {args.verb}: {exc}", file=sys.stderr)
        return 1
    if result is not None:
        emit(args, result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
