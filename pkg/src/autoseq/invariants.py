"""The invariant suite run by ``autoseq check``."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .analysis import partial_sum
from .automaton import (
    AutomaticSequence,
    base_change,
    canonical_form,
    cokernel_outputs,
    digits,
    isomorphic,
    kernel_family,
    minimize,
    normalize_leading_zeros,
    product,
    restrict_ap,
    shift,
)
from .builtins import BUILTINS, builtin_automaton, builtin_sequence, log_length_raw, nu2_parity
from .equidist import vdc_check
from .ergodic import DynSystem
from .expsum import exp_sum_direct, interval_means, transfer_means, tm_product_oracle
from .structure import (
    check_aperiodic,
    cycle_gcd,
    frequencies,
    invertibility,
    is_strongly_connected,
)

__all__ = ["CheckResult", "CHECKS", "run_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _sequences():
    return {name: builtin_sequence(name) for name in BUILTINS}


def check_three_methods(rng, trials: int = 500) -> str:
    seqs = list(_sequences().values())
    worst = 0.0
    for t in range(trials):
        seq = seqs[int(rng.integers(len(seqs)))]
        alpha = float(rng.random())
        k = seq.base
        if t % 2 == 0:
            length = int(rng.integers(1, int(20 * math.log(2) / math.log(k)) + 1))
            n = k**length
            via_transfer = complex(transfer_means(seq, [alpha], length)[0])
        else:
            n = int(math.exp(rng.uniform(0, 20 * math.log(2))))
            via_transfer = None
        direct = exp_sum_direct(seq, alpha, n).mean
        interval = complex(interval_means(seq, [alpha], n)[0])
        worst = max(worst, abs(direct - interval))
        if via_transfer is not None:
            worst = max(worst, abs(direct - via_transfer))
    assert worst <= 1e-9, f"methods disagree by {worst:.3g}"
    return f"max disagreement {worst:.3g} over {trials} triples"


def check_tm_closed_form(rng, trials: int = 1000) -> str:
    tm = builtin_sequence("thue-morse")
    worst = 0.0
    alphas = rng.random(trials)
    lengths = rng.integers(0, 21, trials)
    for length in range(21):
        sel = alphas[lengths == length]
        if len(sel) == 0:
            continue
        got = np.abs(transfer_means(tm, sel, length))
        want = np.array([tm_product_oracle(float(a), length) for a in sel])
        worst = max(worst, float(np.max(np.abs(got - want))))
    assert worst <= 1e-10, f"closed form off by {worst:.3g}"
    return f"max deviation {worst:.3g}"


def check_kernel_closure(rng) -> str:
    sizes = []
    for name, seq in _sequences().items():
        family = kernel_family(seq)
        forms = {canonical_form(minimize(s.automaton)) for s in family}
        assert len(forms) == len(family) <= seq.automaton.n_states, name
        for member in family:
            for sub in kernel_family(member):
                assert canonical_form(minimize(sub.automaton)) in forms, f"{name}: kernel not closed"
        co = cokernel_outputs(seq.automaton)
        assert len(co) <= len(set(seq.automaton.output)) ** seq.automaton.n_states
        sizes.append(f"{name}:{len(family)}/{len(co)}")
    return "kernel/co-kernel sizes " + " ".join(sizes)


def check_frequencies(rng) -> str:
    worst_sum, worst_spread = 0.0, 0.0
    for name in BUILTINS:
        a = builtin_sequence(name).automaton
        if not is_strongly_connected(a):
            continue
        aperiodic = check_aperiodic(a).holds
        for q in range(1, 10):
            if math.gcd(q, a.base) != 1:
                continue
            freq = frequencies(a, q)
            for r in range(q):
                worst_sum = max(worst_sum, abs(float(freq.row_sum(r)) - 1.0))
            if aperiodic:
                worst_spread = max(worst_spread, freq.residue_spread())
    assert worst_sum <= 1e-12 and worst_spread <= 1e-10, (worst_sum, worst_spread)
    return f"row sums within {worst_sum:.3g}, residue spread {worst_spread:.3g}"


def check_normalization(rng) -> str:
    count = 0
    raws = [builtin_automaton(n) for n in BUILTINS]
    raws.append(log_length_raw())
    for raw in raws:
        once = normalize_leading_zeros(raw)
        twice = normalize_leading_zeros(once)
        assert isomorphic(once, twice)
        assert once.ignores_leading_zeros
        seq = AutomaticSequence(once)
        for n in range(2000):
            assert seq(n) == raw.eval_word(digits(n, raw.base))
        count += 1
    return f"{count} automata idempotent and faithful"


def check_constructions(rng) -> str:
    for name, seq in _sequences().items():
        vals = seq.exact_values(4000)
        for q in range(1, 13):
            for r in range(q):
                sub = restrict_ap(seq, q, r)
                m = (4000 - r + q - 1) // q
                assert sub.exact_values(m) == vals[r::q], f"{name} q={q} r={r}"
        for l in (2, 3):
            big = AutomaticSequence(base_change(seq.automaton, l))
            assert big.exact_values(4000) == vals, f"{name} base change l={l}"
    return "restrict_ap (q <= 12) and base_change (l = 2, 3) exact on n < 4000"


def check_cycle_gcd(rng) -> str:
    seen = []
    for name in BUILTINS:
        a = builtin_sequence(name).automaton
        if not is_strongly_connected(a):
            continue
        values = {cycle_gcd(a, s, check_all_states=False) for s in range(a.n_states)}
        assert len(values) == 1 and math.gcd(values.pop(), a.base) == 1, name
        seen.append(name)
    return "state-independent and coprime for " + ", ".join(seen)


def check_partial_sums(rng, trials: int = 300) -> str:
    for name, seq in _sequences().items():
        vals = seq.exact_values(1 << 14)
        prefix = [Fraction(0)]
        for v in vals:
            prefix.append(prefix[-1] + v)
        for n in rng.integers(0, 1 << 14, trials // 10):
            assert partial_sum(seq, int(n)) == prefix[int(n)], name
    return "exact agreement with naive prefix sums"


def check_vdc(rng, trials: int = 200) -> str:
    worst = -math.inf
    for _ in range(trials):
        h = int(rng.choice([8, 16, 32]))
        n = 2000
        x = np.exp(2j * np.pi * rng.random(n + h)) * rng.random(n + h)
        res = vdc_check(x, h, n)
        assert res.holds
        worst = max(worst, res.lhs - res.rhs)
    return f"{trials} trials, max lhs - rhs {worst:.3g}"


def check_multiplicativity(rng) -> str:
    tm = builtin_sequence("thue-morse")
    prod = AutomaticSequence.from_automaton(product(tm.automaton, shift(tm, 1).automaton))
    vals = prod.exact_values(100000)
    for n in range(100000):
        nu = ((n + 1) & -(n + 1)).bit_length() - 1
        assert vals[n] == (-1) ** (nu + 1), n
    return "t(n) t(n+1) = (-1)^(nu_2(n+1)+1) for n < 10^5"


def check_invertible_products(rng) -> str:
    names = [n for n in BUILTINS if invertibility(builtin_sequence(n).automaton) is not None]
    for x in names:
        for y in names:
            a, b = builtin_sequence(x).automaton, builtin_sequence(y).automaton
            if a.base == b.base:
                assert invertibility(product(a, b)) is not None
    assert invertibility(nu2_parity()) is None
    return "products of invertible builtins stay invertible: " + ", ".join(names)


def check_orbits(rng, trials: int = 1000) -> str:
    exact = DynSystem("skew", Fraction(3, 7))
    floating = DynSystem("skew", math.sqrt(2) - 1)
    worst = 0.0
    for _ in range(trials):
        m, n = (int(v) for v in rng.integers(0, 10**6, 2))
        p = (Fraction(int(rng.integers(1000)), 1000), Fraction(int(rng.integers(1000)), 1000))
        assert exact.orbit_exact(p, m + n) == exact.orbit_exact(exact.orbit_exact(p, n), m)
        x = tuple(float(v) for v in rng.random(2))
        direct = np.array([c[0] for c in floating.orbit(x, np.array([m + n]))])
        mid = tuple(float(c[0]) for c in floating.orbit(x, np.array([n])))
        composed = np.array([c[0] for c in floating.orbit(mid, np.array([m]))])
        diff = np.abs((direct - composed + 0.5) % 1.0 - 0.5)
        worst = max(worst, float(diff.max()))
    assert worst <= 1e-8, worst
    return f"exact composition; floating drift {worst:.3g}"


CHECKS: dict[str, Callable] = {
    "three-method agreement": check_three_methods,
    "Thue-Morse closed form": check_tm_closed_form,
    "kernel closure sizes": check_kernel_closure,
    "frequency row sums": check_frequencies,
    "normalization idempotence": check_normalization,
    "construction fidelity": check_constructions,
    "cycle gcd invariance": check_cycle_gcd,
    "partial sums": check_partial_sums,
    "van der Corput": check_vdc,
    "multiplicativity": check_multiplicativity,
    "invertible products": check_invertible_products,
    "orbit composition": check_orbits,
}


def run_checks(seed: int = 0, only=None) -> list[CheckResult]:
    results = []
    for name, fn in CHECKS.items():
        if only and name not in only:
            continue
        rng = np.random.default_rng(seed)
        start = time.perf_counter()
        try:
            detail = fn(rng)
            ok = True
        except AssertionError as exc:
            detail, ok = f"FAILED: {exc}", False
        results.append(CheckResult(name, ok, detail, time.perf_counter() - start))
    return results
