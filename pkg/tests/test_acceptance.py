"""Acceptance suite: one test per criterion, numbered 1-13, tolerances as specified."""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from autoseq.analysis import invertible_decomposition, is_balanced, is_totally_balanced, mean
from autoseq.automaton import AutomaticSequence, AutomatonError, base_change, restrict_ap
from autoseq.builtins import BUILTINS, builtin_sequence, mod3_tracker, thue_morse
from autoseq.equidist import HypothesisError, linear_points, partition_bound_check, vdc_check
from autoseq.ergodic import DynSystem, Observable, convergence_report, counterexample_demo, spectral_oracle, weighted_average
from autoseq.expsum import poly_sup_sample, sample_phases, sup_linear, tm_product_oracle, transfer_means
from autoseq.invariants import run_checks
from autoseq.phase import GOLDEN, SQRT2, PhasePolynomial
from autoseq.structure import cycle_gcd

from oracles import brute_cycle_gcd

SEED = 20261019


def test_01_gelfond_decay_slope():
    tm = builtin_sequence("thue-morse")
    start = time.perf_counter()
    lengths = list(range(8, 23))
    sups = [sup_linear(tm, 2**L, 1e-6) for L in lengths]
    elapsed = time.perf_counter() - start
    assert all(rep.error_bound <= 1e-6 for rep in sups)
    slope = np.polyfit(lengths, [math.log2(rep.value) for rep in sups], 1)[0]
    c = -slope
    print(f"fitted c = {c:.6f} (1 - log3/log4 = {1 - math.log(3) / math.log(4):.6f}), {elapsed:.1f}s")
    assert 0.18 <= c <= 0.25
    assert elapsed < 120


def test_02_closed_form_product():
    rng = np.random.default_rng(SEED)
    tm = builtin_sequence("thue-morse")
    alphas = rng.random(1000)
    lengths = rng.integers(0, 21, 1000)
    worst = 0.0
    for alpha, L in zip(alphas, lengths):
        got = abs(transfer_means(tm, [float(alpha)], int(L))[0])
        worst = max(worst, abs(got - tm_product_oracle(float(alpha), int(L))))
    assert worst <= 1e-10


def test_03_attained_bound_at_n4():
    rep = sup_linear(builtin_sequence("thue-morse"), 4, 1e-6)
    assert abs(rep.value - 4 / (3 * math.sqrt(3))) <= 1e-6


@pytest.mark.parametrize("name", list(BUILTINS))
def test_04_construction_fidelity(name):
    seq = builtin_sequence(name)
    n = 10**5
    direct = seq.values(n)
    for q in range(1, 51):
        for r in range(q):
            sub = restrict_ap(seq, q, r)
            assert np.array_equal(sub.values(len(range(r, n, q))), direct[r::q]), (q, r)
    for level in (2, 3):
        big = AutomaticSequence(base_change(seq.automaton, level))
        assert np.array_equal(big.values(n), direct)


def test_05_cycle_gcd_against_loop_enumeration():
    for automaton, expected in ((thue_morse(), 1), (mod3_tracker(), 3)):
        assert cycle_gcd(automaton) == expected
        for s in range(automaton.n_states):
            assert brute_cycle_gcd(automaton, s, 6) == expected


def test_06_balancedness_certificates():
    assert is_totally_balanced(builtin_sequence("thue-morse"), 12).holds
    alt = builtin_sequence("alternating")
    assert is_balanced(alt).balanced
    cert = is_totally_balanced(alt, 12)
    assert not cert.holds and cert.witness == (2, 0)
    log_len = builtin_sequence("log-length")
    for l in range(1, 12):
        assert mean(log_len, 2 ** (2 * l + 1)) / mean(log_len, 2 ** (2 * l)) == Fraction(1, 2)
    demo = counterexample_demo(1 << 24)
    assert demo.closed_form_ok and demo.halving_ok
    assert demo.gap >= Fraction(3, 10)


def test_07_invertible_decomposition():
    seq = builtin_sequence("gtm3")
    dec = invertible_decomposition(seq)
    n = 10**5
    vals, bal = seq.exact_values(n), dec.balanced.exact_values(n)
    assert all(vals[m] == dec.per(m) + bal[m] for m in range(n))
    assert is_totally_balanced(dec.balanced, 12).holds
    with pytest.raises(AutomatonError, match="does not admit a decomposition"):
        invertible_decomposition(builtin_sequence("nu2-parity"))
    # the tested means are E_{n<N} bal(q n + r), exact, at N = 10^6
    means = {
        (q, r): abs(float(mean(restrict_ap(dec.balanced, q, r), 10**6))) for q in range(1, 13) for r in range(q)
    }
    worst = max(means, key=means.get)
    assert means[worst] < 0.01, f"mean along {worst} is {means[worst]:.7g} at N = 10^6"


def test_08_spectral_identity():
    rng = np.random.default_rng(SEED)
    names = list(BUILTINS)
    worst = 0.0
    for _ in range(50):
        system = DynSystem("rotation", float(rng.choice([GOLDEN, SQRT2 - 1, float(rng.random())])))
        m = int(rng.choice([-3, -2, -1, 1, 2, 3, 5]))
        seq = builtin_sequence(names[int(rng.integers(len(names)))])
        p = PhasePolynomial((int(rng.integers(0, 10)), int(rng.integers(1, 6))))
        x0 = float(rng.random())
        trace = weighted_average(system, Observable.character(m), seq, p, [(x0,)], [10**5])
        worst = max(worst, abs(trace.values[0, 0] - spectral_oracle(system, m, seq, p, 10**5, x0)))
    assert worst <= 1e-8


def test_09_skew_quadratic_desk_check():
    rep = convergence_report(
        DynSystem("skew", SQRT2 - 1),
        Observable.character(1, 2),
        builtin_sequence("thue-morse"),
        PhasePolynomial((0, 0, 1)),
        n_points=32,
        schedule=[2**j for j in range(14, 21)],
        seed=0,
    )
    print("L2 by checkpoint:", [f"{v:.4g}" for v in rep.l2])
    assert all(b < a for a, b in zip(rep.l2, rep.l2[1:]))
    assert rep.l2[-1] < 0.05


def test_10_van_der_corput_random_trials():
    rng = np.random.default_rng(SEED)
    n = 10**4
    violations = 0
    for trial in range(1000):
        h = (8, 16, 32)[trial % 3]
        kind = trial % 4
        size = n + h
        if kind == 0:
            x = rng.random(size) * np.exp(2j * np.pi * rng.random(size))
        elif kind == 1:
            x = rng.choice([-1.0, 1.0], size)
        elif kind == 2:
            x = np.exp(2j * np.pi * rng.random(size))
        else:
            x = rng.uniform(-1, 1, size)
        violations += not vdc_check(x, h, n).holds
    assert violations == 0


def test_11_partition_bound():
    rng = np.random.default_rng(SEED)
    satisfied, margins = 0, []
    while satisfied < 200:
        alpha = float(rng.random())
        n = int(rng.choice([10**4, 10**5]))
        r = int(rng.integers(1, 4))
        kind = satisfied % 3
        if kind == 0:
            labels = rng.integers(0, r, n)
        elif kind == 1:
            cuts = np.sort(rng.random(r - 1))
            labels = np.searchsorted(cuts, linear_points(alpha, n))
        else:
            labels = np.minimum(np.arange(n) * r // n, r - 1)
        try:
            res = partition_bound_check(alpha, n, labels)
        except HypothesisError:
            continue
        satisfied += 1
        margins.append(res.margin)
    assert min(margins) > 0


def test_12_polynomial_phase_decay():
    tm = builtin_sequence("thue-morse")
    phases = sample_phases(2, 200, seed=0)
    small = poly_sup_sample(tm, 2, 2**12, phases=phases)
    large = poly_sup_sample(tm, 2, 2**20, phases=phases)
    print(f"max |mean|: N=2^12 {small.max_abs:.4g}, N=2^20 {large.max_abs:.4g}")
    assert large.max_abs <= 0.5 * small.max_abs


def test_13_invariant_suite():
    start = time.perf_counter()
    results = run_checks(seed=0)
    elapsed = time.perf_counter() - start
    failed = [f"{r.name}: {r.detail}" for r in results if not r.passed]
    assert not failed, failed
    names = {r.name for r in results}
    for required in ("three-method agreement", "kernel closure sizes", "frequency row sums", "normalization idempotence"):
        assert required in names
    assert elapsed < 300
