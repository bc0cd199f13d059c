import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from autoseq.automaton import AutomatonError
from autoseq.builtins import BUILTINS, builtin_sequence
from autoseq.expsum import (
    SupBudgetError,
    exp_sum_direct,
    exp_sum_interval,
    exp_sum_transfer,
    interval_means,
    poly_sup_sample,
    sample_phases,
    sup_linear,
    tm_product_oracle,
    transfer_matrix,
    transfer_means,
)
from autoseq.phase import PhasePolynomial

from oracles import brute_values, naive_mean, run, word_int

names = st.sampled_from(list(BUILTINS))
alphas = st.floats(0, 1, exclude_max=True)


@given(names, alphas, st.integers(1, 1500))
def test_direct_matches_naive_loop(name, alpha, n):
    seq = builtin_sequence(name)
    want = naive_mean(brute_values(seq.automaton, n), lambda m: alpha * m)
    assert abs(exp_sum_direct(seq, alpha, n).mean - want) < 1e-12


@given(names, st.lists(st.fractions(0, 1, max_denominator=30), min_size=2, max_size=4), st.integers(1, 800))
def test_direct_polynomial_phase_matches_exact_naive(name, coeffs, n):
    seq = builtin_sequence(name)
    p = PhasePolynomial(tuple(coeffs))
    want = naive_mean(brute_values(seq.automaton, n), lambda m: sum(c * m**i for i, c in enumerate(coeffs)))
    assert abs(exp_sum_direct(seq, p, n).mean - want) < 1e-12


@given(names, alphas, st.integers(0, 12))
def test_transfer_matches_direct(name, alpha, length):
    seq = builtin_sequence(name)
    n = seq.base**length
    if n > 5 * 10**5:
        return
    assert abs(exp_sum_transfer(seq, alpha, length).mean - exp_sum_direct(seq, alpha, n).mean) < 1e-12


@given(names, alphas, st.integers(1, 20000))
def test_interval_matches_direct(name, alpha, n):
    seq = builtin_sequence(name)
    assert abs(exp_sum_interval(seq, alpha, n).mean - exp_sum_direct(seq, alpha, n).mean) < 1e-12


@given(names, st.fractions(0, 1, max_denominator=50), st.integers(1, 5000))
def test_interval_rational_alpha(name, alpha, n):
    seq = builtin_sequence(name)
    want = naive_mean(brute_values(seq.automaton, n), lambda m: alpha * m)
    assert abs(exp_sum_interval(seq, alpha, n).mean - want) < 1e-12


def test_interval_means_vectorised():
    seq = builtin_sequence("rudin-shapiro")
    grid = np.linspace(0, 1, 64, endpoint=False)
    many = interval_means(seq, grid, 3 * 2**10 + 5)
    for a, v in zip(grid, many):
        assert abs(v - exp_sum_direct(seq, float(a), 3 * 2**10 + 5).mean) < 1e-12


def test_interval_rejects_quadratic():
    with pytest.raises(AutomatonError, match="linear"):
        exp_sum_interval(builtin_sequence("thue-morse"), PhasePolynomial((0, 0, 0.3)), 100)


@pytest.mark.parametrize("name", ["thue-morse", "rudin-shapiro", "gtm3"])
def test_transfer_matrix_counts_words(name):
    seq = builtin_sequence(name)
    a = seq.automaton
    alpha, length = 0.3141, 4
    t = transfer_matrix(seq, alpha, length)
    want = np.zeros_like(t)
    for w in itertools.product(range(a.base), repeat=length):
        for s in range(a.n_states):
            want[s, run(a.delta, s, w)] += np.exp(2j * math.pi * alpha * word_int(w, a.base))
    assert np.allclose(t, want, atol=1e-12)


@given(alphas, st.integers(0, 20))
def test_thue_morse_product_formula(alpha, length):
    tm = builtin_sequence("thue-morse")
    assert abs(abs(transfer_means(tm, [alpha], length)[0]) - tm_product_oracle(alpha, length)) < 1e-10


def test_sup_small_case_is_attained():
    rep = sup_linear(builtin_sequence("thue-morse"), 4, 1e-6)
    assert abs(rep.value - 4 / (3 * math.sqrt(3))) < 1e-6
    assert rep.error_bound <= 1e-6


@pytest.mark.parametrize("name,n", [("thue-morse", 1000), ("rudin-shapiro", 777), ("gtm3", 729)])
def test_sup_brackets_dense_grid(name, n):
    seq = builtin_sequence(name)
    rep = sup_linear(seq, n, 1e-7)
    grid = np.arange(200_000) / 200_000
    brute = float(np.abs(interval_means(seq, grid, n)).max())
    assert brute <= rep.value + rep.error_bound + 1e-12
    assert abs(abs(exp_sum_direct(seq, rep.alpha, n).mean) - rep.value) < 1e-12
    assert 0 <= rep.alpha < 1


def test_sup_budget_error_reports_grid():
    with pytest.raises(SupBudgetError) as info:
        sup_linear(builtin_sequence("thue-morse"), 2**12, 1e-12, max_grid=1 << 12, max_cells=16)
    assert info.value.required > 0


def test_phase_sample_is_seeded_and_mixed():
    a = sample_phases(2, 30, seed=5)
    b = sample_phases(2, 30, seed=5)
    assert [p for _, p in a] == [p for _, p in b]
    assert {kind for kind, _ in a} == {"random", "rational", "near"}
    assert all(1 <= p.degree <= 2 for _, p in a)


def test_poly_sample_matches_direct():
    seq = builtin_sequence("thue-morse")
    phases = sample_phases(2, 12, seed=1)
    sample = poly_sup_sample(seq, 2, 3000, phases=phases)
    for (_, p), rep in zip(phases, sample.reports):
        assert abs(rep.mean - exp_sum_direct(seq, p, 3000).mean) < 1e-12


def test_constant_phase_reduces_to_partial_sum():
    seq = builtin_sequence("mod3")
    rep = exp_sum_direct(seq, PhasePolynomial((Fraction(1, 4),)), 3000)
    assert abs(rep.mean - 1j / 3) < 1e-15
