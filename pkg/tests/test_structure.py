import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from autoseq.automaton import Automaton, AutomatonError
from autoseq.builtins import BUILTINS, builtin_automaton, builtin_sequence, length_parity_swap, mod3_tracker, thue_morse
from autoseq.structure import (
    check_aperiodic,
    cycle_gcd,
    decompose_aperiodic,
    frequencies,
    invertibility,
    is_strongly_connected,
    multiplicative_order,
    scc_analysis,
)

from oracles import brute_cycle_gcd, brute_eval, run, word_int


def test_scc_of_paperfold():
    a = builtin_automaton("paperfold")
    report = scc_analysis(a)
    assert len(report) == 4
    assert sorted(report.terminal_components) == [(2,), (3,)]
    # topological order: every edge goes forward
    assert all(u < v for u, v in report.edges)


@given(st.integers(1, 6), st.integers(2, 3), st.data())
def test_scc_reachability_matches_closure(n, k, data):
    delta = [[data.draw(st.integers(0, n - 1)) for _ in range(k)] for _ in range(n)]
    a = Automaton(k, delta)
    report = scc_analysis(a)

    def reach(s):
        seen, stack = {s}, [s]
        while stack:
            for t in delta[stack.pop()]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    for x in range(n):
        for y in range(n):
            same = y in reach(x) and x in reach(y)
            assert same == (report.component_of[x] == report.component_of[y])


@pytest.mark.parametrize("automaton,expected", [(thue_morse(), 1), (mod3_tracker(), 3)])
def test_cycle_gcd_matches_loop_enumeration(automaton, expected):
    assert cycle_gcd(automaton) == expected
    for s in range(automaton.n_states):
        assert brute_cycle_gcd(automaton, s, 6) == expected


@pytest.mark.parametrize("name", [n for n in BUILTINS if is_strongly_connected(builtin_sequence(n).automaton)])
def test_cycle_gcd_builtins_against_brute(name):
    a = builtin_sequence(name).automaton
    d = cycle_gcd(a)
    assert math.gcd(d, a.base) == 1
    for s in range(a.n_states):
        assert brute_cycle_gcd(a, s, 6) == d


def test_cycle_gcd_requires_strong_connectivity():
    with pytest.raises(AutomatonError, match="strong connectivity"):
        cycle_gcd(builtin_automaton("paperfold"))


def test_aperiodicity_certificates():
    assert check_aperiodic(thue_morse()).holds
    cert = check_aperiodic(mod3_tracker())
    assert not cert and cert.cycle_gcd == 3
    swap = check_aperiodic(length_parity_swap())
    assert swap.cycle_gcd == 1 and not swap.holds
    assert "0" in swap.reason


@pytest.mark.parametrize("name,base,q", [("thue-morse", 2, 1), ("mod3", 4, 3)])
def test_decompose_aperiodic(name, base, q):
    seq = builtin_sequence(name)
    dec = decompose_aperiodic(seq)
    assert (dec.base, dec.q) == (base, q)
    assert dec.all_aperiodic
    for m in range(3000):
        assert dec.parts[m % dec.q](m // dec.q) == seq(m)


def empirical_frequencies(a, q, length):
    counts = {}
    for word in itertools.product(range(a.base), repeat=length):
        key = (run(a.delta, a.initial, word), word_int(word, a.base) % q)
        counts[key] = counts.get(key, 0) + 1
    total = a.base**length
    return {key: Fraction(c * q, total) for key, c in counts.items()}


def tm_residue_error(q, length):
    """Largest possible |empirical - limit| for Thue-Morse at word length ``length``.

    Counting (parity, residue) pairs with characters gives main term 1/(2q) plus
    products of ``1 +- zeta^(h 2^l)``; this is their total size scaled by ``q``.
    """
    import cmath

    worst = 0.0
    for sign in (1, -1):
        for h in range(1, q):
            prod = 1.0
            for l in range(length):
                prod *= abs(1 + sign * cmath.exp(2j * math.pi * h * 2**l / q))
            worst += prod
    return worst / 2**length / 2


@pytest.mark.parametrize("q", [1, 3, 5, 7])
def test_thue_morse_frequencies_are_uniform(q):
    freq = frequencies(thue_morse(), q)
    assert freq.exact
    assert all(v == Fraction(1, 2) for v in freq.table.values())
    length = 12
    emp = empirical_frequencies(thue_morse(), q, length)
    tol = tm_residue_error(q, length) + 1e-12
    for key, v in freq.table.items():
        assert abs(emp.get(key, 0) - v) <= tol


def test_mod3_frequencies_follow_residue():
    a = mod3_tracker()
    freq = frequencies(a, 3)
    length = 12
    emp = empirical_frequencies(a, 3, length)
    for (s, r), v in freq.table.items():
        # the only error is the incomplete last residue class
        assert abs(v - emp.get((s, r), 0)) <= Fraction(3, 2**length)
    assert freq.residue_spread() == 1


@pytest.mark.parametrize("name", ["thue-morse", "rudin-shapiro", "gtm6"])
def test_frequency_rows_sum_to_one(name):
    a = builtin_sequence(name).automaton
    for q in (1, 5, 7, 11):
        if math.gcd(q, a.base) != 1:
            continue
        freq = frequencies(a, q)
        for r in range(q):
            assert freq.row_sum(r) == 1 if freq.exact else abs(freq.row_sum(r) - 1) < 1e-12


def test_frequencies_reject_shared_factor():
    with pytest.raises(AutomatonError, match="factor out"):
        frequencies(thue_morse(), 6)


def test_multiplicative_order():
    assert multiplicative_order(2, 7) == 3
    assert multiplicative_order(3, 8) == 2
    assert multiplicative_order(2, 1) == 1


@pytest.mark.parametrize("name,order", [("thue-morse", 2), ("gtm3", 3), ("gtm6", 6), ("mod3", 6)])
def test_invertible_builtins(name, order):
    a = builtin_automaton(name)
    group = invertibility(a)
    assert group is not None and group.order == order
    for n in range(500):
        assert group.value(n, a.base) == brute_eval(a, n)


def test_zero_identity_flag():
    assert invertibility(thue_morse()).zero_is_identity
    assert not invertibility(mod3_tracker()).zero_is_identity


@pytest.mark.parametrize("name", ["nu2-parity", "paperfold", "alternating"])
def test_non_invertible(name):
    assert invertibility(builtin_automaton(name)) is None
