from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from autoseq.automaton import (
    AutomaticSequence,
    Automaton,
    AutomatonError,
    base_change,
    canonical_form,
    cokernel_family,
    cokernel_outputs,
    digits,
    isomorphic,
    kernel_family,
    minimize,
    normalize_leading_zeros,
    product,
    restrict_ap,
    shift,
    word_value,
)
from autoseq.builtins import BUILTINS, builtin_sequence, length_parity_swap, log_length_raw

from oracles import brute_eval, brute_values, thue_morse_value


@st.composite
def automata(draw, max_states=5):
    k = draw(st.integers(2, 3))
    n = draw(st.integers(1, max_states))
    delta = [[draw(st.integers(0, n - 1)) for _ in range(k)] for _ in range(n)]
    output = [draw(st.integers(-2, 2)) for _ in range(n)]
    return Automaton(k, delta, 0, output)


def test_digits_round_trip():
    for k in (2, 3, 10):
        for n in range(500):
            assert word_value(digits(n, k), k) == n
    assert digits(0, 2) == []
    assert digits(6, 2) == [0, 1, 1]
    assert digits(5, 2, length=5) == [1, 0, 1, 0, 0]


def test_thue_morse_values():
    tm = builtin_sequence("thue-morse")
    assert tm(3) == 1
    assert [tm(n) for n in range(8)] == [1, -1, -1, 1, -1, 1, 1, -1]
    assert tm.exact_values(4096) == [thue_morse_value(n) for n in range(4096)]


@pytest.mark.parametrize("name", list(BUILTINS))
def test_vectorised_values_match_scalar(name):
    seq = builtin_sequence(name)
    vals = seq.values(700)
    for n in range(700):
        assert vals[n] == complex(seq(n))


@given(automata())
def test_normalization_preserves_integer_evaluation(a):
    seq = AutomaticSequence.from_automaton(a)
    assert seq.automaton.ignores_leading_zeros
    assert seq.exact_values(300) == brute_values(a, 300)


@given(automata())
def test_normalization_idempotent(a):
    once = normalize_leading_zeros(a)
    assert isomorphic(normalize_leading_zeros(once), once)


def test_raw_log_length_needs_normalization():
    raw = log_length_raw()
    assert not raw.ignores_leading_zeros
    with pytest.raises(AutomatonError, match="leading zeros"):
        AutomaticSequence(raw)
    seq = AutomaticSequence.from_automaton(raw)
    assert [seq(n) for n in range(1, 17)] == [(n.bit_length() - 1) % 2 for n in range(1, 17)]


def test_incomplete_automaton_rejected():
    a = Automaton(2, [[0, 1], [1, 0]])
    with pytest.raises(AutomatonError, match="incomplete automaton"):
        a.eval(5)
    with pytest.raises(AutomatonError, match="incomplete automaton"):
        AutomaticSequence.from_automaton(a)


def test_malformed_automata():
    with pytest.raises(AutomatonError):
        Automaton(1, [[0]], 0, [1])
    with pytest.raises(AutomatonError, match="not total"):
        Automaton(2, [[0]], 0, [1])
    with pytest.raises(AutomatonError):
        Automaton(2, [[0, 2]], 0, [1])


@given(automata(), automata())
def test_product_is_pointwise(a, b):
    if a.base != b.base:
        with pytest.raises(AutomatonError, match="base mismatch"):
            product(a, b)
        return
    p = product(a, b)
    for n in range(200):
        assert brute_eval(p, n) == brute_eval(a, n) * brute_eval(b, n)


@given(st.sampled_from(list(BUILTINS)), st.integers(1, 15), st.data())
def test_restrict_ap_matches_direct(name, q, data):
    r = data.draw(st.integers(0, q - 1))
    seq = builtin_sequence(name)
    sub = restrict_ap(seq, q, r)
    assert sub.automaton.ignores_leading_zeros
    vals = brute_values(seq.automaton, 40 * q)
    assert sub.exact_values(40) == vals[r::q][:40]


@given(st.sampled_from(list(BUILTINS)), st.integers(0, 40))
def test_shift_matches_direct(name, h):
    seq = builtin_sequence(name)
    vals = brute_values(seq.automaton, 300 + h)
    assert shift(seq, h).exact_values(300) == vals[h:]


@given(st.sampled_from(list(BUILTINS)), st.integers(1, 4))
def test_base_change_matches_direct(name, level):
    seq = builtin_sequence(name)
    big = AutomaticSequence(base_change(seq.automaton, level))
    assert big.base == seq.base**level
    assert big.exact_values(600) == brute_values(seq.automaton, 600)


def test_base_change_collapses_swap_automaton():
    swap = length_parity_swap()
    assert base_change(swap, 1).n_states == 2
    assert base_change(swap.with_initial(0), 2).prune().n_states == 1


@given(automata())
def test_minimize_preserves_words_and_is_canonical(a):
    m = minimize(a)
    assert m.n_states <= a.n_states
    assert canonical_form(minimize(m)) == canonical_form(m)
    assert brute_values(m, 200) == brute_values(a, 200)


@pytest.mark.parametrize("name,size", [("thue-morse", 2), ("rudin-shapiro", 4), ("const", 1), ("gtm3", 3)])
def test_kernel_sizes(name, size):
    assert len(kernel_family(builtin_sequence(name))) == size


@pytest.mark.parametrize("name", list(BUILTINS))
def test_kernel_family_covers_brute_kernel(name):
    seq = builtin_sequence(name)
    k = seq.base
    family = {tuple(s.exact_values(64)) for s in kernel_family(seq)}
    vals = brute_values(seq.automaton, 64 * k**3)
    for level in range(4):
        for m in range(k**level):
            assert tuple(vals[k**level * n + m] for n in range(64)) in family


@pytest.mark.parametrize("name", list(BUILTINS))
def test_cokernel_is_closed_and_first_is_tau(name):
    a = builtin_sequence(name).automaton
    outs = cokernel_outputs(a)
    assert outs[0] == a.output
    closed = set(outs)
    for tau in outs:
        for j in range(a.base):
            assert tuple(tau[a.delta[s][j]] for s in range(a.n_states)) in closed
    assert len(cokernel_family(a)) == len(outs)


def test_exact_values_keep_fractions():
    seq = builtin_sequence("gtm3")
    assert seq(1) == Fraction(-1, 2)
    assert seq.automaton.is_exact
