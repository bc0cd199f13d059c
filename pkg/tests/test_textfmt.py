from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from autoseq.automaton import Automaton, isomorphic, minimize
from autoseq.builtins import BUILTINS, builtin_automaton
from autoseq.textfmt import ParseError, format_automaton, format_value, parse_automaton, parse_value

TM_TEXT = """\
# Thue-Morse
reading: lsd-first
base: 2
states: even odd
initial: even
output: even=1 odd=-1
delta: even 0 -> even
delta: even 1 -> odd
delta: odd 0 -> odd
delta: odd 1 -> even
"""


def test_parse_thue_morse():
    a = parse_automaton(TM_TEXT)
    assert a.n_states == 2 and a.base == 2
    assert a.eval(3) == 1 and a.eval(7) == -1


@pytest.mark.parametrize("name", list(BUILTINS))
def test_round_trip_builtins(name):
    a = builtin_automaton(name)
    b = parse_automaton(format_automaton(a, name))
    assert b.delta == a.delta and b.output == a.output and b.initial == a.initial
    assert isomorphic(minimize(a), minimize(b))


def test_missing_initial_gives_partial_automaton():
    a = parse_automaton(TM_TEXT.replace("initial: even\n", ""))
    assert a.initial is None and not a.is_complete


@pytest.mark.parametrize(
    "edit,match,line",
    [
        (lambda t: t.replace("reading: lsd-first\n", ""), "missing header", None),
        (lambda t: t.replace("lsd-first", "msd-first"), "reading order", 2),
        (lambda t: t + "delta: odd 1 -> odd\n", "duplicate transition", 11),
        (lambda t: t.replace("delta: odd 1 -> even\n", ""), "not total", None),
        (lambda t: t + "delta: odd 2 -> odd\n", "digit 2 out of range", 11),
        (lambda t: t.replace("delta: even 0 -> even", "delta: even zero even"), "malformed delta", 7),
        (lambda t: t.replace("output: even=1 odd=-1", "output: even=1"), "every state", 6),
        (lambda t: t.replace("output: even=1 odd=-1", "output: even=1 odd=-1 odd=1"), "duplicate output", 6),
        (lambda t: t + "colour: red\n", "unknown key", 11),
    ],
)
def test_parse_errors_name_the_line(edit, match, line):
    with pytest.raises(ParseError, match=match) as info:
        parse_automaton(edit(TM_TEXT))
    assert info.value.line == line
    if line is not None:
        assert str(info.value).startswith(f"line {line}:")


def test_values():
    assert parse_value("3/4") == Fraction(3, 4)
    assert parse_value("-2") == Fraction(-2)
    assert parse_value("0.5+1.5i") == complex(0.5, 1.5)
    assert parse_value("i") == 1j
    assert parse_value("-0.25") == -0.25


@given(st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e6))
def test_float_values_round_trip(z):
    assert complex(parse_value(format_value(z))) == z


@given(st.fractions(max_denominator=1000))
def test_fraction_values_round_trip(x):
    assert parse_value(format_value(x)) == x


def test_format_marks_complex_outputs():
    a = Automaton(2, [[0, 0]], 0, [0.5j])
    assert parse_automaton(format_automaton(a)).output == (0.5j,)
