"""Named example automata."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .automaton import Automaton, AutomaticSequence, normalize_leading_zeros, product, shift

__all__ = [
    "BUILTINS",
    "builtin_automaton",
    "builtin_sequence",
    "builtin_names",
    "thue_morse",
    "rudin_shapiro",
    "nu2_parity",
    "log_length",
    "log_length_raw",
    "length_parity_swap",
    "paperfold",
    "gtm3",
    "gtm6",
    "alternating",
    "constant",
    "mod3_tracker",
    "tm_odd_pattern",
]

HALF = Fraction(1, 2)


def thue_morse() -> Automaton:
    return Automaton(2, [[0, 1], [1, 0]], 0, [1, -1], ["even", "odd"])


def rudin_shapiro() -> Automaton:
    """(-1)^(number of adjacent 11 pairs); state = (parity, last digit)."""
    states = [(p, b) for p in (0, 1) for b in (0, 1)]
    index = {st: i for i, st in enumerate(states)}
    delta = [[index[(p ^ (b & j), j)] for j in (0, 1)] for p, b in states]
    output = [(-1) ** p for p, _ in states]
    return Automaton(2, delta, 0, output, [f"p{p}b{b}" for p, b in states])


def nu2_parity() -> Automaton:
    """(-1)^(2-adic valuation of n), with a(0) = 1."""
    # even/odd count of low zeros so far, then frozen once the first 1 is read
    delta = [[1, 2], [0, 3], [2, 2], [3, 3]]
    return Automaton(2, delta, 0, [1, 1, 1, -1], ["zeros_even", "zeros_odd", "plus", "minus"])


def log_length_raw() -> Automaton:
    """floor(log2 n) mod 2 counted on the padded word; does not ignore leading zeros."""
    return Automaton(2, [[1, 1], [2, 2], [1, 1]], 0, [0, 0, 1], ["empty", "len_odd", "len_even"])


def log_length() -> Automaton:
    """a(n) = floor(log2 n) mod 2, a(0) = 0, normalised."""
    return normalize_leading_zeros(log_length_raw())


def length_parity_swap() -> Automaton:
    """Two states swapped by every digit: the word-length parity automaton."""
    return Automaton(2, [[1, 1], [0, 0]], 0, [0, 1], ["even_len", "odd_len"])


def paperfold() -> Automaton:
    """Regular paperfolding: sign fixed by the digit above the lowest 1."""
    delta = [[0, 1], [2, 3], [2, 2], [3, 3]]
    return Automaton(2, delta, 0, [1, 1, 1, -1], ["zeros", "first_one", "plus", "minus"])


def gtm3() -> Automaton:
    """Re omega^(s_3(n)) for omega a primitive cube root of unity."""
    delta = [[(i + j) % 3 for j in range(3)] for i in range(3)]
    return Automaton(3, delta, 0, [1, -HALF, -HALF], ["r0", "r1", "r2"])


def gtm6() -> Automaton:
    """(-1)^(s_3(n)) + Re omega^(s_3(n)): invertible with a nonzero periodic part."""
    re_omega = [1, -HALF, -HALF]
    delta = [[(i + j) % 6 for j in range(3)] for i in range(6)]
    output = [(-1) ** i + re_omega[i % 3] for i in range(6)]
    return Automaton(3, delta, 0, output, [f"r{i}" for i in range(6)])


def alternating() -> Automaton:
    """(-1)^n: only the lowest digit matters."""
    return Automaton(2, [[1, 2], [1, 1], [2, 2]], 0, [1, 1, -1], ["start", "even", "odd"])


def constant(base: int = 2, value=1) -> Automaton:
    return Automaton(base, [[0] * base], 0, [value], ["const"])


def mod3_tracker() -> Automaton:
    """Indicator of 3 | n; state (n mod 3 so far, weight 2^t mod 3)."""
    states = [(r, w) for r in range(3) for w in (1, 2)]
    index = {st: i for i, st in enumerate(states)}
    delta = [[index[((r + j * w) % 3, (2 * w) % 3)] for j in (0, 1)] for r, w in states]
    output = [1 if r == 0 else 0 for r, _ in states]
    return Automaton(2, delta, index[(0, 1)], output, [f"r{r}w{w}" for r, w in states])


def tm_odd_pattern() -> Automaton:
    """t(n) (1 - (-1)^n) / 2: Thue-Morse on odd n, zero on even n."""
    return product(thue_morse(), alternating(), lambda t, e: t * (1 - e) / 2)


def tm_shift() -> Automaton:
    return shift(AutomaticSequence(thue_morse()), 1).automaton


BUILTINS: dict[str, tuple[Callable[[], Automaton], str]] = {
    "thue-morse": (thue_morse, "Thue-Morse (-1)^(s_2(n))"),
    "rudin-shapiro": (rudin_shapiro, "Rudin-Shapiro (-1)^(#11 blocks)"),
    "nu2-parity": (nu2_parity, "(-1)^(nu_2(n)), a(0) = 1"),
    "log-length": (log_length, "floor(log2 n) mod 2, a(0) = 0"),
    "paperfold": (paperfold, "regular paperfolding sequence in +-1"),
    "gtm3": (gtm3, "base-3 generalized Thue-Morse, Re omega^(s_3(n))"),
    "gtm6": (gtm6, "(-1)^(s_3(n)) + Re omega^(s_3(n))"),
    "alternating": (alternating, "(-1)^n"),
    "const": (constant, "constant 1"),
    "mod3": (mod3_tracker, "indicator of 3 | n"),
    "tm-odd": (tm_odd_pattern, "t(n) (1 - (-1)^n) / 2"),
    "tm-shift": (tm_shift, "t(n + 1)"),
}


def builtin_names() -> list[str]:
    return list(BUILTINS)


def builtin_automaton(name: str) -> Automaton:
    try:
        factory, _ = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}") from None
    return factory()


def builtin_sequence(name: str) -> AutomaticSequence:
    return AutomaticSequence.from_automaton(builtin_automaton(name), name)
