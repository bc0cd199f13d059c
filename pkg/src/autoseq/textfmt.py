"""Line-oriented automaton file format.

    # comment
    reading: lsd-first
    base: 2
    states: even odd
    initial: even
    output: even=1 odd=-1
    delta: even 0 -> even

Output values are exact when written as integers or ``p/q``; anything with a
decimal point, exponent or ``i`` suffix becomes a complex float.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

from .automaton import Automaton, AutomatonError

__all__ = ["ParseError", "parse_automaton", "parse_automaton_file", "format_automaton", "format_value", "parse_value"]

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")
_DELTA = re.compile(r"^(\S+)\s+(\d+)\s*->\s*(\S+)$")


class ParseError(AutomatonError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def parse_value(token: str):
    token = token.strip()
    if _RATIONAL.match(token):
        return Fraction(token)
    text = token.replace("i", "j")
    if text.endswith("j") and not re.search(r"\d", text[:-1].lstrip("+-")):
        text = text[:-1] + "1j"
    try:
        return complex(text)
    except ValueError:
        raise ValueError(f"bad output value {token!r}") from None


def format_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    v = complex(v)
    if v.imag == 0:
        return repr(v.real)
    return f"{v.real!r}{'+' if v.imag >= 0 else '-'}{abs(v.imag)!r}i"


def parse_automaton(text: str) -> Automaton:
    base = states = initial = None
    outputs: dict[str, object] = {}
    output_line = None
    deltas: dict[tuple[str, int], str] = {}
    delta_lines: dict[tuple[str, int], int] = {}
    reading = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ParseError(f"expected 'key: value', got {line!r}", lineno)
        key, rest = key.strip(), rest.strip()
        if key == "reading":
            if rest != "lsd-first":
                raise ParseError(f"unsupported reading order {rest!r}", lineno)
            reading = True
        elif key == "base":
            try:
                base = int(rest)
            except ValueError:
                raise ParseError(f"bad base {rest!r}", lineno) from None
            if base < 2:
                raise ParseError("base must be >= 2", lineno)
        elif key == "states":
            states = rest.split()
            if len(set(states)) != len(states) or not states:
                raise ParseError("state list empty or has duplicates", lineno)
        elif key == "initial":
            initial = rest
        elif key == "output":
            output_line = output_line or lineno
            for item in rest.split():
                name, eq, val = item.partition("=")
                if not eq:
                    raise ParseError(f"bad output entry {item!r}", lineno)
                if name in outputs:
                    raise ParseError(f"duplicate output for {name!r}", lineno)
                try:
                    outputs[name] = parse_value(val)
                except ValueError as exc:
                    raise ParseError(str(exc), lineno) from None
        elif key == "delta":
            m = _DELTA.match(rest)
            if not m:
                raise ParseError(f"malformed delta line {rest!r}", lineno)
            src, digit, dst = m.group(1), int(m.group(2)), m.group(3)
            if (src, digit) in deltas:
                raise ParseError(f"duplicate transition for ({src}, {digit})", lineno)
            deltas[(src, digit)] = dst
            delta_lines[(src, digit)] = lineno
        else:
            raise ParseError(f"unknown key {key!r}", lineno)
    if not reading:
        raise ParseError("missing header 'reading: lsd-first'")
    if base is None or states is None:
        raise ParseError("missing 'base:' or 'states:'")
    index = {s: i for i, s in enumerate(states)}
    for (src, digit), dst in deltas.items():
        line = delta_lines[(src, digit)]
        if src not in index or dst not in index:
            raise ParseError(f"unknown state in transition {src} {digit} -> {dst}", line)
        if digit >= base:
            raise ParseError(f"digit {digit} out of range for base {base}", line)
    missing = [(s, j) for s in states for j in range(base) if (s, j) not in deltas]
    if missing:
        s, j = missing[0]
        raise ParseError(f"delta is not total: no transition for ({s}, {j})")
    delta = [[index[deltas[(s, j)]] for j in range(base)] for s in states]
    if initial is not None and initial not in index:
        raise ParseError(f"unknown initial state {initial!r}")
    output = None
    if outputs:
        unknown = set(outputs) - set(index)
        if unknown:
            raise ParseError(f"output for unknown state {sorted(unknown)[0]!r}", output_line)
        if len(outputs) != len(states):
            raise ParseError("output map must cover every state", output_line)
        output = [outputs[s] for s in states]
    return Automaton(base, delta, None if initial is None else index[initial], output, states)


def parse_automaton_file(path) -> Automaton:
    return parse_automaton(Path(path).read_text(encoding="utf-8"))


def format_automaton(a: Automaton, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append("reading: lsd-first")
    lines.append(f"base: {a.base}")
    lines.append("states: " + " ".join(a.labels))
    if a.initial is not None:
        lines.append(f"initial: {a.labels[a.initial]}")
    if a.output is not None:
        lines.append("output: " + " ".join(f"{lab}={format_value(v)}" for lab, v in zip(a.labels, a.output)))
    for s, row in enumerate(a.delta):
        for j, t in enumerate(row):
            lines.append(f"delta: {a.labels[s]} {j} -> {a.labels[t]}")
    return "\n".join(lines) + "\n"
