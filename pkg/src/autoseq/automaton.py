"""Finite k-automata with output and the constructions on them.

Digits are always read least significant first: a word ``w = (w_0, ..., w_{l-1})``
has value ``sum(w_i * k**i)`` and ``run(s, w)`` feeds ``w_0`` first.  With this
convention a kernel element ``n -> a(k**l * n + m)`` is the same automaton started
from ``run(s0, padded digits of m)``, and leading zeros of ``n`` are the *last*
symbols read.
"""

from __future__ import annotations

import operator
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "AutomatonError",
    "Automaton",
    "AutomaticSequence",
    "digits",
    "word_value",
    "as_value",
    "evaluate",
    "normalize_leading_zeros",
    "product",
    "shift",
    "restrict_ap",
    "base_change",
    "minimize",
    "canonical_form",
    "isomorphic",
    "kernel_family",
    "cokernel_outputs",
    "cokernel_family",
]

# Largest transition table base_change will materialise (entries).
MAX_TABLE = 1 << 24


class AutomatonError(ValueError):
    """Raised for malformed automata or operations whose preconditions fail."""


def digits(n: int, k: int, length: int | None = None) -> list[int]:
    """Base-k digits of ``n``, least significant first, optionally zero padded."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = []
    while n:
        n, j = divmod(n, k)
        out.append(j)
    if length is not None:
        if len(out) > length:
            raise ValueError(f"{n} does not fit in {length} digits")
        out.extend([0] * (length - len(out)))
    return out


def word_value(word: Iterable[int], k: int) -> int:
    total, weight = 0, 1
    for j in word:
        total += j * weight
        weight *= k
    return total


def as_value(v):
    """Coerce an output value: integers and rationals stay exact, the rest is complex."""
    if isinstance(v, bool):
        v = int(v)
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, complex):
        return v
    if isinstance(v, (float, np.floating)):
        return complex(float(v))
    if isinstance(v, (np.integer,)):
        return Fraction(int(v))
    if isinstance(v, np.complexfloating):
        return complex(v)
    raise AutomatonError(f"unsupported output value {v!r}")


@dataclass(frozen=True, eq=False)
class Automaton:
    """A k-automaton ``(S, s0, delta, tau)``; ``initial`` and ``output`` are optional.

    States are the integers ``0..n-1``; ``labels`` only matter for text I/O.
    """

    base: int
    delta: tuple[tuple[int, ...], ...]
    initial: int | None = None
    output: tuple | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        k = self.base
        if not isinstance(k, int) or k < 2:
            raise AutomatonError(f"base must be an integer >= 2, got {k!r}")
        delta = tuple(tuple(int(t) for t in row) for row in self.delta)
        n = len(delta)
        if n == 0:
            raise AutomatonError("automaton needs at least one state")
        for s, row in enumerate(delta):
            if len(row) != k:
                raise AutomatonError(f"delta is not total at state {s}")
            for t in row:
                if not 0 <= t < n:
                    raise AutomatonError(f"transition from state {s} leaves the state set")
        object.__setattr__(self, "delta", delta)
        if self.initial is not None and not 0 <= self.initial < n:
            raise AutomatonError("initial state out of range")
        if self.output is not None:
            if len(self.output) != n:
                raise AutomatonError("output must assign a value to every state")
            object.__setattr__(self, "output", tuple(as_value(v) for v in self.output))
        labels = self.labels
        if labels is None:
            labels = tuple(f"s{i}" for i in range(n))
        elif len(labels) != n or len(set(labels)) != n:
            raise AutomatonError("labels must be distinct, one per state")
        object.__setattr__(self, "labels", tuple(str(x) for x in labels))

    # -- basic queries -------------------------------------------------------

    @property
    def n_states(self) -> int:
        return len(self.delta)

    @property
    def is_complete(self) -> bool:
        return self.initial is not None and self.output is not None

    def step(self, s: int, j: int) -> int:
        return self.delta[s][j]

    def run(self, s: int, word: Iterable[int]) -> int:
        delta = self.delta
        for j in word:
            s = delta[s][j]
        return s

    def state_of(self, n: int, start: int | None = None) -> int:
        """State reached by reading the canonical expansion of ``n``."""
        s = self.initial if start is None else start
        if s is None:
            raise AutomatonError("incomplete automaton: no initial state")
        k, delta = self.base, self.delta
        while n:
            n, j = divmod(n, k)
            s = delta[s][j]
        return s

    def eval(self, n: int):
        if not self.is_complete:
            raise AutomatonError("incomplete automaton")
        if n < 0:
            raise ValueError("n must be nonnegative")
        return self.output[self.state_of(n)]

    def eval_word(self, word: Sequence[int]):
        if not self.is_complete:
            raise AutomatonError("incomplete automaton")
        return self.output[self.run(self.initial, word)]

    def digit_map(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.delta)

    def reachable(self, start: int | None = None) -> list[int]:
        s0 = self.initial if start is None else start
        if s0 is None:
            return list(range(self.n_states))
        seen = {s0}
        queue = deque([s0])
        while queue:
            s = queue.popleft()
            for t in self.delta[s]:
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        return sorted(seen)

    @property
    def ignores_leading_zeros(self) -> bool:
        """``tau(delta(s, 0)) == tau(s)`` on every reachable state."""
        if self.output is None:
            return False
        out = self.output
        return all(out[self.delta[s][0]] == out[s] for s in self.reachable())

    def transition_counts(self) -> list[list[int]]:
        """``M[s][t] = #{j : delta(s, j) = t}``; row sums equal the base."""
        n = self.n_states
        m = [[0] * n for _ in range(n)]
        for s, row in enumerate(self.delta):
            for t in row:
                m[s][t] += 1
        return m

    def output_array(self) -> np.ndarray:
        if self.output is None:
            raise AutomatonError("incomplete automaton: no output")
        return np.array([complex(v) for v in self.output], dtype=np.complex128)

    @property
    def is_real(self) -> bool:
        return self.output is not None and all(
            isinstance(v, Fraction) or v.imag == 0 for v in self.output
        )

    @property
    def is_exact(self) -> bool:
        return self.output is not None and all(isinstance(v, Fraction) for v in self.output)

    def max_abs_output(self) -> float:
        return max(abs(complex(v)) for v in self.output)

    # -- cheap rewrites ------------------------------------------------------

    def with_initial(self, s: int | None) -> Automaton:
        return Automaton(self.base, self.delta, s, self.output, self.labels)

    def with_output(self, output: Sequence | None) -> Automaton:
        return Automaton(self.base, self.delta, self.initial, None if output is None else tuple(output), self.labels)

    def prune(self) -> Automaton:
        """Drop states unreachable from the initial state (renumbered in BFS order)."""
        if self.initial is None:
            return self
        order = _bfs_order(self)
        return _renumber(self, order)

    def restricted_to(self, states: Iterable[int]) -> Automaton:
        """Sub-automaton on a closed set of states (e.g. a terminal component)."""
        states = sorted(states)
        index = {s: i for i, s in enumerate(states)}
        try:
            delta = [[index[t] for t in self.delta[s]] for s in states]
        except KeyError:
            raise AutomatonError("state set is not closed under delta") from None
        initial = index.get(self.initial) if self.initial is not None else None
        output = None if self.output is None else [self.output[s] for s in states]
        return Automaton(self.base, delta, initial, output, [self.labels[s] for s in states])

    def __repr__(self):
        return (
            f"Automaton(base={self.base}, states={self.n_states}, initial={self.initial}, "
            f"output={'yes' if self.output is not None else 'no'})"
        )


def _bfs_order(a: Automaton) -> list[int]:
    order = [a.initial]
    seen = {a.initial}
    i = 0
    while i < len(order):
        for t in a.delta[order[i]]:
            if t not in seen:
                seen.add(t)
                order.append(t)
        i += 1
    return order


def _renumber(a: Automaton, order: list[int]) -> Automaton:
    index = {s: i for i, s in enumerate(order)}
    delta = [[index[t] for t in a.delta[s]] for s in order]
    output = None if a.output is None else [a.output[s] for s in order]
    initial = None if a.initial is None else index[a.initial]
    return Automaton(a.base, delta, initial, output, [a.labels[s] for s in order])


@dataclass(frozen=True, eq=False)
class AutomaticSequence:
    """An evaluable k-automatic sequence ``n -> tau(delta(s0, (n)_k))``.

    The automaton must be complete and ignore leading zeros, so that word and
    integer evaluation agree.
    """

    automaton: Automaton
    label: str = ""

    def __post_init__(self):
        a = self.automaton
        if not a.is_complete:
            raise AutomatonError("incomplete automaton")
        if not a.ignores_leading_zeros:
            raise AutomatonError(
                "automaton does not ignore leading zeros; apply normalize_leading_zeros first"
            )

    @classmethod
    def from_automaton(cls, a: Automaton, label: str = "") -> AutomaticSequence:
        """Wrap ``a``, normalising it first when needed."""
        if not a.is_complete:
            raise AutomatonError("incomplete automaton")
        if not a.ignores_leading_zeros:
            a = normalize_leading_zeros(a)
        return cls(a.prune(), label)

    @property
    def base(self) -> int:
        return self.automaton.base

    def __call__(self, n: int):
        return self.automaton.eval(n)

    eval = __call__

    def states(self, count: int) -> np.ndarray:
        """States reached by ``0..count-1`` (zero-padded words, which is harmless here)."""
        a = self.automaton
        table = np.array(a.delta, dtype=np.int64)
        current = np.array([a.initial], dtype=np.int64)
        while current.size < count:
            current = np.concatenate([table[current, j] for j in range(a.base)])
        return current[:count]

    def values(self, count: int) -> np.ndarray:
        """``a(0), ..., a(count-1)`` as a complex array."""
        if count <= 0:
            return np.zeros(0, dtype=np.complex128)
        return self.automaton.output_array()[self.states(count)]

    def exact_values(self, count: int) -> list:
        out = self.automaton.output
        return [out[s] for s in self.states(count)]

    def __repr__(self):
        return f"AutomaticSequence({self.label or '?'}, base={self.base}, states={self.automaton.n_states})"


def evaluate(seq: AutomaticSequence | Automaton, n: int):
    """``a(n)`` under least-significant-digit-first reading."""
    if isinstance(seq, AutomaticSequence):
        return seq(n)
    return seq.eval(n)


# -- constructions -----------------------------------------------------------


def _explore(start, successors: Callable, base: int):
    """BFS over hashable states; returns (states, delta) with integer ids."""
    index = {start: 0}
    states = [start]
    delta = []
    i = 0
    while i < len(states):
        row = []
        for j in range(base):
            t = successors(states[i], j)
            if t not in index:
                index[t] = len(states)
                states.append(t)
            row.append(index[t])
        delta.append(row)
        i += 1
    return states, delta


def normalize_leading_zeros(a: Automaton) -> Automaton:
    """Equivalent automaton satisfying ``tau(delta(s, 0)) = tau(s)``.

    States are pairs (current, state after the last nonzero digit); the output
    reads the second coordinate, so trailing (most significant) zeros are inert.
    The result is pruned and minimised.
    """
    if not a.is_complete:
        raise AutomatonError("incomplete automaton")
    if a.ignores_leading_zeros:
        return minimize(a)
    d = a.delta

    def succ(pair, j):
        cur, chk = pair
        nxt = d[cur][j]
        return (nxt, nxt if j else chk)

    states, delta = _explore((a.initial, a.initial), succ, a.base)
    output = [a.output[chk] for _, chk in states]
    labels = [f"{a.labels[c]}_{a.labels[h]}" for c, h in states]
    return minimize(Automaton(a.base, delta, 0, output, labels))


def product(a: Automaton, b: Automaton, combine: Callable = operator.mul) -> Automaton:
    """Pair automaton producing ``combine(a(n), b(n))``."""
    if a.base != b.base:
        raise AutomatonError(f"base mismatch: {a.base} vs {b.base}")
    da, db = a.delta, b.delta

    def succ(pair, j):
        return (da[pair[0]][j], db[pair[1]][j])

    if a.initial is not None and b.initial is not None:
        states, delta = _explore((a.initial, b.initial), succ, a.base)
        initial = 0
    else:
        states = [(x, y) for x in range(a.n_states) for y in range(b.n_states)]
        pos = {p: i for i, p in enumerate(states)}
        delta = [[pos[succ(p, j)] for j in range(a.base)] for p in states]
        initial = None
    output = None
    if a.output is not None and b.output is not None:
        output = [combine(a.output[x], b.output[y]) for x, y in states]
    labels = [f"{a.labels[x]}_{b.labels[y]}" for x, y in states]
    return Automaton(a.base, delta, initial, output, labels)


def _affine(a: Automaton, q: int, r: int) -> Automaton:
    """Automaton for ``n -> a(q*n + r)``: states (s, carry), digits of n fed LSD first."""
    k, d, out = a.base, a.delta, a.output

    def succ(state, j):
        s, m = state
        x = q * j + m
        return (d[s][x % k], x // k)

    states, delta = _explore((a.initial, r), succ, k)
    output = [out[a.run(s, digits(m, k))] for s, m in states]
    labels = [f"{a.labels[s]}_c{m}" for s, m in states]
    return Automaton(k, delta, 0, output, labels)


def _require_sequence(seq) -> AutomaticSequence:
    if isinstance(seq, AutomaticSequence):
        return seq
    if isinstance(seq, Automaton):
        return AutomaticSequence.from_automaton(seq)
    raise TypeError(f"expected an automatic sequence, got {type(seq).__name__}")


def restrict_ap(seq: AutomaticSequence, q: int, r: int) -> AutomaticSequence:
    """The sequence ``n -> a(q*n + r)`` on states ``S x [0, q)`` with carries."""
    if q < 1:
        raise AutomatonError("q must be a positive integer")
    if not 0 <= r < q:
        raise AutomatonError("need 0 <= r < q")
    seq = _require_sequence(seq)
    return AutomaticSequence(_affine(seq.automaton, q, r), f"{seq.label}[{q}n+{r}]")


def shift(seq: AutomaticSequence, h: int) -> AutomaticSequence:
    """The sequence ``n -> a(n + h)``."""
    if h < 0:
        raise AutomatonError("shift must be nonnegative")
    seq = _require_sequence(seq)
    return AutomaticSequence(_affine(seq.automaton, 1, h), f"{seq.label}[n+{h}]")


def base_change(a: Automaton, l: int) -> Automaton:
    """The same sequence over base ``k**l``, reading ``l`` digits per step.

    Only states reachable from the initial state by paths whose length is a
    multiple of ``l`` are kept (all states when there is no initial state).
    """
    if l < 1:
        raise AutomatonError("l must be >= 1")
    k, n = a.base, a.n_states
    if k**l * n > MAX_TABLE:
        raise AutomatonError(f"base {k}**{l} table too large to materialise")
    table = np.array(a.delta, dtype=np.int64)
    maps = np.arange(n, dtype=np.int64)[None, :]
    for _ in range(l):
        # maps[d, s] = state after reading the low digits of d from s
        maps = np.concatenate([table[maps, j] for j in range(k)])
    big = maps.T  # big[s, d]
    if a.initial is None:
        keep = list(range(n))
    else:
        seen = {a.initial}
        queue = deque([a.initial])
        while queue:
            s = queue.popleft()
            for t in np.unique(big[s]).tolist():
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        keep = sorted(seen)
    index = {s: i for i, s in enumerate(keep)}
    delta = [[index[t] for t in big[s].tolist()] for s in keep]
    initial = None if a.initial is None else index[a.initial]
    output = None if a.output is None else [a.output[s] for s in keep]
    return Automaton(k**l, delta, initial, output, [a.labels[s] for s in keep])


def minimize(a: Automaton) -> Automaton:
    """Moore partition refinement; the result is pruned and in canonical BFS order."""
    if a.output is None:
        raise AutomatonError("minimisation needs an output function")
    if a.initial is not None:
        a = a.prune()
    n, k = a.n_states, a.base
    values: dict = {}
    block = [values.setdefault(v, len(values)) for v in a.output]
    count = len(values)
    while True:
        sigs: dict = {}
        new = [sigs.setdefault((block[s],) + tuple(block[t] for t in a.delta[s]), len(sigs)) for s in range(n)]
        if len(sigs) == count:
            break
        block, count = new, len(sigs)
    reps: dict[int, int] = {}
    for s in range(n):
        reps.setdefault(block[s], s)
    delta = [[block[t] for t in a.delta[reps[b]]] for b in range(count)]
    output = [a.output[reps[b]] for b in range(count)]
    initial = None if a.initial is None else block[a.initial]
    labels = [a.labels[reps[b]] for b in range(count)]
    quotient = Automaton(k, delta, initial, output, labels)
    return quotient.prune() if initial is not None else quotient


def canonical_form(a: Automaton) -> tuple:
    """Hashable description invariant under renaming states (needs an initial state)."""
    if a.initial is None:
        raise AutomatonError("canonical form needs an initial state")
    order = _bfs_order(a)
    index = {s: i for i, s in enumerate(order)}
    delta = tuple(tuple(index[t] for t in a.delta[s]) for s in order)
    output = None if a.output is None else tuple(a.output[s] for s in order)
    return (a.base, delta, output)


def isomorphic(a: Automaton, b: Automaton) -> bool:
    return canonical_form(a) == canonical_form(b)


def kernel_family(seq: AutomaticSequence) -> list[AutomaticSequence]:
    """The k-kernel ``{n -> a(k**l n + m)}``: one sequence per state of the minimal automaton."""
    seq = _require_sequence(seq)
    m = minimize(seq.automaton)
    return [
        AutomaticSequence(m.with_initial(s).prune(), f"{seq.label}:ker{i}")
        for i, s in enumerate(range(m.n_states))
    ]


def cokernel_outputs(a: Automaton) -> list[tuple]:
    """Closure of ``tau`` under ``tau -> tau o delta(., j)``, in discovery order."""
    if a.output is None:
        raise AutomatonError("co-kernel needs an output function")
    maps = [a.digit_map(j) for j in range(a.base)]
    start = tuple(a.output)
    seen = {start: 0}
    order = [start]
    i = 0
    while i < len(order):
        tau = order[i]
        for m in maps:
            nxt = tuple(tau[t] for t in m)
            if nxt not in seen:
                seen[nxt] = len(order)
                order.append(nxt)
        i += 1
    return order


def cokernel_family(seq) -> list[Automaton]:
    """Word functions ``u -> a(vu)`` (``v`` read after ``u``): same automaton, new outputs.

    These are functions on digit words; they need not ignore leading zeros.
    """
    a = seq.automaton if isinstance(seq, AutomaticSequence) else seq
    return [a.with_output(tau) for tau in cokernel_outputs(a)]
