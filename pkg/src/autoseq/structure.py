"""Structural analysis: components, cycle gcd, aperiodicity, frequencies, invertibility."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import networkx as nx
import numpy as np
import sympy

from .automaton import (
    Automaton,
    AutomatonError,
    AutomaticSequence,
    base_change,
    minimize,
    restrict_ap,
    word_value,
)

__all__ = [
    "SccReport",
    "scc_analysis",
    "is_strongly_connected",
    "cycle_gcd",
    "AperiodicityCertificate",
    "check_aperiodic",
    "AperiodicDecomposition",
    "decompose_aperiodic",
    "Frequencies",
    "frequencies",
    "GroupPresentation",
    "invertibility",
    "multiplicative_order",
]


@dataclass(frozen=True)
class SccReport:
    components: tuple[tuple[int, ...], ...]
    terminal: tuple[bool, ...]
    edges: frozenset[tuple[int, int]]
    component_of: tuple[int, ...]

    @property
    def terminal_components(self) -> list[tuple[int, ...]]:
        return [c for c, t in zip(self.components, self.terminal) if t]

    def __len__(self):
        return len(self.components)


def _graph(a: Automaton) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(a.n_states))
    g.add_edges_from((s, t) for s, row in enumerate(a.delta) for t in row)
    return g


def scc_analysis(a: Automaton) -> SccReport:
    """Strongly connected components in topological order of the condensation."""
    cond = nx.condensation(_graph(a))
    order = list(nx.topological_sort(cond))
    rank = {c: i for i, c in enumerate(order)}
    components = tuple(tuple(sorted(cond.nodes[c]["members"])) for c in order)
    edges = frozenset((rank[u], rank[v]) for u, v in cond.edges)
    terminal = tuple(cond.out_degree(c) == 0 for c in order)
    component_of = [0] * a.n_states
    for i, comp in enumerate(components):
        for s in comp:
            component_of[s] = i
    return SccReport(components, terminal, edges, tuple(component_of))


def is_strongly_connected(a: Automaton) -> bool:
    return nx.is_strongly_connected(_graph(a))


def _require_strong(a: Automaton):
    if not is_strongly_connected(a):
        raise AutomatonError("requires strong connectivity")


# -- cycle gcd ---------------------------------------------------------------


def _shortest_paths_to(a: Automaton, target: int) -> dict[int, list[int]]:
    """For every state, a shortest digit word leading to ``target``."""
    preds: list[list[tuple[int, int]]] = [[] for _ in range(a.n_states)]
    for s, row in enumerate(a.delta):
        for j, t in enumerate(row):
            preds[t].append((s, j))
    path = {target: []}
    queue = deque([target])
    while queue:
        t = queue.popleft()
        for s, j in preds[t]:
            if s not in path:
                path[s] = [j] + path[t]
                queue.append(s)
    return path


def _shortest_paths_from(a: Automaton, source: int) -> dict[int, list[int]]:
    path = {source: []}
    queue = deque([source])
    while queue:
        s = queue.popleft()
        for j, t in enumerate(a.delta[s]):
            if t not in path:
                path[t] = path[s] + [j]
                queue.append(t)
    return path


def _loop_words(a: Automaton, s: int) -> list[list[int]]:
    """Loops at ``s`` through every edge: out-path, edge, shortest way back."""
    to_s = _shortest_paths_to(a, s)
    from_s = _shortest_paths_from(a, s)
    loops = []
    for t, head in from_s.items():
        for j, u in enumerate(a.delta[t]):
            loops.append(head + [j] + to_s[u])
    return loops


def _difference_gcd(loops: list[list[int]], k: int) -> int:
    """gcd of value differences of equal-length loop words built from ``loops``."""
    vals = [(word_value(w, k), len(w)) for w in loops]
    g = 0
    for i in range(len(vals)):
        vu, lu = vals[i]
        for j in range(i + 1, len(vals)):
            vv, lv = vals[j]
            # uv versus vu (u read first in uv)
            g = math.gcd(g, (vu + vv * k**lu) - (vv + vu * k**lv))
            # u repeated lv times versus v repeated lu times
            total = lu * lv
            g = math.gcd(g, vu * (k**total - 1) // (k**lu - 1) - vv * (k**total - 1) // (k**lv - 1))
    return abs(g)


def _divides_all_differences(a: Automaton, s: int, q: int) -> bool:
    """Exact test of ``q | d_A`` via reachability over (pair, difference mod q, k^t mod q)."""
    k, d = a.base, a.delta
    start = (s, s, 0, 1 % q)
    seen = {start}
    stack = [start]
    while stack:
        s1, s2, diff, w = stack.pop()
        if s1 == s == s2 and diff:
            return False
        w2 = (w * k) % q
        for j1 in range(k):
            t1 = d[s1][j1]
            for j2 in range(k):
                nxt = (t1, d[s2][j2], (diff + (j1 - j2) * w) % q, w2)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return True


def cycle_gcd(a: Automaton, s: int | None = None, *, check_all_states: bool | None = None) -> int:
    """``d_A``: gcd of ``[u] - [v]`` over equal-length loops ``u, v`` at ``s``."""
    _require_strong(a)
    if s is None:
        s = a.initial if a.initial is not None else 0
    n, k = a.n_states, a.base
    loops = _loop_words(a, s)
    longest = 2 * n * n + 2
    if max(len(w) for w in loops) > longest:
        raise AutomatonError("degenerate cycle structure: loop search exceeded its length bound")
    bound = _difference_gcd(loops, k)
    if bound == 0:
        if n > 1:
            raise AutomatonError("degenerate cycle structure: no nonzero loop difference found")
        return 1
    result = 1
    for p, e in sympy.factorint(bound).items():
        if k % p == 0:
            continue
        for power in range(1, e + 1):
            if not _divides_all_differences(a, s, p**power):
                break
            result *= p
    if math.gcd(result, k) != 1:
        raise AutomatonError("cycle gcd is not coprime to the base")
    if check_all_states or (check_all_states is None and n <= 8):
        for other in range(n):
            if other != s and cycle_gcd(a, other, check_all_states=False) != result:
                raise AutomatonError("cycle gcd depends on the base state")
    return result


# -- aperiodicity ------------------------------------------------------------


@dataclass(frozen=True)
class AperiodicityCertificate:
    """Sufficient test for strong aperiodicity: ``d_A = 1`` and a state fixed by digit 0."""

    holds: bool
    cycle_gcd: int
    zero_fixed_state: int | None
    reason: str

    def __bool__(self):
        return self.holds


def check_aperiodic(a: Automaton) -> AperiodicityCertificate:
    d = cycle_gcd(a)
    fixed = next((s for s in range(a.n_states) if a.delta[s][0] == s), None)
    if d != 1:
        return AperiodicityCertificate(False, d, fixed, f"cycle gcd is {d}, not 1")
    if fixed is None:
        return AperiodicityCertificate(False, d, None, "no state is fixed by digit 0")
    return AperiodicityCertificate(True, d, fixed, "cycle gcd 1 and a 0-fixed state")


@dataclass
class AperiodicDecomposition:
    base: int
    q: int
    level: int
    parts: list[AutomaticSequence]
    certificates: list[list[AperiodicityCertificate]] = field(default_factory=list)

    @property
    def all_aperiodic(self) -> bool:
        return all(all(c.holds for c in certs) for certs in self.certificates)


def _terminal_gcd(a: Automaton) -> int:
    report = scc_analysis(a)
    values = [cycle_gcd(a.restricted_to(c)) for c in report.terminal_components]
    return reduce(math.lcm, values, 1)


def decompose_aperiodic(seq: AutomaticSequence, *, max_level: int | None = None, check_terms: int = 4096):
    """Split ``a`` into ``a(q n + r)`` over a base ``k**l`` whose parts are strongly aperiodic."""
    a = seq.automaton
    _require_strong(a)
    n, k = a.n_states, a.base
    if max_level is None:
        max_level = reduce(math.lcm, range(1, n + 1), 1) * 2
    for level in range(1, max_level + 1):
        if k**level * n > (1 << 22):
            break
        big = base_change(a, level)
        zero = [row[0] for row in big.delta]
        if any(zero[zero[s]] != zero[s] for s in range(big.n_states)):
            continue
        if k ** (2 * level) * n <= (1 << 22) and base_change(a, 2 * level).n_states != big.n_states:
            continue
        q = _terminal_gcd(big)
        kk = big.base
        if kk <= q:
            continue
        if any(zero[big.delta[s][j]] != big.delta[s][j] for s in range(big.n_states) for j in range(q)):
            continue
        lifted = AutomaticSequence(big, seq.label)
        parts, certs = [], []
        for r in range(q):
            part = restrict_ap(lifted, q, r)
            pa = part.automaton
            report = scc_analysis(pa)
            certs.append([check_aperiodic(pa.restricted_to(c)) for c in report.terminal_components])
            parts.append(part)
        for m in range(check_terms):
            r, i = m % q, m // q
            if parts[r](i) != seq(m):
                raise AutomatonError("interleaving check failed")
        return AperiodicDecomposition(kk, q, level, parts, certs)
    raise AutomatonError("base change did not stabilise within the level cap")


# -- frequencies ---------------------------------------------------------------


def multiplicative_order(k: int, q: int) -> int:
    if q == 1:
        return 1
    if math.gcd(k, q) != 1:
        raise ValueError("order undefined: base and modulus share a factor")
    return int(sympy.n_order(k, q))


@dataclass(frozen=True)
class Frequencies:
    q: int
    block: int
    table: dict  # (state, residue) -> probability
    exact: bool

    def __getitem__(self, key):
        return self.table[key]

    def row_sum(self, r: int):
        return sum(v for (s, rr), v in self.table.items() if rr == r)

    def residue_spread(self) -> float:
        """max over states of ``|pi(s; r) - pi(s; 0)|``."""
        states = {s for s, _ in self.table}
        return max(
            float(abs(self.table[(s, r)] - self.table[(s, 0)])) for s in states for r in range(self.q)
        )


def _cesaro_limit(succ: list[list[tuple[int, int]]], total: int, start: int, exact: bool):
    """Cesàro limit of the distribution of a Markov chain started at ``start``.

    ``succ[i]`` lists (target, count) with counts summing to ``total``.
    """
    g = nx.DiGraph()
    g.add_node(start)
    stack, seen = [start], {start}
    while stack:
        i = stack.pop()
        for t, _ in succ[i]:
            g.add_edge(i, t)
            if t not in seen:
                seen.add(t)
                stack.append(t)
    nodes = sorted(seen)
    cond = nx.condensation(g)
    closed = [sorted(cond.nodes[c]["members"]) for c in cond if cond.out_degree(c) == 0]
    in_closed = {i for cls in closed for i in cls}
    transient = [i for i in nodes if i not in in_closed]

    def solve(mat, rhs):
        if exact:
            return list(sympy.Matrix(mat).LUsolve(sympy.Matrix(rhs)))
        return list(np.linalg.solve(np.array(mat, dtype=float), np.array(rhs, dtype=float)))

    limit = {}
    # absorption probabilities into each closed class
    tidx = {i: p for p, i in enumerate(transient)}
    absorb = []
    for cls in closed:
        members = set(cls)
        if start in members:
            absorb.append(1)
            continue
        if start not in tidx:
            absorb.append(0)
            continue
        m = len(transient)
        mat = [[0] * m for _ in range(m)]
        rhs = [0] * m
        for i in transient:
            row = tidx[i]
            mat[row][row] += total
            for t, c in succ[i]:
                if t in tidx:
                    mat[row][tidx[t]] -= c
                elif t in members:
                    rhs[row] += c
        absorb.append(solve(mat, rhs)[tidx[start]])
    for cls, weight in zip(closed, absorb):
        idx = {i: p for p, i in enumerate(cls)}
        m = len(cls)
        # stationarity: pi (P - I) = 0 with sum pi = 1; replace last equation by normalisation
        mat = [[0] * m for _ in range(m)]
        for i in cls:
            for t, c in succ[i]:
                mat[idx[t]][idx[i]] += c
            mat[idx[i]][idx[i]] -= total
        mat[-1] = [1] * m
        rhs = [0] * (m - 1) + [total]
        pi = solve(mat, rhs)
        for i in cls:
            limit[i] = limit.get(i, 0) + weight * pi[idx[i]] / total
    return limit


def frequencies(a: Automaton, q: int = 1, *, start: int | None = None, exact: bool | None = None) -> Frequencies:
    """``pi(s'; r)``: limiting share of blocks ``u`` with ``delta(s0, u) = s'`` and ``[u] = r mod q``.

    Normalised so that ``sum_s pi(s; r) = 1`` for each residue.  Blocks have length
    a multiple of ``ord_q(k)``; the limit is taken in the Cesàro sense.
    """
    _require_strong(a)
    k, n = a.base, a.n_states
    if q < 1:
        raise AutomatonError("q must be positive")
    if math.gcd(q, k) != 1:
        raise AutomatonError("factor out k-part first: gcd(q, k) must be 1")
    block = multiplicative_order(k, q)
    if start is None:
        start = a.initial if a.initial is not None else 0
    if exact is None:
        exact = n * q <= 60
    big = base_change(a.with_initial(None), block)
    size = big.base
    succ = []
    for s in range(n):
        row = big.delta[s]
        for r in range(q):
            counts: dict[int, int] = {}
            for v in range(size):
                t = row[v] * q + (r + v) % q
                counts[t] = counts.get(t, 0) + 1
            succ.append(list(counts.items()))
    limit = _cesaro_limit(succ, size, start * q, exact)
    table = {}
    for s in range(n):
        for r in range(q):
            value = limit.get(s * q + r, 0) * q
            if exact:
                value = sympy.Rational(value)
                table[(s, r)] = Fraction(int(value.p), int(value.q))
            else:
                table[(s, r)] = float(value)
    return Frequencies(q, block, table, exact)


# -- invertibility -------------------------------------------------------------


@dataclass(frozen=True)
class GroupPresentation:
    """Permutation group generated by the digit actions, with ``a(n) = pi(g(n))``.

    ``g(w)`` is the state map ``s -> delta(s, w)``, so ``g(uv) = g(u) o g(v)``.
    """

    generators: tuple[tuple[int, ...], ...]
    elements: tuple[tuple[int, ...], ...]
    projection: tuple
    initial: int
    zero_is_identity: bool

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self, perm) -> int:
        return self.elements.index(tuple(perm))

    def element_of(self, n: int, base: int) -> tuple[int, ...]:
        perm = tuple(range(len(self.generators[0])))
        while n:
            n, j = divmod(n, base)
            g = self.generators[j]
            perm = tuple(g[x] for x in perm)
        return perm

    def value(self, n: int, base: int):
        return self.projection[self.index(self.element_of(n, base))]


def invertibility(a: Automaton) -> GroupPresentation | None:
    """Group presentation when every digit acts bijectively on states, else ``None``."""
    n = a.n_states
    gens = tuple(a.digit_map(j) for j in range(a.base))
    if any(len(set(g)) != n for g in gens):
        return None
    identity = tuple(range(n))
    elements = [identity]
    seen = {identity}
    i = 0
    while i < len(elements):
        e = elements[i]
        for g in gens:
            h = tuple(g[x] for x in e)  # read one more digit after e
            if h not in seen:
                seen.add(h)
                elements.append(h)
        i += 1
    s0 = a.initial if a.initial is not None else 0
    projection = tuple(a.output[e[s0]] for e in elements) if a.output is not None else ()
    return GroupPresentation(gens, tuple(elements), projection, s0, gens[0] == identity)
