"""Exact partial sums, balancedness decisions, decay fits and the periodic/balanced split."""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy

from .automaton import (
    Automaton,
    AutomatonError,
    AutomaticSequence,
    cokernel_outputs,
    digits,
    minimize,
    product,
    restrict_ap,
)
from .phase import PhasePolynomial
from .structure import cycle_gcd, frequencies, invertibility, scc_analysis

__all__ = [
    "BlockSumTable",
    "block_sums",
    "partial_sum",
    "mean",
    "BalanceCertificate",
    "is_balanced",
    "TotalBalanceCertificate",
    "is_totally_balanced",
    "periodic_automaton",
    "DecayFit",
    "decay_exponent",
    "PerBalDecomposition",
    "invertible_decomposition",
]

_X = sympy.Symbol("x")


def _count_vectors(a: Automaton, length: int) -> list[list[int]]:
    """``c_L[s] = #{u of length L : delta(s0, u) = s}`` for ``L = 0..length``."""
    c = [0] * a.n_states
    c[a.initial] = 1
    out = [c]
    for _ in range(length):
        nxt = [0] * a.n_states
        for s, cnt in enumerate(c):
            if cnt:
                for t in a.delta[s]:
                    nxt[t] += cnt
        c = nxt
        out.append(c)
    return out


def _dot(counts: Sequence[int], values: Sequence):
    total = 0
    for cnt, v in zip(counts, values):
        if cnt:
            total += cnt * v
    return total


@dataclass(frozen=True)
class BlockSumTable:
    """``sums[b][L] = sum over words u of length L of b(u)`` for each co-kernel output ``b``."""

    variants: tuple[tuple, ...]
    counts: tuple[tuple[int, ...], ...]
    sums: tuple[tuple, ...]
    matrix: tuple[tuple[int, ...], ...]

    def sigma(self, length: int, variant: int = 0):
        return self.sums[variant][length]


def block_sums(seq: AutomaticSequence, l_max: int) -> BlockSumTable:
    a = seq.automaton
    variants = cokernel_outputs(a)
    counts = _count_vectors(a, l_max)
    sums = tuple(tuple(_dot(c, b) for c in counts) for b in variants)
    return BlockSumTable(
        tuple(variants), tuple(tuple(c) for c in counts), sums, tuple(tuple(r) for r in a.transition_counts())
    )


def partial_sum(seq: AutomaticSequence, n: int):
    """``sum_{m < n} a(m)``, exact for rational outputs, via the base-k interval split."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return Fraction(0) if seq.automaton.is_exact else 0j
    a = seq.automaton
    k, delta = a.base, a.delta
    top = digits(n, k)
    counts = _count_vectors(a, len(top))
    out = list(a.output)  # F(s): value after reading the remaining high digits from s
    total = 0
    for i in range(len(top) - 1, -1, -1):
        d = top[i]
        c = counts[i]
        for digit in range(d):
            total += _dot(c, [out[delta[s][digit]] for s in range(a.n_states)])
        out = [out[delta[s][d]] for s in range(a.n_states)]
    if a.is_exact:
        return Fraction(total)
    return complex(total)


def mean(seq: AutomaticSequence, n: int):
    return partial_sum(seq, n) / n


# -- balancedness --------------------------------------------------------------


@lru_cache(maxsize=4096)
def _split_charpoly(matrix: tuple, k: int):
    """``chi = C * R`` with ``C`` collecting the factors whose roots have modulus ``k``."""
    chi = sympy.Matrix(matrix).charpoly(_X).as_expr()
    _, factors = sympy.factor_list(chi, _X)
    critical, rest = sympy.Integer(1), sympy.Integer(1)
    for f, mult in factors:
        poly = sympy.Poly(f, _X)
        deg = poly.degree()
        scaled = sympy.Poly(sympy.expand(f.subs(_X, k * _X) / sympy.Integer(k) ** deg), _X)
        lc = scaled.LC()
        cyclotomic = False
        if lc != 0:
            monic = scaled.monic()
            if all(c.is_integer for c in monic.all_coeffs()):
                cyclotomic = sympy.Poly(monic.as_expr(), _X, domain="ZZ").is_cyclotomic
        if cyclotomic:
            critical *= f**mult
        else:
            rest *= f**mult
    return sympy.Poly(critical, _X), sympy.Poly(rest, _X)


@dataclass(frozen=True)
class BalanceCertificate:
    balanced: bool
    reason: str
    critical_degree: int
    failing_variant: int | None = None
    sampled_means: tuple = ()

    def __bool__(self):
        return self.balanced


def is_balanced(seq: AutomaticSequence, *, samples: int = 8, tol: float = 1e-9) -> BalanceCertificate:
    """Exact decision of ``E_{n<N} a(n) -> 0``.

    Every co-kernel block sum ``sigma_b(L)`` must lose its component on the
    eigenvalues of modulus ``k`` of the transition count matrix; that component
    is isolated by applying the complementary factor of the characteristic
    polynomial as a shift operator.
    """
    a = minimize(seq.automaton)
    seq = AutomaticSequence(a, seq.label)
    k, n = a.base, a.n_states
    critical, rest = _split_charpoly(tuple(map(tuple, a.transition_counts())), k)
    deg_c = critical.degree()
    rest_coeffs = [int(c) for c in reversed(rest.all_coeffs())]  # r_0 .. r_m
    counts = _count_vectors(a, n + 1)
    variants = cokernel_outputs(a)
    # x_L = sum_i r_i c_{L+i}; the modulus-k part of every sigma_b vanishes iff x_L . b = 0
    shifted = [
        [sum(r * counts[length + i][s] for i, r in enumerate(rest_coeffs)) for s in range(n)]
        for length in range(deg_c)
    ]
    if a.is_exact:
        denom = math.lcm(*(v.denominator for v in a.output))
        variants = [[int(v * denom) for v in b] for b in variants]
    scale = a.max_abs_output() or 1.0
    weight = sum(abs(c) for c in rest_coeffs)
    failing = None
    for b, tau in enumerate(variants):
        for length, x in enumerate(shifted):
            value = _dot(x, tau)
            if a.is_exact:
                nonzero = value != 0
            else:
                nonzero = abs(complex(value)) > tol * scale * weight * k ** (length + len(rest_coeffs))
            if nonzero:
                failing = b
                break
        if failing is not None:
            break
    sampled = tuple(complex(mean(seq, k**e + 1)) for e in range(2, 2 + samples))
    if failing is None:
        return BalanceCertificate(True, "no co-kernel block sum grows like k^L", deg_c, None, sampled)
    return BalanceCertificate(
        False, f"co-kernel variant {failing} has a block-sum component of order k^L", deg_c, failing, sampled
    )


@dataclass(frozen=True)
class TotalBalanceCertificate:
    holds: bool
    witness: tuple[int, int] | None
    tested: tuple[int, ...]
    q_bound: int

    def __bool__(self):
        return self.holds


def _extra_moduli(a: Automaton, q_bound: int) -> list[int]:
    report = scc_analysis(a)
    extra = set()
    for comp in report.terminal_components:
        d = cycle_gcd(a.restricted_to(comp))
        if d == 1:
            continue
        for div in sympy.divisors(d):
            if div == 1:
                continue
            for m in range(3):
                q = a.base**m * div
                if q > q_bound:
                    extra.add(q)
    return sorted(extra)


def is_totally_balanced(seq: AutomaticSequence, q_bound: int = 12) -> TotalBalanceCertificate:
    """Bounded test: ``a(qn + r)`` balanced for all ``q <= q_bound`` plus moduli suggested by cycle gcds."""
    moduli = list(range(1, q_bound + 1)) + _extra_moduli(seq.automaton, q_bound)
    for q in moduli:
        for r in range(q):
            part = restrict_ap(seq, q, r)
            if not is_balanced(part, samples=0):
                return TotalBalanceCertificate(False, (q, r), tuple(moduli[: moduli.index(q) + 1]), q_bound)
    return TotalBalanceCertificate(True, None, tuple(moduli), q_bound)


# -- decay fits ----------------------------------------------------------------


def periodic_automaton(table: Sequence, base: int) -> Automaton:
    """Automaton for ``n -> table[n mod P]``: state (n mod P so far, k^t mod P)."""
    period = len(table)
    index, states = {}, []

    def add(st):
        if st not in index:
            index[st] = len(states)
            states.append(st)
        return index[st]

    add((0, 1 % period))
    delta = []
    i = 0
    while i < len(states):
        r, w = states[i]
        delta.append([add(((r + j * w) % period, (w * base) % period)) for j in range(base)])
        i += 1
    output = [table[r] for r, _ in states]
    return Automaton(base, delta, 0, output, [f"r{r}w{w}" for r, w in states])


@dataclass(frozen=True)
class DecayFit:
    points: tuple[tuple[int, float], ...]
    exponent: float
    residual: float
    band: tuple[float, float]
    zero_points: tuple[int, ...] = ()
    exact_check: bool = True

    @property
    def all_zero(self) -> bool:
        return math.isinf(self.exponent)


def _fit(points: list[tuple[int, float]], zeros: list[int], exact_check: bool) -> DecayFit:
    if len(points) < 2:
        if not points:
            return DecayFit((), math.inf, 0.0, (math.inf, math.inf), tuple(zeros), exact_check)
        raise AutomatonError("need at least two nonzero means to fit a decay exponent")
    x = np.log([p[0] for p in points])
    y = np.log([p[1] for p in points])
    coef, cov = np.polyfit(x, y, 1, cov=len(points) > 3) if len(points) > 3 else (np.polyfit(x, y, 1), None)
    slope = coef[0]
    resid = float(np.sqrt(np.mean((np.polyval(coef, x) - y) ** 2)))
    se = float(np.sqrt(cov[0, 0])) if cov is not None else 0.0
    c = -float(slope)
    return DecayFit(tuple(points), c, resid, (c - 2 * se, c + 2 * se), tuple(zeros), exact_check)


def decay_exponent(seq: AutomaticSequence, weight=None, lengths: Sequence[int] = range(4, 16)) -> DecayFit:
    """Fit ``|E_{n<k^L} a(n) w(n)| ~ k^(-c L)``.

    ``weight`` is ``None`` (constant 1), a periodic table, or a ``PhasePolynomial``.
    Rational phases are turned into periodic tables; irrational phases are
    evaluated with the interval method and cannot be checked for balance exactly.
    """
    k = seq.base
    if isinstance(weight, PhasePolynomial) and weight.is_rational:
        period = weight.period
        weight = list(weight(np.arange(period)))
    if isinstance(weight, PhasePolynomial):
        from .expsum import exp_sum_interval

        points, zeros = [], []
        for length in lengths:
            n = k**length
            value = abs(exp_sum_interval(seq, weight, n).mean)
            (points.append((n, value)) if value > 1e-15 else zeros.append(n))
        return _fit(points, zeros, exact_check=False)
    if weight is None:
        target = seq
    else:
        target = AutomaticSequence.from_automaton(product(seq.automaton, periodic_automaton(list(weight), k)))
    if not is_balanced(target, samples=0):
        raise AutomatonError("no decay: sequence not balanced against weight")
    points, zeros = [], []
    for length in lengths:
        n = k**length
        value = abs(complex(partial_sum(target, n))) / n
        (points.append((n, value)) if value != 0 else zeros.append(n))
    return _fit(points, zeros, exact_check=True)


# -- invertible sequences --------------------------------------------------------


@dataclass(frozen=True)
class PerBalDecomposition:
    periodic: tuple
    balanced: AutomaticSequence
    group_order: int

    def per(self, n: int):
        return self.periodic[n % len(self.periodic)]


def invertible_decomposition(seq: AutomaticSequence) -> PerBalDecomposition:
    """``a = per + bal`` with ``per`` of period ``k - 1`` and ``bal`` totally balanced."""
    a = seq.automaton
    group = invertibility(a)
    if group is None:
        raise AutomatonError(
            "no decomposition guaranteed: digit actions are not all bijective "
            "(the sequence (-1)^nu_2(n) does not admit a decomposition)"
        )
    k = a.base
    period = k - 1
    freq = frequencies(a, period, exact=a.is_exact)
    periodic = []
    for r in range(period):
        value = sum((freq[(s, r)] * a.output[s] for s in range(a.n_states)), start=0)
        periodic.append(Fraction(value) if a.is_exact else complex(value))
    counter = periodic_automaton(periodic, k)
    bal = product(a, counter, lambda x, y: x - y)
    return PerBalDecomposition(tuple(periodic), AutomaticSequence.from_automaton(bal, f"{seq.label}-bal"), group.order)
