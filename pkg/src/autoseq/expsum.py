"""Weighted exponential sums ``E_{n<N} a(n) e(p(n))``: direct, transfer and interval methods."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .analysis import partial_sum
from .automaton import AutomaticSequence, AutomatonError, digits
from .phase import PhasePolynomial, expi, frac_mul, frac_mul_int

__all__ = [
    "ExpSumReport",
    "SupReport",
    "SupBudgetError",
    "PolySample",
    "weighted_mean",
    "exp_sum_direct",
    "transfer_matrix",
    "transfer_means",
    "exp_sum_transfer",
    "interval_means",
    "exp_sum_interval",
    "tm_product_oracle",
    "sup_linear",
    "poly_sup_sample",
]


@dataclass(frozen=True)
class ExpSumReport:
    n: int
    phase: str
    mean: complex
    method: str
    err: float = 0.0

    @property
    def abs(self) -> float:
        return abs(self.mean)

    def as_dict(self) -> dict:
        return {
            "N": self.n,
            "phase": self.phase,
            "re": self.mean.real,
            "im": self.mean.imag,
            "abs": self.abs,
            "method": self.method,
            "err": self.err,
        }


def _phase(phase) -> PhasePolynomial:
    if isinstance(phase, PhasePolynomial):
        return phase
    return PhasePolynomial.linear(phase)


def _fsum_complex(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real), math.fsum(values.imag))


def weighted_mean(values: np.ndarray, phase_frac: np.ndarray) -> complex:
    """Correctly rounded ``mean(values * e(phase_frac))``."""
    terms = values * expi(phase_frac)
    return _fsum_complex(terms) / len(values)


def exp_sum_direct(seq: AutomaticSequence, phase, n: int, chunk: int = 1 << 20) -> ExpSumReport:
    """O(N) evaluation with exact phase reduction and correctly rounded summation."""
    if n < 1:
        raise ValueError("N must be >= 1")
    p = _phase(phase)
    if p.is_constant:
        scale = complex(expi(p.frac(np.zeros(1, dtype=np.int64)))[0])
        return ExpSumReport(n, p.describe(), complex(partial_sum(seq, n)) / n * scale, "direct")
    values = seq.values(n)
    parts_re, parts_im = [], []
    for start in range(0, n, chunk):
        idx = np.arange(start, min(n, start + chunk), dtype=np.int64)
        terms = values[start : start + len(idx)] * p(idx)
        parts_re.extend(terms.real)
        parts_im.extend(terms.imag)
    total = complex(math.fsum(parts_re), math.fsum(parts_im))
    return ExpSumReport(n, p.describe(), total / n, "direct")


# -- transfer method -------------------------------------------------------------


def _digit_matrices(a) -> np.ndarray:
    """``P[j, s, t] = 1`` iff ``delta(s, j) = t``."""
    mats = np.zeros((a.base, a.n_states, a.n_states))
    for s, row in enumerate(a.delta):
        for j, t in enumerate(row):
            mats[j, s, t] = 1.0
    return mats


def _scaled_fracs(alphas, levels: int, k: int) -> list[np.ndarray]:
    """``frac(k**l * alpha)`` for ``l < levels``."""
    return [np.atleast_1d(frac_mul_int(alphas, k**l)) for l in range(levels)]


def _transfer_rows(a, alphas, levels: int) -> list[np.ndarray]:
    """Row vectors ``e_{s0} T_l(alpha)`` for ``l = 0..levels`` (each of shape (m, n))."""
    mats = _digit_matrices(a)
    k = a.base
    alphas_arr = alphas if isinstance(alphas, Fraction) else np.atleast_1d(np.asarray(alphas, dtype=np.float64))
    m = 1 if isinstance(alphas, Fraction) else len(alphas_arr)
    row = np.zeros((m, a.n_states), dtype=np.complex128)
    row[:, a.initial] = 1.0
    rows = [row]
    for beta in _scaled_fracs(alphas_arr, levels, k):
        nxt = np.zeros_like(row)
        for j in range(k):
            nxt += (row * expi(j * beta)[:, None]) @ mats[j]
        row = nxt
        rows.append(row)
    return rows


def transfer_matrix(seq: AutomaticSequence, alpha, length: int) -> np.ndarray:
    """``T_L(alpha)[s, t] = sum_{|u| = L, delta(s, u) = t} e([u] alpha)``."""
    a = seq.automaton
    mats = _digit_matrices(a)
    t = np.eye(a.n_states, dtype=np.complex128)
    for beta in _scaled_fracs(alpha, length, a.base):
        d = sum(complex(expi(j * beta[0])) * mats[j] for j in range(a.base))
        t = t @ d
    return t


def transfer_means(seq: AutomaticSequence, alphas, length: int) -> np.ndarray:
    """``E_{n < k^L} a(n) e(n alpha)`` for an array of ``alpha``."""
    a = seq.automaton
    row = _transfer_rows(a, alphas, length)[-1]
    return row @ a.output_array() / float(a.base) ** length


def exp_sum_transfer(seq: AutomaticSequence, alpha, length: int) -> ExpSumReport:
    value = complex(transfer_means(seq, alpha if isinstance(alpha, Fraction) else [alpha], length)[0])
    return ExpSumReport(seq.base**length, PhasePolynomial.linear(alpha).describe(), value, "transfer")


# -- interval method -------------------------------------------------------------


def interval_means(seq: AutomaticSequence, alphas, n: int) -> np.ndarray:
    """``E_{m<N} a(m) e(m alpha)`` for many ``alpha`` via the base-k split of ``[0, N)``."""
    if n < 1:
        raise ValueError("N must be >= 1")
    a = seq.automaton
    k, delta = a.base, a.delta
    top = digits(n, k)
    rows = _transfer_rows(a, alphas, len(top) - 1)
    out = a.output_array()
    scalar = isinstance(alphas, Fraction)
    total = np.zeros(rows[0].shape[0], dtype=np.complex128)
    prefix = 0
    states = np.arange(a.n_states)
    table = np.array(delta)
    for i in range(len(top) - 1, -1, -1):
        d = top[i]
        for c in range(d):
            start = prefix + c * k**i
            g = out[table[states, c]]
            shift = frac_mul_int(alphas, start)
            total += expi(np.atleast_1d(shift)) * (rows[i] @ g)
        out = out[table[states, d]]
        prefix += d * k**i
    return total / n if not scalar else total[:1] / n


def exp_sum_interval(seq: AutomaticSequence, phase, n: int) -> ExpSumReport:
    p = _phase(phase)
    if p.degree > 1:
        raise AutomatonError("interval method handles linear phases only")
    alpha = p.coeffs[1] if p.degree == 1 else Fraction(0)
    shift = complex(expi(float(p.coeffs[0]) % 1.0)) if p.coeffs[0] else 1.0
    arg = alpha if isinstance(alpha, Fraction) else [alpha]
    value = complex(interval_means(seq, arg, n)[0]) * shift
    return ExpSumReport(n, p.describe(), value, "interval")


def tm_product_oracle(alpha, length: int) -> float:
    """``prod_{l<L} |sin(pi 2^l alpha)|``, the modulus of the Thue-Morse transfer sum."""
    prod = 1.0
    for l in range(length):
        prod *= abs(math.sin(math.pi * float(frac_mul_int(alpha, 2**l))))
    return prod


# -- sup over linear phases --------------------------------------------------------


class SupBudgetError(AutomatonError):
    def __init__(self, required: int, budget: int):
        self.required = required
        super().__init__(f"target error needs a frequency grid of M = {required} points; budget is {budget}")


@dataclass(frozen=True)
class SupReport:
    alpha: float
    value: float
    error_bound: float
    grid_size: int
    grid_max: float
    evaluations: int

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "sup": self.value,
            "err": self.error_bound,
            "grid": self.grid_size,
            "grid_max": self.grid_max,
            "evaluations": self.evaluations,
        }


def _golden_max(func, lo: float, hi: float, iters: int = 60) -> tuple[float, float]:
    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - ratio * (hi - lo)
    x2 = lo + ratio * (hi - lo)
    f1, f2 = func(x1), func(x2)
    for _ in range(iters):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - ratio * (hi - lo)
            f1 = func(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + ratio * (hi - lo)
            f2 = func(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def sup_linear(
    seq: AutomaticSequence,
    n: int,
    target_error: float = 1e-6,
    *,
    max_grid: int = 1 << 25,
    max_cells: int = 1 << 21,
    polish: int = 8,
) -> SupReport:
    """Certified ``sup_alpha |E_{m<N} a(m) e(m alpha)|`` within ``target_error``.

    The oversampled FFT grid gives a lower bound.  ``|f|`` is Lipschitz with
    constant ``2 pi c S`` (``c = (N-1)/2`` after centring, Bernstein), where
    ``S <= G / (1 - pi c / M)`` bounds the sup from the grid maximum ``G``.
    Cells whose Lipschitz upper bound beats the incumbent are bisected until
    every remaining bound is within ``target_error`` of it.
    """
    if n < 2:
        raise ValueError("N must be >= 2")
    grid = max(64, 1 << (4 * n - 1).bit_length())
    if grid > max_grid:
        raise SupBudgetError(grid, max_grid)
    values = seq.values(n)
    spectrum = np.abs(np.fft.ifft(values, grid) * (grid / n))
    grid_max = float(spectrum.max())
    amax = float(np.abs(values).max())
    centre = (n - 1) / 2.0
    sup_upper = min(amax, grid_max / (1.0 - math.pi * centre / grid))
    lip = 2.0 * math.pi * centre * sup_upper
    evaluations = 0

    def evaluate(alphas: np.ndarray) -> np.ndarray:
        nonlocal evaluations
        evaluations += len(alphas)
        out = np.empty(len(alphas))
        for s in range(0, len(alphas), 1 << 14):
            out[s : s + (1 << 14)] = np.abs(interval_means(seq, alphas[s : s + (1 << 14)], n))
        return out

    best_alpha = float(np.argmax(spectrum)) / grid
    best = grid_max
    candidates = [(float(spectrum[m]), m / grid) for m in np.argsort(-spectrum, kind="stable")[:polish]]
    width = 1.0 / grid
    for _, alpha0 in candidates:
        a_star, v_star = _golden_max(lambda x: float(evaluate(np.array([x % 1.0]))[0]), alpha0 - width, alpha0 + width)
        if v_star > best or (v_star == best and a_star % 1.0 < best_alpha):
            best, best_alpha = v_star, a_star % 1.0

    lo = np.arange(grid) / grid
    left = spectrum
    right = np.roll(spectrum, -1)
    # candidate cells: [lo, lo + width] with endpoint values left, right
    upper = (left + right + lip * width) / 2.0
    keep = upper > best + target_error
    lo, left, right = lo[keep], left[keep], right[keep]
    while len(lo):
        if len(lo) > max_cells:
            raise SupBudgetError(int(2 ** math.ceil(math.log2(lip / (2 * target_error)))), max_grid)
        width /= 2.0
        mids = lo + width
        vm = evaluate(mids)
        i = int(np.argmax(vm))
        if vm[i] > best:
            best, best_alpha = float(vm[i]), float(mids[i])
        lo = np.concatenate([lo, mids])
        new_left = np.concatenate([left, vm])
        right = np.concatenate([vm, right])
        left = new_left
        upper = (left + right + lip * width) / 2.0
        keep = upper > best + target_error
        lo, left, right = lo[keep], left[keep], right[keep]
    bound = max(0.0, min(target_error, lip * width / 2.0))
    # deterministic tie-break: smallest alpha attaining the incumbent value
    if best_alpha > 0.5 and seq.automaton.is_real:
        mirror = 1.0 - best_alpha
        if abs(float(evaluate(np.array([mirror]))[0]) - best) <= 1e-15:
            best_alpha = mirror
    return SupReport(float(best_alpha), float(best), bound, grid, grid_max, evaluations)


# -- polynomial phase samples -------------------------------------------------------


@dataclass(frozen=True)
class PolySample:
    reports: tuple[ExpSumReport, ...]
    family: tuple[str, ...]

    @property
    def max_abs(self) -> float:
        return max(r.abs for r in self.reports)


def _rational_mean(values: np.ndarray, phase: PhasePolynomial) -> complex:
    """Split ``[0, N)`` into residue classes mod the period; inner sums are exact integer sums."""
    period = phase.period
    n = len(values)
    residues = np.arange(n) % period
    inner_re = np.bincount(residues, weights=values.real, minlength=period)
    inner_im = np.bincount(residues, weights=values.imag, minlength=period)
    twiddle = phase(np.arange(period, dtype=np.int64))
    terms = (inner_re + 1j * inner_im) * twiddle
    return _fsum_complex(terms) / n


def sample_phases(degree: int, count: int, seed: int = 0, n: int = 1 << 16) -> list[tuple[str, PhasePolynomial]]:
    """Random real, rational-grid (denominators <= 24) and near-rational phases of degree <= ``degree``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        kind = ("random", "rational", "near")[i % 3]
        d = 1 + int(rng.integers(degree))
        if kind == "random":
            coeffs = (0.0,) + tuple(float(x) for x in rng.random(d))
        else:
            coeffs = [Fraction(0)]
            for _ in range(d):
                q = int(rng.integers(1, 25))
                coeffs.append(Fraction(int(rng.integers(q)), q))
            if coeffs[-1] == 0:
                coeffs[-1] = Fraction(1, int(rng.integers(2, 25)))
            if kind == "near":
                eps = float(rng.uniform(-1.0, 1.0)) / n
                coeffs[1] = float(coeffs[1]) + eps
                coeffs = [float(c) for c in coeffs]
            coeffs = tuple(coeffs)
        out.append((kind, PhasePolynomial(coeffs)))
    return out


def poly_sup_sample(
    seq: AutomaticSequence, degree: int, n: int, count: int = 60, seed: int = 0, phases=None
) -> PolySample:
    """``|E_{m<N} a(m) e(p(m))|`` over a sample of phases with ``deg p <= degree``."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if phases is None:
        phases = sample_phases(degree, count, seed)
    values = seq.values(n)
    idx = np.arange(n, dtype=np.int64)
    reports, family = [], []
    for kind, p in phases:
        if p.is_rational:
            reports.append(ExpSumReport(n, p.describe(), _rational_mean(values, p), "progressions"))
        else:
            reports.append(ExpSumReport(n, p.describe(), _fsum_complex(values * p(idx)) / n, "direct"))
        family.append(kind)
    return PolySample(tuple(reports), tuple(family))
