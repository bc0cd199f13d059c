"""Weighted polynomial ergodic averages on rotations and the skew product of the 2-torus.

All orbits use closed forms for ``T^m``; no trajectory is iterated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .analysis import partial_sum
from .automaton import AutomaticSequence
from .builtins import builtin_sequence
from .expsum import interval_means
from .phase import GOLDEN, PhasePolynomial, expi, frac_mul, frac_mul_binomial2, frac_mul_int, parse_real
from .textfmt import parse_value

__all__ = [
    "DynSystem",
    "Observable",
    "AverageTrace",
    "ConvergenceReport",
    "CounterexampleReport",
    "parse_system",
    "parse_observable",
    "sample_points",
    "weighted_average",
    "spectral_oracle",
    "convergence_report",
    "counterexample_demo",
]

KINDS = ("rotation", "rational", "skew", "identity")


@dataclass(frozen=True)
class DynSystem:
    """Rotation ``x -> x + alpha``, skew ``(x, y) -> (x + alpha, y + x)``, or the identity."""

    kind: str
    alpha: float | Fraction = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown system kind {self.kind!r}")
        if self.kind == "rational" and not isinstance(self.alpha, Fraction):
            object.__setattr__(self, "alpha", Fraction(self.alpha))

    @property
    def dim(self) -> int:
        return 2 if self.kind == "skew" else 1

    @property
    def totally_ergodic(self) -> bool:
        if self.kind == "identity" or self.kind == "rational":
            return False
        return not isinstance(self.alpha, Fraction)

    def orbit(self, point: Sequence, times: np.ndarray) -> tuple[np.ndarray, ...]:
        """Coordinates of ``T^m point`` (reduced mod 1) for an int64 array of times."""
        times = np.asarray(times, dtype=np.int64)
        x = point[0]
        if self.kind == "identity":
            return tuple(np.full(times.shape, float(c) % 1.0) for c in point)
        shift = frac_mul(self.alpha, times)
        xs = np.mod(float(x) + shift, 1.0) if not isinstance(x, Fraction) else np.mod(float(x % 1) + shift, 1.0)
        if self.kind != "skew":
            return (xs,)
        y = point[1]
        ys = np.mod(float(y) + frac_mul(x, times) + frac_mul_binomial2(self.alpha, times), 1.0)
        return (xs, ys)

    def orbit_exact(self, point: Sequence[Fraction], m: int) -> tuple[Fraction, ...]:
        """``T^m point`` in exact rational arithmetic (needs rational ``alpha``)."""
        alpha = Fraction(self.alpha)
        if self.kind == "identity":
            return tuple(Fraction(c) % 1 for c in point)
        x = (Fraction(point[0]) + m * alpha) % 1
        if self.kind != "skew":
            return (x,)
        y = (Fraction(point[1]) + m * Fraction(point[0]) + alpha * Fraction(m * (m - 1), 2)) % 1
        return (x, y)

    def describe(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind == "rational":
            return f"rational:{self.alpha}"
        return f"{self.kind}:alpha={self.alpha!r}"


def parse_system(spec: str) -> DynSystem:
    kind, _, rest = spec.partition(":")
    if kind == "identity":
        return DynSystem("identity")
    if kind == "rational":
        return DynSystem("rational", Fraction(rest))
    if kind in ("rotation", "skew"):
        key, eq, value = rest.partition("=")
        if key != "alpha" or not eq:
            raise ValueError(f"expected {kind}:alpha=<value>, got {spec!r}")
        return DynSystem(kind, parse_real(value))
    raise ValueError(f"unknown system spec {spec!r}")


@dataclass(frozen=True)
class Observable:
    """Trigonometric polynomial ``sum c_m e(m . x)``; frequencies are integer tuples."""

    terms: tuple[tuple[tuple[int, ...], complex], ...]

    @classmethod
    def character(cls, m: int, dim: int = 1) -> Observable:
        freq = (m,) if dim == 1 else (0,) * (dim - 1) + (m,)
        return cls(((freq, 1.0 + 0j),))

    @property
    def mean_zero(self) -> bool:
        return all(any(f) for f, c in self.terms if c != 0)

    @property
    def integral(self) -> complex:
        return sum((complex(c) for f, c in self.terms if not any(f)), 0j)

    @property
    def sup_bound(self) -> float:
        return sum(abs(complex(c)) for _, c in self.terms)

    def __call__(self, coords: Sequence[np.ndarray]) -> np.ndarray:
        out = np.zeros(np.shape(coords[0]), dtype=np.complex128)
        for freq, c in self.terms:
            phase = np.zeros(np.shape(coords[0]))
            for m, x in zip(freq, coords):
                if m:
                    phase = phase + np.mod(m * x, 1.0)
            out += complex(c) * expi(np.mod(phase, 1.0))
        return out


def parse_observable(spec: str, dim: int = 1) -> Observable:
    kind, _, rest = spec.partition(":")
    if kind == "char":
        return Observable.character(int(rest), dim)
    if kind == "trig":
        terms = []
        for item in rest.split(","):
            freq, eq, coef = item.partition("=")
            if not eq:
                raise ValueError(f"bad term {item!r}; expected m=c")
            f = tuple(int(v) for v in freq.split(":"))
            if len(f) == 1 and dim > 1:
                f = (0,) * (dim - 1) + f
            if len(f) != dim:
                raise ValueError(f"frequency {freq!r} has the wrong dimension")
            terms.append((f, complex(parse_value(coef))))
        return Observable(tuple(terms))
    raise ValueError(f"unknown observable spec {spec!r}")


def sample_points(dim: int, count: int, seed: int = 0) -> list[tuple[float, ...]]:
    """Kronecker points ``frac(j (sqrt2, sqrt3))`` followed by seeded uniform points."""
    kron = count - count // 2
    gens = (math.sqrt(2.0), math.sqrt(3.0))[:dim]
    pts = [tuple((j + 1) * g % 1.0 for g in gens) for j in range(kron)]
    rng = np.random.default_rng(seed)
    pts += [tuple(float(v) for v in rng.random(dim)) for _ in range(count - kron)]
    return pts


@dataclass(frozen=True)
class AverageTrace:
    checkpoints: tuple[int, ...]
    points: tuple[tuple, ...]
    values: np.ndarray  # shape (points, checkpoints)

    @property
    def sup_abs(self) -> np.ndarray:
        return np.abs(self.values).max(axis=0)

    @property
    def l2(self) -> np.ndarray:
        return np.sqrt((np.abs(self.values) ** 2).mean(axis=0))


def _check_polynomial(p: PhasePolynomial, n_max: int):
    if not p.is_integer:
        raise ValueError("p must have integer coefficients")
    if float(sum(abs(float(c)) for c in p.coeffs)) * float(max(n_max, 1)) ** p.degree >= 2.0**62:
        raise ValueError("p(n) exceeds the 64-bit range on the requested horizon")
    if any(c < 0 for c in p.coeffs):
        values = p.integer_values(np.arange(n_max, dtype=np.int64))
        if values.min() < 0:
            raise ValueError("p takes negative values on the range; rejected")


def _segment_sums(terms: np.ndarray, checkpoints: Sequence[int]) -> list[complex]:
    out, total_re, total_im, start = [], [], [], 0
    for cp in checkpoints:
        seg = terms[start:cp]
        total_re.append(math.fsum(seg.real))
        total_im.append(math.fsum(seg.imag))
        out.append(complex(math.fsum(total_re), math.fsum(total_im)) / cp)
        start = cp
    return out


def weighted_average(
    system: DynSystem,
    f: Observable,
    seq: AutomaticSequence,
    p: PhasePolynomial,
    points: Sequence[Sequence],
    checkpoints: Sequence[int],
) -> AverageTrace:
    """``E_{n<N} a(n) f(T^{p(n)} x)`` for each starting point and checkpoint ``N``."""
    checkpoints = sorted(int(c) for c in checkpoints)
    n_max = checkpoints[-1]
    _check_polynomial(p, n_max)
    times = p.integer_values(np.arange(n_max, dtype=np.int64))
    weights = seq.values(n_max)
    bound = float(np.abs(weights).max()) * f.sup_bound
    rows = []
    for x in points:
        terms = weights * f(system.orbit(x, times))
        row = _segment_sums(terms, checkpoints)
        if max(abs(v) for v in row) > bound * (1 + 1e-12) + 1e-12:
            raise AssertionError("trace value exceeds max|a| * sup|f|")
        rows.append(row)
    return AverageTrace(tuple(checkpoints), tuple(tuple(x) for x in points), np.array(rows))


def spectral_oracle(system: DynSystem, m: int, seq: AutomaticSequence, p: PhasePolynomial, n: int, x0) -> complex:
    """``e(m x0) E_{n<N} a(n) e(m alpha p(n))`` for a rotation and the character ``e(m x)``."""
    if system.kind not in ("rotation", "rational"):
        raise ValueError("spectral oracle needs a rotation")
    x0 = x0[0] if isinstance(x0, (tuple, list)) else x0
    lead = complex(expi(float(Fraction(m) * Fraction(x0)) % 1.0 if isinstance(x0, Fraction) else (m * x0) % 1.0))
    if m == 0:
        return lead * complex(partial_sum(seq, n)) / n
    if not p.is_integer:
        raise ValueError("p must have integer coefficients")
    alpha = system.alpha
    if p.degree == 1:
        beta = frac_mul_int(alpha, m * int(p.coeffs[1]))
        shift = complex(expi(frac_mul_int(alpha, m * int(p.coeffs[0]))))
        arg = Fraction(alpha * m * int(p.coeffs[1])) % 1 if isinstance(alpha, Fraction) else [float(beta)]
        return lead * shift * complex(interval_means(seq, arg, n)[0])
    times = p.integer_values(np.arange(n, dtype=np.int64))
    phases = frac_mul(alpha, times * m)
    terms = seq.values(n) * expi(phases)
    return lead * complex(math.fsum(terms.real), math.fsum(terms.imag)) / n


@dataclass(frozen=True)
class ConvergenceReport:
    trace: AverageTrace
    sup: tuple[float, ...]
    l2: tuple[float, ...]
    consistent_with_zero: bool
    note: str

    def as_dict(self) -> dict:
        return {
            "checkpoints": list(self.trace.checkpoints),
            "sup": list(self.sup),
            "l2": list(self.l2),
            "consistent_with_zero": self.consistent_with_zero,
            "note": self.note,
        }


def convergence_report(
    system: DynSystem,
    f: Observable,
    seq: AutomaticSequence,
    p: PhasePolynomial,
    n_points: int = 32,
    schedule: Sequence[int] = tuple(2**j for j in range(10, 17)),
    seed: int = 0,
    tol: float = 0.0,
) -> ConvergenceReport:
    """Empirical sup and L2 size of the weighted averages over sampled starting points.

    The flag only says the last three checkpoints are decreasing; it is not a proof.
    """
    points = sample_points(system.dim, n_points, seed)
    trace = weighted_average(system, f, seq, p, points, schedule)
    sup = tuple(float(v) for v in trace.sup_abs)
    l2 = tuple(float(v) for v in trace.l2)
    tail = l2[-3:]
    decreasing = len(tail) >= 2 and all(b < a * (1 + tol) for a, b in zip(tail, tail[1:]))
    note = (
        "consistent with convergence to 0 (last checkpoints decreasing)"
        if decreasing
        else "no decay visible on this schedule"
    )
    return ConvergenceReport(trace, sup, l2, decreasing, note)


@dataclass(frozen=True)
class CounterexampleReport:
    lengths: tuple[int, ...]
    means: tuple[Fraction, ...]
    closed_form_ok: bool
    halving_ok: bool
    limsup: Fraction
    liminf: Fraction
    coboundary_checkpoints: tuple[int, ...]
    coboundary_values: tuple[float, ...]
    coboundary_ok: bool

    @property
    def gap(self) -> Fraction:
        return self.limsup - self.liminf

    def as_dict(self) -> dict:
        return {
            "lengths": list(self.lengths),
            "means": [str(m) for m in self.means],
            "closed_form_ok": self.closed_form_ok,
            "halving_ok": self.halving_ok,
            "limsup": float(self.limsup),
            "liminf": float(self.liminf),
            "gap": float(self.gap),
            "coboundary_ok": self.coboundary_ok,
        }


def counterexample_demo(n_max: int = 1 << 24, coboundary_max: int = 1 << 18) -> CounterexampleReport:
    """Cesaro means of ``floor(log2 n) mod 2`` oscillate; coboundary averages do not."""
    seq = builtin_sequence("log-length")
    top = n_max.bit_length() - 1
    lengths = tuple(range(1, top + 1))
    means = tuple(partial_sum(seq, 1 << L) / (1 << L) for L in lengths)
    closed, halving = True, True
    for L, m in zip(lengths, means):
        if L % 2 == 0:
            l = L // 2
            closed &= m == Fraction(2 * (4**l - 1), 3 * 4**l)
        elif L > 1:
            halving &= m == means[L - 2] / 2
    late = [(L, m) for L, m in zip(lengths, means) if L > top // 2]
    limsup = max(m for L, m in late if L % 2 == 0)
    liminf = min(m for L, m in late if L % 2 == 1)

    # f = h - h o T with h(x) = e(x) on the golden rotation
    system = DynSystem("rotation", GOLDEN)
    f = Observable((((1,), 1.0 - complex(expi(GOLDEN))),))
    checkpoints = tuple(sorted({2**j for j in range(4, coboundary_max.bit_length())} | {1000, 10**4, 10**5}))
    checkpoints = tuple(c for c in checkpoints if c <= coboundary_max)
    trace = weighted_average(system, f, seq, PhasePolynomial((0, 1)), [(0.123,)], checkpoints)
    values = tuple(float(abs(v)) for v in trace.values[0])
    ok = all(v <= (2 * math.log2(n) + 2) / n for v, n in zip(values, checkpoints))
    return CounterexampleReport(lengths, means, closed, halving, limsup, liminf, checkpoints, values, ok)
