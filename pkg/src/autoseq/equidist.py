"""Equidistribution of ``n alpha mod 1``, the partition bound, and van der Corput's inequality."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .phase import expi, frac_mul

__all__ = [
    "C0",
    "C_VDC",
    "HypothesisError",
    "ArcClassification",
    "convergents",
    "star_discrepancy",
    "linear_points",
    "classify_arc",
    "PartitionResult",
    "partition_bound_check",
    "VdcResult",
    "vdc_check",
]

C0 = 6  # exponent in the rational alternative: q < delta**-C0, |alpha - p/q| < 1 / (delta**C0 N)
C_VDC = 3.0  # additive constant in the van der Corput majorant


class HypothesisError(ValueError):
    """The equidistribution hypothesis of a bound is not met (not a failure of the bound)."""


def convergents(alpha, limit: int = 64) -> list[Fraction]:
    """Continued-fraction convergents of the exact binary value of ``alpha``."""
    x = Fraction(alpha)
    h0, h1, k0, k1 = 0, 1, 1, 0
    out = []
    for _ in range(limit):
        a = math.floor(x)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        out.append(Fraction(h1, k1))
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    return out


def linear_points(alpha, n: int) -> np.ndarray:
    return frac_mul(alpha, np.arange(n, dtype=np.int64))


def star_discrepancy(points: np.ndarray) -> float:
    """``D*_N = sup_t |#{x_n < t}/N - t|`` for points in [0, 1)."""
    x = np.sort(np.asarray(points, dtype=np.float64))
    n = len(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))


@dataclass(frozen=True)
class ArcClassification:
    alpha: float
    n: int
    delta: float
    verdict: str  # "equidistributed" | "rational" | "undetermined"
    discrepancy: float
    approximant: Fraction | None = None
    distance: float | None = None
    convergents: tuple[Fraction, ...] = ()

    def as_dict(self) -> dict:
        return {
            "alpha": float(self.alpha),
            "N": self.n,
            "delta": self.delta,
            "verdict": self.verdict,
            "discrepancy": self.discrepancy,
            "p/q": None if self.approximant is None else str(self.approximant),
            "distance": self.distance,
        }


def classify_arc(alpha, n: int, delta: float, c0: int = C0) -> ArcClassification:
    """Decide between ``delta``-equidistribution of ``(m alpha)_{m<N}`` and a good rational approximation.

    Equidistribution is certified by ``D*_N < delta`` (Koksma: the Lipschitz
    seminorm bounds the variation).  Failing that, the last convergent with
    ``q < delta**-c0`` and ``|alpha - p/q| < 1/(delta**c0 N)`` is returned.
    """
    if not 0 < delta < 0.5:
        raise ValueError("need 0 < delta < 1/2")
    disc = star_discrepancy(linear_points(alpha, n))
    convs = tuple(convergents(alpha))
    if disc < delta:
        return ArcClassification(alpha, n, delta, "equidistributed", disc, convergents=convs)
    qmax = Fraction(1) / Fraction(delta) ** c0
    radius = 1 / (Fraction(delta) ** c0 * n)
    exact = Fraction(alpha)
    found = None
    for c in convs:
        if c.denominator >= qmax:
            break
        if abs(exact - c) < radius:
            found = c
    if found is not None:
        reduced = found - math.floor(found)
        return ArcClassification(
            alpha, n, delta, "rational", disc, reduced, float(abs(exact - found)), convs
        )
    return ArcClassification(alpha, n, delta, "undetermined", disc, convergents=convs)


@dataclass(frozen=True)
class PartitionResult:
    lhs: float
    bound: float
    margin: float
    parts: int
    discrepancy: float

    @property
    def holds(self) -> bool:
        return self.margin > 0


def partition_bound_check(alpha, n: int, labels) -> PartitionResult:
    """``sum_i |S_i|/N |E_{m in S_i} e(m alpha)| <= 1 - 1/(6 r^2)`` for a partition given by labels."""
    labels = np.asarray(labels)
    if len(labels) != n:
        raise ValueError("one label per index is required")
    _, labels = np.unique(labels, return_inverse=True)
    r = int(labels.max()) + 1
    points = linear_points(alpha, n)
    disc = star_discrepancy(points)
    if not disc < 1.0 / (100 * r * r):
        raise HypothesisError(
            f"hypothesis not satisfied: discrepancy {disc:.3g} >= 1/(100 r^2) = {1 / (100 * r * r):.3g}"
        )
    phases = expi(points)
    sums = np.bincount(labels, weights=phases.real, minlength=r) + 1j * np.bincount(
        labels, weights=phases.imag, minlength=r
    )
    lhs = math.fsum(np.abs(sums)) / n
    bound = 1.0 - 1.0 / (6 * r * r)
    return PartitionResult(lhs, bound, bound - lhs, r, disc)


@dataclass(frozen=True)
class VdcResult:
    lhs: float
    rhs: float
    holds: bool
    fejer_rhs: float

    def as_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "fejer_rhs": self.fejer_rhs}


def vdc_check(x, h: int, n: int, c_vdc: float = C_VDC) -> VdcResult:
    """``|E_{m<N} x(m)|^2`` against ``E_{j<H} |E_{m<N} x(m+j) conj(x(m))| + c_vdc H/N``.

    ``fejer_rhs`` is the majorant that follows from Cauchy-Schwarz with exact
    boundary bookkeeping: ``(1/H)|c_0| + (2/H) sum_{0<d<H} (1 - d/H)|c_d| + 4(H-1)/N``.
    """
    x = np.asarray(x, dtype=np.complex128)
    if h >= n:
        raise ValueError("need H < N")
    if len(x) < n + h:
        raise ValueError("sequence must have at least N + H terms")
    if np.max(np.abs(x)) > 1.0 + 1e-12:
        raise ValueError("sequence must be bounded by 1")
    base = x[:n]
    lhs = abs(base.mean()) ** 2
    corr = np.array([abs(np.mean(x[j : j + n] * np.conj(base))) for j in range(h)])
    rhs = float(corr.mean()) + c_vdc * h / n
    weights = 2.0 * (1.0 - np.arange(h) / h) / h
    weights[0] = 1.0 / h
    fejer = float(np.dot(weights, corr)) + 4.0 * (h - 1) / n
    return VdcResult(float(lhs), rhs, bool(lhs <= rhs), fejer)
