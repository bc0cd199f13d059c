"""Polynomial phases and exact fractional parts of ``alpha * C`` for integer ``C``.

Floating ``alpha`` is split as ``A / 2**64 + rest`` with ``A`` an integer; the
product ``A * C`` is then reduced mod ``2**64`` with unsigned wraparound, so the
fractional part is exact up to the final rounding to double precision no matter
how large ``C`` is.  ``rest`` is zero unless ``|alpha|`` is tiny.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "PhasePolynomial",
    "frac_mul",
    "frac_mul_int",
    "frac_mul_binomial2",
    "expi",
    "parse_real",
    "parse_phase",
    "GOLDEN",
    "SQRT2",
]

TWO64 = 1 << 64
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SQRT2 = math.sqrt(2.0)
_U64 = np.uint64


def _split(alpha) -> tuple[np.ndarray, np.ndarray]:
    """``alpha mod 1 = top / 2**64 + rest`` with integer ``top`` and ``0 <= rest < 2**-64``."""
    a = np.mod(np.asarray(alpha, dtype=np.float64), 1.0)
    a = np.where(a >= 1.0, 0.0, a)
    scaled = np.floor(a * 2.0**64)
    rest = a - scaled / 2.0**64
    top = scaled.astype(np.uint64) if np.all(scaled < 2.0**63) else _big_to_u64(scaled)
    return top, rest


def _big_to_u64(scaled: np.ndarray) -> np.ndarray:
    hi = scaled >= 2.0**63
    low = np.where(hi, scaled - 2.0**63, scaled).astype(np.uint64)
    return low + np.where(hi, _U64(1 << 63), _U64(0))


def _as_u64(c) -> np.ndarray:
    c = np.asarray(c)
    if c.dtype == np.uint64:
        return c
    if c.dtype.kind in "iu" or c.dtype == object:
        return c.astype(np.int64).view(np.uint64) if c.dtype.kind == "i" else c.astype(np.uint64)
    raise TypeError("integer multipliers expected")


def frac_mul(alpha, c, c_float=None) -> np.ndarray:
    """Fractional part of ``alpha * c`` for integers ``c`` (given mod 2**64); broadcasts.

    ``c_float`` is a float approximation of ``c`` when the true value exceeds
    ``2**64``; it only multiplies the tiny remainder of ``alpha``.
    """
    c = np.asarray(c)
    if isinstance(alpha, Fraction) or (isinstance(alpha, int) and not isinstance(alpha, bool)):
        alpha = Fraction(alpha)
        p, q = alpha.numerator % alpha.denominator, alpha.denominator
        if q == 1:
            return np.zeros(c.shape)
        if c.dtype == np.uint64 or c_float is not None:
            raise ValueError("rational phases need exact integer multipliers")
        cm = np.mod(c.astype(np.int64), q) if q < (1 << 31) else None
        if cm is not None and p * q < (1 << 62):
            return np.mod(cm * p, q) / q
        return np.array([((p * int(x)) % q) / q for x in c.ravel()]).reshape(c.shape)
    top, rest = _split(alpha)
    prod = _as_u64(c) * top
    frac = prod.astype(np.float64) / 2.0**64
    if np.any(rest):
        approx = np.asarray(c, dtype=np.float64) if c_float is None else np.asarray(c_float, dtype=np.float64)
        frac = frac + approx * rest
    frac = np.mod(frac, 1.0)
    return np.where(frac >= 1.0, 0.0, frac)


def frac_mul_int(alpha, c: int):
    """Fractional part of ``alpha * c`` for a (possibly huge) Python integer ``c``; ``alpha`` may be an array."""
    if isinstance(alpha, Fraction):
        return float((alpha * c) % 1)
    return frac_mul(alpha, np.uint64(c % TWO64), c_float=float(c))


def binomial2_u64(m: np.ndarray) -> np.ndarray:
    """``m (m - 1) / 2`` mod 2**64 for nonnegative int64 ``m``."""
    m = np.asarray(m, dtype=np.int64)
    even = (m % 2) == 0
    half = np.where(even, m // 2, (m - 1) // 2).view(np.uint64)
    other = np.where(even, m - 1, m)
    other = np.maximum(other, 0).view(np.uint64)
    return half * other


def frac_mul_binomial2(alpha, m) -> np.ndarray:
    """Fractional part of ``alpha * m (m - 1) / 2``."""
    m = np.asarray(m, dtype=np.int64)
    if isinstance(alpha, Fraction):
        alpha = Fraction(alpha)
        p, q = alpha.numerator, alpha.denominator
        r = np.mod(m, 2 * q)
        # m(m-1)/2 mod q from m mod 2q
        val = np.mod((r * (r - 1)) // 2, q)
        return np.mod(val * (p % q), q) / q
    approx = m.astype(np.float64) * (m.astype(np.float64) - 1.0) / 2.0
    return frac_mul(alpha, binomial2_u64(m), c_float=approx)


def expi(frac) -> np.ndarray:
    """``e(x) = exp(2 pi i x)``."""
    frac = np.asarray(frac, dtype=np.float64)
    return np.exp(2j * np.pi * frac)


@dataclass(frozen=True)
class PhasePolynomial:
    """``p(n) = sum c_i n**i``; coefficients are floats or exact ``Fraction``s."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = []
        for c in self.coeffs:
            if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
                coeffs.append(Fraction(c))
            else:
                coeffs.append(float(c))
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs) or (Fraction(0),))

    @classmethod
    def linear(cls, alpha, shift=0) -> PhasePolynomial:
        return cls((shift, alpha))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_rational(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    @property
    def is_integer(self) -> bool:
        return self.is_rational and all(c.denominator == 1 for c in self.coeffs)

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    @property
    def period(self) -> int:
        """Period of ``n -> e(p(n))`` for rational coefficients."""
        if not self.is_rational:
            raise ValueError("irrational phase has no period")
        return math.lcm(*(c.denominator for c in self.coeffs[1:])) if self.degree else 1

    def integer_values(self, n: np.ndarray) -> np.ndarray:
        """``p(n)`` as int64 for integer-coefficient polynomials (must fit)."""
        if not self.is_integer:
            raise ValueError("polynomial does not have integer coefficients")
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros(n.shape, dtype=np.int64)
        for c in reversed(self.coeffs):
            out = out * n + int(c)
        return out

    def frac(self, n) -> np.ndarray:
        """Fractional part of ``p(n)`` for integer arrays ``n``, exact for each term."""
        n = np.asarray(n, dtype=np.int64)
        total = np.zeros(n.shape)
        power = np.ones(n.shape, dtype=np.int64)
        power_float = np.ones(n.shape)
        for i, c in enumerate(self.coeffs):
            if i:
                power = power * n  # wraps mod 2**64; the exact residue is what we need
                power_float = power_float * n
            if c == 0:
                continue
            if isinstance(c, Fraction):
                q = c.denominator
                residue = np.ones(n.shape, dtype=np.int64)
                nm = np.mod(n, q)
                for _ in range(i):
                    residue = np.mod(residue * nm, q)
                total += np.mod(residue * (c.numerator % q), q) / q
            else:
                total += frac_mul(c, power.view(np.uint64), c_float=power_float)
        return np.mod(total, 1.0)

    def __call__(self, n) -> np.ndarray:
        return expi(self.frac(n))

    def scaled(self, m: int) -> PhasePolynomial:
        return PhasePolynomial(tuple(c * m for c in self.coeffs))

    def describe(self) -> str:
        if self.degree == 1 and self.coeffs[0] == 0:
            c = self.coeffs[1]
            return f"rat:{c}" if isinstance(c, Fraction) else f"lin:{c!r}"
        return "poly:" + ",".join(str(c) if isinstance(c, Fraction) else repr(c) for c in self.coeffs)


def parse_real(token: str):
    """Real constant: integer or ``p/q`` (exact), float, ``sqrt2``, ``golden``, optionally negated."""
    token = token.strip()
    sign = 1
    if token.startswith("-"):
        sign, token = -1, token[1:]
    named = {"sqrt2": SQRT2, "golden": GOLDEN, "sqrt2-1": SQRT2 - 1.0, "pi": math.pi}
    if token in named:
        return sign * named[token]
    if "/" in token or token.isdigit():
        return sign * Fraction(token)
    return sign * float(token)


def parse_phase(text: str) -> PhasePolynomial:
    kind, sep, body = text.partition(":")
    if not sep:
        raise ValueError(f"phase must look like lin:<alpha>, poly:<c0>,..., or rat:<p>/<q>; got {text!r}")
    if kind == "lin":
        return PhasePolynomial.linear(parse_real(body))
    if kind == "rat":
        value = Fraction(body)
        return PhasePolynomial.linear(value)
    if kind == "poly":
        return PhasePolynomial(tuple(parse_real(c) for c in body.split(",")))
    raise ValueError(f"unknown phase kind {kind!r}")
