"""Closed-interval values for truncated sums and products.

Every quantity whose exact value is only known up to a truncation error is
carried as an Interval; endpoints may be Fraction (exact) or float, and
+inf is a legal upper endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

INF = math.inf


def _as_float(x) -> float:
    return float(x)


@dataclass(frozen=True)
class Interval:
    lo: object  # Fraction, int or float; -inf allowed
    hi: object  # Fraction, int, float or +inf

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x)

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def width(self) -> float:
        if self.hi == INF or self.lo == -INF:
            return INF
        return _as_float(self.hi - self.lo)

    def midpoint(self) -> float:
        if self.hi == INF or self.lo == -INF:
            raise ValueError("midpoint of an unbounded interval")
        return _as_float(self.lo + (self.hi - self.lo) / 2)

    def is_exact(self) -> bool:
        return isinstance(self.lo, Rational) and isinstance(self.hi, Rational) and self.lo == self.hi

    def scale(self, c) -> "Interval":
        if c < 0:
            return Interval(_mul(self.hi, c), _mul(self.lo, c))
        return Interval(_mul(self.lo, c), _mul(self.hi, c))

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_add(self.lo, other.lo), _add(self.hi, other.hi))

    def reciprocal(self) -> "Interval":
        """1/x for an interval with lo > 0; hi = +inf maps to lo = 0."""
        if self.lo <= 0:
            raise ValueError("reciprocal requires a strictly positive interval")
        new_lo = 0 if self.hi == INF else _div1(self.hi)
        return Interval(new_lo, _div1(self.lo))

    def to_json(self) -> dict:
        def enc(x):
            if x == INF:
                return "inf"
            if x == -INF:
                return "-inf"
            return float(x)

        return {"lo": enc(self.lo), "hi": enc(self.hi)}

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


def _add(a, b):
    if INF in (a, b):
        return INF
    if -INF in (a, b):
        return -INF
    return a + b


def _mul(a, c):
    if a == INF:
        return INF if c > 0 else (-INF if c < 0 else 0)
    if a == -INF:
        return -INF if c > 0 else (INF if c < 0 else 0)
    return a * c


def _div1(x):
    if x == INF:
        return 0
    if isinstance(x, Rational):
        return Fraction(1, 1) / Fraction(x)
    return 1.0 / x
