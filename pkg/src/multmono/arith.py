"""Calculus of arithmetic functions under the divisibility order.

Dirichlet convolution, the Mobius-convolution derivative and its inverse
(summation over divisors), divisibility-monotonicity checks, and the least
divisibility-increasing envelope.  All divisor-pair work runs as harmonic
loops (for each d, walk its multiples), never per-n factorization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import gmpy2

from .primes import mobius_upto
from .tabulated import EXACT, FLOAT, TabulatedFunction

__all__ = [
    "dirichlet_convolve",
    "bougaief_derivative",
    "bougaief_integral",
    "is_mult_monotone",
    "MonotoneVerdict",
    "mult_increasing_envelope",
    "set_of_multiples_indicator",
    "monotone_tolerance",
]


def dirichlet_convolve(f: TabulatedFunction, g: TabulatedFunction) -> TabulatedFunction:
    """(f*g)(n) = sum over d|n of f(d) g(n/d), for n up to the common bound."""
    if f.limit_N != g.limit_N:
        raise ValueError(f"tabulation bounds differ: {f.limit_N} != {g.limit_N}")
    N = f.limit_N
    fv, gv = f.values, g.values
    out = [0] * N
    for d in range(1, N + 1):
        fd = fv[d - 1]
        if fd == 0:
            continue
        for q in range(1, N // d + 1):
            out[d * q - 1] += fd * gv[q - 1]
    mode = EXACT if f.mode == EXACT and g.mode == EXACT else FLOAT
    bits = min(f.precision_bits, g.precision_bits)
    return TabulatedFunction(out, mode, bits)


def _mu_table(N: int) -> TabulatedFunction:
    mu = mobius_upto(N)
    return TabulatedFunction([int(mu[n]) for n in range(1, N + 1)])


def bougaief_derivative(f: TabulatedFunction) -> TabulatedFunction:
    """Df = f * mu; inverse of summation over divisors."""
    return dirichlet_convolve(f, _mu_table(f.limit_N))


def bougaief_integral(g: TabulatedFunction) -> TabulatedFunction:
    """n -> sum over d|n of g(d)."""
    N = g.limit_N
    gv = g.values
    out = [0] * N
    for d in range(1, N + 1):
        gd = gv[d - 1]
        if gd == 0:
            continue
        for m in range(d, N + 1, d):
            out[m - 1] += gd
    return TabulatedFunction(out, g.mode, g.precision_bits)


def monotone_tolerance(f: TabulatedFunction, ref_value) -> float:
    """Comparison slack for float tabulations: 2^(-bits/2) * max(1, |ref|)."""
    if f.mode == EXACT:
        return 0
    return 2.0 ** (-f.precision_bits / 2) * max(1.0, abs(float(ref_value)))


@dataclass(frozen=True)
class MonotoneVerdict:
    holds: bool
    violation: Optional[tuple[int, int]]  # (k, n) with k | n, smallest by (n, k)
    worst_margin: float  # max over pairs of the signed excess; <= 0 when holds

    def __bool__(self) -> bool:
        return self.holds


def is_mult_monotone(f: TabulatedFunction, direction: str = "increasing") -> MonotoneVerdict:
    """Check f(k) <= f(n) (or >=) over all divisor pairs k | n, n <= N.

    Float mode allows slack monotone_tolerance(f, f(k)); the reported
    violation is the lexicographically smallest (n, k), returned as (k, n).
    The scan runs at the tabulation's own precision (plus guard bits), so
    tolerances below double-precision ulp remain meaningful for mpfr
    tabulations.
    """
    if direction not in ("increasing", "decreasing"):
        raise ValueError(f"unknown direction {direction!r}")
    sign = 1 if direction == "increasing" else -1
    N = f.limit_N
    fv = f.values
    best: Optional[tuple[int, int]] = None  # (n, k)
    worst = -float("inf")
    with gmpy2.context(precision=max(f.precision_bits + 16, 64)):
        for k in range(1, N // 2 + 1):
            fk = fv[k - 1]
            tau = monotone_tolerance(f, fk)
            for n in range(2 * k, N + 1, k):
                margin = sign * (fk - fv[n - 1])
                if margin > worst:
                    worst = margin
                if margin > tau:
                    if best is None or (n, k) < best:
                        best = (n, k)
    worst = float(worst) if worst > -float("inf") else 0.0
    if best is None:
        return MonotoneVerdict(True, None, worst)
    return MonotoneVerdict(False, (best[1], best[0]), worst)


def mult_increasing_envelope(f: TabulatedFunction) -> TabulatedFunction:
    """Least g >= f with g(k) <= g(n) whenever k | n: g(n) = max f over divisors."""
    N = f.limit_N
    fv = f.values
    out = list(fv)
    for d in range(1, N // 2 + 1):
        fd = fv[d - 1]
        for n in range(2 * d, N + 1, d):
            if out[n - 1] < fd:
                out[n - 1] = fd
    return TabulatedFunction(out, f.mode, f.precision_bits)


def set_of_multiples_indicator(A, N: int) -> TabulatedFunction:
    """0/1 tabulation of the set of all positive multiples of members of A.

    A is an IntegerSet (or anything with .members_upto); its enumeration cap
    must cover N.
    """
    if getattr(A, "enumeration_cap", None) is not None and A.enumeration_cap < N:
        raise ValueError(f"enumeration cap {A.enumeration_cap} < tabulation bound {N}")
    out = [0] * N
    for a in A.members_upto(N):
        if a < 1:
            raise ValueError("set members must be positive")
        for m in range(a, N + 1, a):
            out[m - 1] = 1
    return TabulatedFunction(out)
