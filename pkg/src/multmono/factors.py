"""Direct factorizations of the positive integers.

A pair of sets (A, B) is a direct factorization when every n >= 1 splits
uniquely as n = a*b with a in A, b in B.  The friable/sifted pair S(y), E(y)
is the canonical example; this module verifies candidate pairs exhaustively,
reduces arithmetic functions through a pair, and measures the
counting density of B against the reciprocal-sum prediction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .intervals import INF, Interval
from .primes import primes_upto
from .sets import IntegerSet, band_set, inverse_sum, parse_integer_set
from .tabulated import TabulatedFunction

__all__ = [
    "friable_split",
    "enumerate_friable",
    "FactorVerdict",
    "verify_direct_factor",
    "DirectFactorPair",
    "make_pair",
    "friable_pair",
    "reduce_by_factor",
    "esv_density",
    "DensityRow",
]


def friable_split(n: int, y: float) -> tuple[int, int]:
    """Split n = a*b with a carrying the prime factors <= y and b the rest."""
    if n < 1:
        raise ValueError("n must be positive")
    if not y > 1:
        raise ValueError("y must exceed 1")
    a = 1
    m = n
    for p in primes_upto(int(y)):
        while m % p == 0:
            m //= p
            a *= p
        if m == 1:
            break
    return a, m


def enumerate_friable(y: float, X: int, window: str = "friable",
                      z: Optional[float] = None) -> list[int]:
    """Sorted members <= X of S(y) ('friable'), E(y) ('sifted'), or the
    band S(y, z) ('band', prime factors p with y < p <= z)."""
    if X < 1:
        raise ValueError("X must be >= 1")
    if window == "band":
        if z is None or z < y:
            raise ValueError(f"band window needs z >= y, got z={z}")
        return band_set(y, z).members_upto(X)
    if window == "friable":
        return parse_integer_set(f"friable:{y}").members_upto(X)
    if window == "sifted":
        return parse_integer_set(f"sifted:{y}").members_upto(X)
    raise ValueError(f"unknown window {window!r}")


@dataclass(frozen=True)
class FactorVerdict:
    holds: bool
    counterexample: Optional[int]  # smallest n with representation count != 1
    count: Optional[int]  # its number of representations

    def __bool__(self):
        return self.holds


def _representation_counts(A: IntegerSet, B: IntegerSet, N: int) -> tuple[np.ndarray, np.ndarray]:
    """reps[n] = #{(a,b): a in A, b in B, ab = n}; apart[n] = one witness a."""
    b_ind = B.indicator_upto(N)
    reps = np.zeros(N + 1, dtype=np.int64)
    apart = np.zeros(N + 1, dtype=np.int64)
    for a in A.members_upto(N):
        bs = np.nonzero(b_ind[: N // a + 1])[0]
        idx = a * bs
        np.add.at(reps, idx, 1)
        apart[idx] = a
    return reps, apart


def verify_direct_factor(A: IntegerSet, B: IntegerSet, N: int) -> FactorVerdict:
    """Exhaustively check unique representation n = a*b for all n <= N."""
    reps, _ = _representation_counts(A, B, N)
    bad = np.nonzero(reps[1:] != 1)[0]
    if bad.size == 0:
        return FactorVerdict(True, None, None)
    n = int(bad[0]) + 1
    return FactorVerdict(False, n, int(reps[n]))


@dataclass(frozen=True)
class DirectFactorPair:
    """A verified direct factorization with its reciprocal-sum data.

    `a_part[n]` is the A-component of the unique splitting of n, for
    n <= verified_to.  `inv_sum_A` encloses the sum of 1/a over all of A;
    `heuristic_tail` records whether its upper endpoint rests on an
    unproven extrapolation.
    """

    A: IntegerSet
    B: IntegerSet
    verified_to: int
    a_part: np.ndarray
    inv_sum_A: Interval
    heuristic_tail: bool

    @property
    def density_interval(self) -> Interval:
        """Predicted counting density of B: reciprocal of inv_sum_A."""
        return self.inv_sum_A.reciprocal()

    def split(self, n: int) -> tuple[int, int]:
        if not 1 <= n <= self.verified_to:
            raise ValueError(f"n={n} beyond verified bound {self.verified_to}")
        a = int(self.a_part[n])
        return a, n // a


def make_pair(A: IntegerSet, B: IntegerSet, verified_to: int,
              tail_bound: Optional[float] = None) -> DirectFactorPair:
    """Verify (A, B) up to a bound and package the result.

    Raises ValueError with the offending n when unique representation fails.
    """
    reps, apart = _representation_counts(A, B, verified_to)
    bad = np.nonzero(reps[1:] != 1)[0]
    if bad.size:
        n = int(bad[0]) + 1
        raise ValueError(
            f"(A={A.name}, B={B.name}) is not a direct factorization: "
            f"n={n} has {int(reps[n])} representations")
    inv, heur = inverse_sum(A, tail_bound=tail_bound)
    return DirectFactorPair(A, B, verified_to, apart, inv, heur)


def friable_pair(y: float, verified_to: int) -> DirectFactorPair:
    """The (S(y), E(y)) pair, verified exhaustively up to the bound."""
    A = parse_integer_set(f"friable:{int(y) if y == int(y) else y}")
    B = parse_integer_set(f"sifted:{int(y) if y == int(y) else y}")
    return make_pair(A, B, verified_to)


def reduce_by_factor(f: TabulatedFunction, pair: DirectFactorPair) -> TabulatedFunction:
    """Replace f(n) by f(a) where n = a*b is the pair's unique splitting."""
    N = f.limit_N
    if pair.verified_to < N:
        raise ValueError(f"pair verified to {pair.verified_to} < tabulation bound {N}")
    vals = [f(int(pair.a_part[n])) for n in range(1, N + 1)]
    return TabulatedFunction(vals, f.mode, f.precision_bits)


@dataclass(frozen=True)
class DensityRow:
    x: int
    empirical: float
    lambda_lo: float
    lambda_hi: float
    heuristic_tail: bool


def esv_density(pair: DirectFactorPair, x_grid: Sequence[int]) -> list[DensityRow]:
    """Empirical counting density of B at each x, with the predicted
    density interval (reciprocal of the truncated sum of 1/a over A)."""
    xs = sorted(int(x) for x in x_grid)
    if not xs or xs[0] < 1:
        raise ValueError("x grid must contain positive integers")
    lam = pair.density_interval
    ind = pair.B.indicator_upto(xs[-1])
    counts = np.cumsum(ind, dtype=np.int64)
    rows = []
    for x in xs:
        rows.append(DensityRow(
            x=x,
            empirical=float(counts[x]) / x,
            lambda_lo=float(lam.lo),
            lambda_hi=float(lam.hi) if lam.hi != INF else float("inf"),
            heuristic_tail=pair.heuristic_tail,
        ))
    return rows
