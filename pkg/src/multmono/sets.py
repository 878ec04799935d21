"""Integer sets, their mini-grammar, and truncated inverse sums.

Grammar accepted on the command line and in library entry points:

    powers:2        geometric progressions {p^k, k >= 0}
    squares         perfect squares
    squarefree      squarefree integers
    friable:y       integers with all prime factors <= y
    sifted:y        integers with all prime factors  > y
    list:2,3,5      an explicit finite set
    multiples:2,3   all positive multiples of the listed integers

Membership predicates agree with the enumerators everywhere below the
enumeration cap (unbounded for all built-in families).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .intervals import INF, Interval
from .primes import primes_upto, smooth_ascending

__all__ = [
    "SetSpecError",
    "IntegerSet",
    "parse_integer_set",
    "complement_set",
    "inverse_sum",
    "mertens_product",
]


class SetSpecError(ValueError):
    """Raised when a set spec string cannot be parsed."""


@dataclass(frozen=True)
class IntegerSet:
    """An enumerable set of positive integers with a membership predicate."""

    name: str
    kind: str
    params: tuple = ()
    enumeration_cap: Optional[int] = None  # None: enumerable everywhere
    member: Callable[[int], bool] = field(default=None, repr=False, compare=False)

    def __contains__(self, n: int) -> bool:
        if n < 1:
            return False
        if self.enumeration_cap is not None and n > self.enumeration_cap:
            raise ValueError(f"membership query {n} beyond enumeration cap {self.enumeration_cap}")
        return self.member(n)

    def indicator_upto(self, X: int) -> np.ndarray:
        """uint8 array ind of length X+1 with ind[n] = 1 iff n in the set."""
        if self.enumeration_cap is not None and X > self.enumeration_cap:
            raise ValueError(f"enumeration to {X} beyond cap {self.enumeration_cap}")
        return _indicator(self.kind, self.params, X)

    def members_upto(self, X: int) -> list[int]:
        ind = self.indicator_upto(X)
        return [int(n) for n in np.nonzero(ind)[0]]


def _powers_member(p):
    def member(n):
        while n % p == 0:
            n //= p
        return n == 1

    return member


def _squarefree_member(n: int) -> bool:
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        while n % d == 0:
            n //= d
        d += 1 if d == 2 else 2
    return True


def _friable_member(y):
    plist = primes_upto(int(y))

    def member(n):
        for p in plist:
            while n % p == 0:
                n //= p
        return n == 1

    return member


def _sifted_member(y):
    plist = primes_upto(int(y))

    def member(n):
        return all(n % p for p in plist)

    return member


def _indicator(kind: str, params: tuple, X: int) -> np.ndarray:
    ind = np.zeros(X + 1, dtype=np.uint8)
    if kind == "powers":
        p = params[0]
        a = 1
        while a <= X:
            ind[a] = 1
            a *= p
    elif kind == "squares":
        ind[np.arange(1, math.isqrt(X) + 1) ** 2] = 1
    elif kind == "squarefree":
        ind[1:] = 1
        for p in primes_upto(math.isqrt(X)):
            ind[p * p :: p * p] = 0
    elif kind == "friable":
        y = params[0]
        if len(primes_upto(int(y))) <= 10:
            for a in _smooth_members(y, X):
                ind[a] = 1
        else:
            ind[1:] = 1
            for p in primes_upto(X):
                if p > y:
                    ind[p::p] = 0
    elif kind == "sifted":
        ind[1:] = 1
        for p in primes_upto(min(int(params[0]), X)):
            ind[p::p] = 0
    elif kind == "band":  # prime factors p with y < p <= z
        y, z = params
        ind[1:] = 1
        for p in primes_upto(X):
            if p <= y or p > z:
                ind[p::p] = 0
    elif kind == "list":
        for a in params[0]:
            if a <= X:
                ind[a] = 1
    elif kind == "multiples":
        for a in params[0]:
            if a <= X:
                ind[a::a] = 1
    elif kind == "nondivisible":
        ind[1:] = 1
        for p in params[0]:
            ind[p::p] = 0
    else:
        raise SetSpecError(f"unknown set kind {kind!r}")
    return ind


def _smooth_members(y, X) -> list[int]:
    out = []
    for a in smooth_ascending(y):
        if a > X:
            break
        out.append(a)
    return out


def _make(kind: str, params: tuple, name: str) -> IntegerSet:
    if kind == "powers":
        member = _powers_member(params[0])
    elif kind == "squares":
        member = lambda n: math.isqrt(n) ** 2 == n
    elif kind == "squarefree":
        member = _squarefree_member
    elif kind == "friable":
        member = _friable_member(params[0])
    elif kind == "sifted":
        member = _sifted_member(params[0])
    elif kind == "band":
        y, z = params
        lo, hi = _sifted_member(y), _friable_member(z)
        member = lambda n: lo(n) and hi(n)
    elif kind == "list":
        elems = frozenset(params[0])
        member = lambda n: n in elems
    elif kind == "multiples":
        gens = params[0]
        member = lambda n: any(n % a == 0 for a in gens)
    elif kind == "nondivisible":
        gens = params[0]
        member = lambda n: all(n % a for a in gens)
    else:
        raise SetSpecError(f"unknown set kind {kind!r}")
    return IntegerSet(name=name, kind=kind, params=params, member=member)


def parse_integer_set(text: str) -> IntegerSet:
    """Parse a set spec string; raises SetSpecError naming the bad token."""
    head, sep, rest = text.partition(":")
    head = head.strip()
    if head == "squares":
        return _make("squares", (), "squares")
    if head == "squarefree":
        return _make("squarefree", (), "squarefree")
    if head in ("powers", "friable", "sifted", "list", "multiples"):
        if not sep or not rest:
            raise SetSpecError(f"set spec '{head}' needs arguments, e.g. '{head}:2'")
        if head == "powers":
            p = _parse_int(rest, text)
            if p < 2:
                raise SetSpecError(f"powers base must be >= 2, got {p}")
            return _make("powers", (p,), f"powers:{p}")
        if head in ("friable", "sifted"):
            y = _parse_float(rest, text)
            if not y > 1:
                raise SetSpecError(f"{head} bound must be > 1, got {y}")
            return _make(head, (y,), f"{head}:{_fmt(y)}")
        gens = tuple(sorted({_parse_int(t, text) for t in rest.split(",")}))
        if any(a < 1 for a in gens):
            raise SetSpecError(f"set members must be positive in {text!r}")
        return _make(head, (gens,), f"{head}:{','.join(map(str, gens))}")
    raise SetSpecError(f"unknown set family {head!r}")


def _parse_int(tok: str, ctx: str) -> int:
    try:
        v = float(tok)
        if v != int(v):
            raise ValueError
        return int(v)
    except ValueError:
        raise SetSpecError(f"bad integer {tok!r} in set spec {ctx!r}") from None


def _parse_float(tok: str, ctx: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise SetSpecError(f"bad number {tok!r} in set spec {ctx!r}") from None


def _fmt(y: float) -> str:
    return str(int(y)) if y == int(y) else str(y)


def band_set(y: float, z: float) -> IntegerSet:
    """Integers whose prime factors p all satisfy y < p <= z."""
    if z < y:
        raise ValueError(f"band requires z >= y, got y={y}, z={z}")
    return _make("band", (y, z), f"band:{_fmt(y)},{_fmt(z)}")


def complement_set(A: IntegerSet) -> Optional[IntegerSet]:
    """Known complementary direct factor of A, or None."""
    if A.kind == "powers":
        p = A.params[0]
        return _make("nondivisible", ((p,),), f"nondivisible:{p}")
    if A.kind == "squares":
        return _make("squarefree", (), "squarefree")
    if A.kind == "squarefree":
        return _make("squares", (), "squares")
    if A.kind == "friable":
        return _make("sifted", A.params, f"sifted:{_fmt(A.params[0])}")
    if A.kind == "sifted":
        return _make("friable", A.params, f"friable:{_fmt(A.params[0])}")
    return None


def mertens_product(y: float) -> Fraction:
    """Product of (1 - 1/p) over primes p <= y, exact."""
    if y < 2:
        raise ValueError("mertens_product requires y >= 2")
    out = Fraction(1)
    for p in primes_upto(int(y)):
        out *= Fraction(p - 1, p)
    return out


ZETA2_TERMS = 2000
DIVERGENCE_CAP = 50.0


def inverse_sum(A: IntegerSet, *, X_cap: int = 100_000,
                tail_bound: Optional[float] = None,
                divergence_cap: float = DIVERGENCE_CAP) -> tuple[Interval, bool]:
    """Interval enclosing the sum of 1/a over the whole set, plus a
    heuristic flag.

    Exact closed forms are used where they exist (geometric progressions,
    friable sets via the Euler product, finite lists, squares via a zeta(2)
    truncation with integral tail).  Families with positive counting density
    (multiples of a nonempty set, squarefree, sifted, nondivisible) have a
    provably divergent reciprocal sum and report [partial, +inf).  Otherwise
    the truncated sum to X_cap is a rigorous lower bound; the upper endpoint
    comes from `tail_bound` if supplied, is +inf once the partial sum
    exceeds `divergence_cap` (divergence evidence), and is a flagged
    last-octave extrapolation in the remaining case.
    """
    if A.kind in ("multiples", "squarefree", "sifted", "nondivisible"):
        ind = A.indicator_upto(X_cap)
        recip = ind[1:] / np.arange(1, X_cap + 1)
        partial = float(recip.sum())
        return Interval(partial * (1 - 1e-9), INF), False
    if A.kind == "powers":
        p = A.params[0]
        return Interval.point(Fraction(p, p - 1)), False
    if A.kind == "friable":
        return Interval.point(1 / mertens_product(A.params[0])), False
    if A.kind == "band":
        y, z = A.params
        out = Fraction(1)
        for p in primes_upto(int(z)):
            if p > y:
                out *= Fraction(p, p - 1)
        return Interval.point(out), False
    if A.kind == "list":
        return Interval.point(sum(Fraction(1, a) for a in A.params[0])), False
    if A.kind == "squares":
        partial = sum(Fraction(1, k * k) for k in range(1, ZETA2_TERMS + 1))
        return Interval(partial + Fraction(1, ZETA2_TERMS + 1),
                        partial + Fraction(1, ZETA2_TERMS)), False
    # general set: float partial sum with generous rounding slop
    ind = A.indicator_upto(X_cap)
    recip = np.zeros(X_cap + 1)
    n = np.arange(1, X_cap + 1)
    recip[1:] = ind[1:] / n
    partial = float(recip.sum())
    slop = 1e-9 * max(partial, 1.0)
    lo = partial - slop
    if tail_bound is not None:
        return Interval(lo, partial + tail_bound + slop), False
    if partial > divergence_cap:
        return Interval(lo, INF), False
    last_octave = float(recip[X_cap // 2 + 1 :].sum())
    return Interval(lo, partial + 2.0 * last_octave + slop), True
