"""Mean values of arithmetic functions along friable truncations.

The central object is the truncated weighted mean

    alpha(f; y) = prod_{p <= y} (1 - 1/p) * sum_{a friable} f(a)/a,

computed as an interval: the friable reciprocal sum has an exact total (the
Euler product), so truncating the enumeration leaves an exactly known tail
mass, which user-supplied bounds on f convert into rigorous endpoints.  For
divisibility-increasing f these intervals increase with y and their
supremum is the logarithmic mean value, which the Cesaro and logarithmic
traces approach from finite x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Optional, Sequence

import numpy as np

from .arith import bougaief_derivative, is_mult_monotone
from .factors import DirectFactorPair, friable_split
from .intervals import INF, Interval
from .primes import primes_upto, smooth_ascending
from .sets import IntegerSet, mertens_product
from .tabulated import TabulatedFunction

__all__ = [
    "mertens_product",
    "FunctionSource",
    "as_source",
    "friable_reduction",
    "AlphaInterval",
    "alpha_friable",
    "alpha_direct_factor",
    "MeanReport",
    "alpha_limit_estimate",
    "GapRow",
    "GapReport",
    "mean_gap_diagnostics",
    "FamilyReport",
    "monotone_family_alpha",
    "DEFAULT_Y_GRID",
    "DEFAULT_X_GRID",
]

DEFAULT_Y_GRID = (2, 3, 5, 7, 11, 13)
DEFAULT_X_GRID = (10**3, 10**4, 10**5, 10**6)
DEFAULT_TAIL_TARGET = Fraction(1, 10**6)
DEFAULT_MEMBER_CAP = 500_000


@dataclass(frozen=True)
class FunctionSource:
    """An arithmetic function evaluable at arbitrary n, with an optional
    bulk tabulation fast path."""

    fn: Callable[[int], object]
    name: str = "f"
    array_upto: Optional[Callable[[int], np.ndarray]] = field(default=None, compare=False)

    def __call__(self, n: int):
        return self.fn(n)

    def values_array(self, X: int) -> np.ndarray:
        """float64 array v with v[n] = f(n), n = 1..X (v[0] = 0)."""
        if self.array_upto is not None:
            return np.asarray(self.array_upto(X), dtype=np.float64)
        v = np.zeros(X + 1)
        f = self.fn
        for n in range(1, X + 1):
            v[n] = float(f(n))
        return v

    def tabulate(self, N: int) -> TabulatedFunction:
        return TabulatedFunction.auto([self.fn(n) for n in range(1, N + 1)])


def as_source(obj, name: Optional[str] = None) -> FunctionSource:
    """Coerce a callable, TabulatedFunction, or IntegerSet (its indicator)
    into a FunctionSource."""
    if isinstance(obj, FunctionSource):
        return obj
    if isinstance(obj, IntegerSet):
        return FunctionSource(
            fn=lambda n: 1 if obj.member(n) else 0,
            name=name or f"indicator({obj.name})",
            array_upto=lambda X: obj.indicator_upto(X),
        )
    if isinstance(obj, TabulatedFunction):
        return FunctionSource(fn=obj, name=name or "table",
                              array_upto=lambda X: _table_array(obj, X))
    if callable(obj):
        return FunctionSource(fn=obj, name=name or getattr(obj, "__name__", "f"))
    raise TypeError(f"cannot interpret {obj!r} as an arithmetic function")


def _table_array(t: TabulatedFunction, X: int) -> np.ndarray:
    if X > t.limit_N:
        raise ValueError(f"tabulation bound {t.limit_N} < requested {X}")
    a = np.zeros(X + 1)
    a[1:] = [float(v) for v in t.values[:X]]
    return a


def friable_reduction(f, y: float) -> FunctionSource:
    """The function n -> f(a) where a is the y-friable part of n."""
    src = as_source(f)
    return FunctionSource(fn=lambda n: src.fn(friable_split(n, y)[0]),
                          name=f"{src.name};friable:{y}")


def _mertens_lenient(y: float) -> Fraction:
    out = Fraction(1)
    for p in primes_upto(int(y)):
        out *= Fraction(p - 1, p)
    return out


@dataclass(frozen=True)
class AlphaInterval:
    """alpha(f; y) enclosure with its truncation provenance."""

    y: float
    interval: Interval
    members: int
    largest_member: int
    tail: float  # inverse-sum mass left unenumerated (exact upper bound)

    def to_json(self) -> dict:
        return {"y": self.y, **self.interval.to_json(),
                "members": self.members, "largest_member": self.largest_member,
                "tail": self.tail}


def _friable_sum(f: Callable[[int], object], y: float, X: Optional[int],
                 tail_target: Fraction, member_cap: int):
    """Accumulate f(a)/a over friable a, returning (sum, slop, tail, count, amax).

    Stops at a > X when X is given, otherwise when the exact remaining
    inverse-sum mass drops below tail_target (or the member cap is hit).
    The sum stays an exact Fraction while f yields rationals; the slop term
    covers float accumulation error otherwise.
    """
    total_inv = 1 / _mertens_lenient(y)
    partial_inv = Fraction(0)
    s = Fraction(0)
    sum_abs = 0.0
    exact = True
    count = 0
    amax = 0
    tail = total_inv
    for a in smooth_ascending(y):
        if X is not None and a > X:
            break
        if X is None and (tail < tail_target or count >= member_cap):
            break
        v = f(a)
        term_inv = Fraction(1, a)
        partial_inv += term_inv
        tail = total_inv - partial_inv
        if exact and isinstance(v, Rational):
            s += Fraction(v) / a
        else:
            if exact:
                s = float(s)
                exact = False
            s += float(v) / a
        sum_abs += abs(float(v)) / a
        count += 1
        amax = a
    slop = 0 if exact else count * 2.3e-16 * max(sum_abs, 1.0)
    return s, slop, tail, count, amax


def _bounded_tail_interval(s, slop, tail, lower, upper) -> Interval:
    """Interval for sum + omitted terms; the omitted inverse-sum mass is
    exactly `tail` (Euler product total minus the enumerated part), and the
    omitted values lie in [lower, upper]."""
    lo_add = lower * tail
    if upper is None:
        hi_add = INF if tail > 0 else 0
    else:
        hi_add = upper * tail
    return Interval(s - slop + lo_add, INF if hi_add == INF else s + slop + hi_add)


def alpha_friable(f, y: float, X: Optional[int] = None, *,
                  lower, upper=None,
                  tail_target: Fraction = DEFAULT_TAIL_TARGET,
                  member_cap: int = DEFAULT_MEMBER_CAP) -> AlphaInterval:
    """Enclose alpha(f; y) = mertens(y) * sum_{a friable} f(a)/a.

    `lower` (required) and `upper` (optional, None meaning unbounded above)
    must bound f on the friable integers; they control how the exactly
    known unenumerated mass enters the endpoints.
    """
    if lower is None:
        raise ValueError("alpha_friable requires a lower bound for f")
    if not y > 1:
        raise ValueError("y must exceed 1")
    src = as_source(f)
    s, slop, tail, count, amax = _friable_sum(src.fn, y, X, tail_target, member_cap)
    raw = _bounded_tail_interval(s, slop, tail, lower, upper)
    mert = _mertens_lenient(y)
    return AlphaInterval(y=y, interval=raw.scale(mert), members=count,
                         largest_member=amax, tail=float(tail))


def alpha_direct_factor(f, pair: DirectFactorPair, X: int, *,
                        lower, upper=None) -> tuple[Interval, dict]:
    """Enclose alpha(f; A) = lambda * sum_{a in A} f(a)/a for a verified
    direct-factor pair; combines both truncations by interval arithmetic."""
    if lower is None:
        raise ValueError("alpha_direct_factor requires a lower bound for f")
    src = as_source(f)
    s = Fraction(0)
    sum_abs = 0.0
    exact = True
    partial_inv = Fraction(0)
    count = 0
    for a in pair.A.members_upto(X):
        v = src.fn(a)
        partial_inv += Fraction(1, a)
        if exact and isinstance(v, Rational):
            s += Fraction(v) / a
        else:
            if exact:
                s = float(s)
                exact = False
            s += float(v) / a
        sum_abs += abs(float(v)) / a
        count += 1
    slop = 0 if exact else count * 2.3e-16 * max(sum_abs, 1.0)
    inv = pair.inv_sum_A
    tail_lo = max(0, inv.lo - partial_inv)
    tail_hi = INF if inv.hi == INF else max(0, inv.hi - partial_inv)
    fs_lo = s - slop + (lower * tail_hi if lower < 0 else lower * tail_lo)
    if upper is None:
        fs_hi = INF if tail_hi > 0 else s + slop
    else:
        fs_hi = s + slop + (upper * tail_hi if upper > 0 else upper * tail_lo)
    lam = pair.density_interval
    lo = lam.lo * fs_lo if fs_lo >= 0 else lam.hi * fs_lo
    hi = INF if fs_hi == INF else (lam.hi * fs_hi if fs_hi >= 0 else lam.lo * fs_hi)
    meta = {"members": count, "X": X, "heuristic_tail": pair.heuristic_tail}
    return Interval(lo, hi), meta


# -- traces ----------------------------------------------------------------

def _traces(src: FunctionSource, x_grid: Sequence[int]) -> tuple[list, list]:
    xs = sorted(int(x) for x in x_grid)
    X = xs[-1]
    v = src.values_array(X)
    csum = np.cumsum(v)
    n = np.arange(X + 1, dtype=np.float64)
    n[0] = 1.0
    hsum = np.cumsum(v / n)
    cesaro = [(x, float(csum[x]) / x) for x in xs]
    logmean = [(x, float(hsum[x]) / math.log(x)) for x in xs if x > 1]
    return cesaro, logmean


def _last_decade_minmax(trace: list[tuple[int, float]]) -> tuple[float, float]:
    if not trace:
        return math.nan, math.nan
    xmax = trace[-1][0]
    vals = [v for x, v in trace if x > xmax / 10]
    return min(vals), max(vals)


@dataclass(frozen=True)
class MeanReport:
    """alpha(f; y) ladder plus Cesaro / logarithmic traces.

    liminf/limsup proxies are min/max of the trace over the last decade of
    the x grid; they are finite-x stand-ins, not limit claims.
    """

    name: str
    direction: str
    cesaro: list
    logmean: list
    alpha_y: list  # of AlphaInterval
    alpha_limit: Interval
    alpha_sup_lower: float
    cesaro_liminf_proxy: float
    logmean_limsup_proxy: float
    N_check: int

    def to_json(self) -> dict:
        return {
            "function": self.name,
            "direction": self.direction,
            "N_check": self.N_check,
            "alpha_y": [a.to_json() for a in self.alpha_y],
            "alpha_limit": self.alpha_limit.to_json(),
            "alpha_sup_lower": self.alpha_sup_lower,
            "cesaro": [{"x": x, "value": v} for x, v in self.cesaro],
            "logmean": [{"x": x, "value": v} for x, v in self.logmean],
            "cesaro_liminf_proxy": self.cesaro_liminf_proxy,
            "logmean_limsup_proxy": self.logmean_limsup_proxy,
        }


def alpha_limit_estimate(f, y_grid: Sequence[float] = DEFAULT_Y_GRID,
                         x_grid: Sequence[int] = DEFAULT_X_GRID, *,
                         N_check: int = 1000, upper=None,
                         tail_target: Fraction = DEFAULT_TAIL_TARGET,
                         member_cap: int = DEFAULT_MEMBER_CAP) -> MeanReport:
    """Estimate the logarithmic mean value of a divisibility-monotone f.

    Rejects f (reporting the violating pair) when the tabulation to N_check
    is not divisibility-monotone.  A decreasing f is handled by negation.
    """
    src = as_source(f)
    table = src.tabulate(N_check)
    verdict = is_mult_monotone(table, "increasing")
    direction = "increasing"
    work = src
    if not verdict.holds:
        dec = is_mult_monotone(table, "decreasing")
        if not dec.holds:
            raise ValueError(
                f"function is not divisibility-monotone: increasing fails at "
                f"(k, n) = {verdict.violation}, decreasing fails at {dec.violation}")
        direction = "decreasing"
        work = FunctionSource(fn=lambda n: -src.fn(n), name=f"-({src.name})",
                              array_upto=(None if src.array_upto is None
                                          else (lambda X: -src.values_array(X))))

    lower = work.fn(1)  # divisibility-increasing functions are minimized at 1
    alphas = [alpha_friable(work, yy, lower=lower, upper=upper,
                            tail_target=tail_target, member_cap=member_cap)
              for yy in y_grid]
    cesaro, logmean = _traces(work, x_grid)
    sup_lower = max(float(a.interval.lo) for a in alphas)
    hi = INF if upper is None else upper
    limit = Interval(sup_lower, hi if hi == INF else float(hi))
    ces_lim, _ = _last_decade_minmax(cesaro)
    _, log_lim = _last_decade_minmax(logmean)

    if direction == "decreasing":
        alphas = [AlphaInterval(a.y, a.interval.scale(-1), a.members,
                                a.largest_member, a.tail) for a in alphas]
        limit = limit.scale(-1)
        cesaro = [(x, -v) for x, v in cesaro]
        logmean = [(x, -v) for x, v in logmean]
        ces_lim, log_lim = -ces_lim, -log_lim
        sup_lower = -sup_lower

    return MeanReport(name=src.name, direction=direction, cesaro=cesaro,
                      logmean=logmean, alpha_y=alphas, alpha_limit=limit,
                      alpha_sup_lower=sup_lower, cesaro_liminf_proxy=ces_lim,
                      logmean_limsup_proxy=log_lim, N_check=N_check)


@dataclass(frozen=True)
class GapRow:
    x: int
    cesaro: float
    logmean: float
    alpha_lower: float


@dataclass(frozen=True)
class GapReport:
    rows: list
    derivative_nonnegative: Optional[bool]
    derivative_bound: int
    closed_form_mean: Optional[float]  # sum of Df(m)/m to the bound, when Df >= 0
    cesaro_vs_closed_form: Optional[float]

    def to_json(self) -> dict:
        return {
            "rows": [{"x": r.x, "cesaro": r.cesaro, "logmean": r.logmean,
                      "alpha_lower": r.alpha_lower} for r in self.rows],
            "derivative_nonnegative": self.derivative_nonnegative,
            "derivative_bound": self.derivative_bound,
            "closed_form_mean": self.closed_form_mean,
            "cesaro_vs_closed_form": self.cesaro_vs_closed_form,
        }


def mean_gap_diagnostics(f, x_grid: Sequence[int] = DEFAULT_X_GRID, *,
                         y_grid: Sequence[float] = DEFAULT_Y_GRID,
                         derivative_bound: int = 10_000,
                         upper=None) -> GapReport:
    """Side-by-side Cesaro and logarithmic traces against the alpha lower
    bound, for a divisibility-increasing f.

    When the Mobius-convolution derivative of f is nonnegative on the
    checked range, the closed-form mean (sum of Df(m)/m) is reported and
    compared with the final Cesaro value.
    """
    src = as_source(f)
    cesaro, logmean = _traces(src, x_grid)
    logdict = dict(logmean)
    lower = src.fn(1)
    alphas = [alpha_friable(src, yy, lower=lower, upper=upper) for yy in y_grid]
    alpha_lower = max(float(a.interval.lo) for a in alphas)
    rows = [GapRow(x=x, cesaro=c, logmean=logdict.get(x, math.nan),
                   alpha_lower=alpha_lower) for x, c in cesaro]

    N_d = min(derivative_bound, max(int(x) for x in x_grid))
    table = src.tabulate(N_d)
    nonneg = None
    closed = None
    gap = None
    if table.mode == "exact":
        df = bougaief_derivative(table)
        nonneg = all(v >= 0 for v in df.values)
        if nonneg:
            closed = float(sum(Fraction(v) / m for m, v in enumerate(df.values, start=1)))
            gap = rows[-1].cesaro - closed
    return GapReport(rows=rows, derivative_nonnegative=nonneg,
                     derivative_bound=N_d, closed_form_mean=closed,
                     cesaro_vs_closed_form=gap)


@dataclass(frozen=True)
class FamilyReport:
    alpha_k: list  # (k, Interval)
    alpha_sup: Optional[Interval]
    nondecreasing: bool
    monotone_in_k: bool

    def to_json(self) -> dict:
        return {
            "alpha_k": [{"k": k, **iv.to_json()} for k, iv in self.alpha_k],
            "alpha_sup": None if self.alpha_sup is None else self.alpha_sup.to_json(),
            "nondecreasing": self.nondecreasing,
            "monotone_in_k": self.monotone_in_k,
        }


def monotone_family_alpha(family: Sequence, k_grid: Sequence[int], *,
                          f_sup=None, y_grid: Sequence[float] = DEFAULT_Y_GRID,
                          N_check: int = 500, uppers: Optional[Sequence] = None,
                          upper_sup=None) -> FamilyReport:
    """alpha along an increasing family of divisibility-increasing functions.

    `family` is indexed like `k_grid`; each member must dominate the
    previous one pointwise (checked on 1..N_check, violation reported).
    """
    if len(family) != len(k_grid):
        raise ValueError("family and k_grid lengths differ")
    sources = [as_source(fk) for fk in family]
    tables = [s.tabulate(N_check) for s in sources]
    for i in range(1, len(tables)):
        for n in range(1, N_check + 1):
            if tables[i](n) < tables[i - 1](n):
                raise ValueError(
                    f"family not nondecreasing in k: f_{k_grid[i]}({n}) < "
                    f"f_{k_grid[i - 1]}({n})")
    reports = []
    for i, s in enumerate(sources):
        up = uppers[i] if uppers is not None else None
        rep = alpha_limit_estimate(s, y_grid, (10**3,), N_check=min(N_check, 300), upper=up)
        reports.append((k_grid[i], _alpha_hull(rep)))
    sup_iv = None
    if f_sup is not None:
        rep = alpha_limit_estimate(f_sup, y_grid, (10**3,), N_check=min(N_check, 300),
                                   upper=upper_sup)
        sup_iv = _alpha_hull(rep)
    nondec = all(float(reports[i][1].lo) >= float(reports[i - 1][1].lo) - _wiggle(reports, i)
                 for i in range(1, len(reports)))
    return FamilyReport(alpha_k=reports, alpha_sup=sup_iv,
                        nondecreasing=nondec, monotone_in_k=True)


def _alpha_hull(rep: MeanReport) -> Interval:
    lo = max(float(a.interval.lo) for a in rep.alpha_y)
    hi = rep.alpha_limit.hi
    return Interval(lo, hi if hi == INF else float(hi))


def _wiggle(reports, i) -> float:
    widths = []
    for j in (i - 1, i):
        iv = reports[j][1]
        if iv.hi != INF:
            widths.append(float(iv.hi - iv.lo))
    return max(widths) if widths else 1e-9
