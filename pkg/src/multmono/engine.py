"""Incremental determinant engine for hermitian positive-definite matrices.

The n-th LDL* pivot of a hermitian matrix equals the ratio of consecutive
leading principal minors (the squared distance from the n-th Gram vector to
the span of its predecessors), so one factorization pass yields the whole
determinant sequence in O(N^3).  Arithmetic runs on gmpy2 mpfr/mpc at an
explicit working precision; determinants are kept in the log domain.

The exact dense oracle below is deliberately a different algorithm (fresh
fraction-exact Gaussian elimination per leading minor) so engine tests are
not self-referential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Optional

import gmpy2
from gmpy2 import mpc, mpfr, mpq

__all__ = [
    "QC",
    "NotNumericallyPD",
    "DeterminantSequence",
    "incremental_pivots",
    "dense_exact_dets",
]

MAX_ESCALATIONS = 3


class QC:
    """Complex number with exact rational components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, o):
        o = _qc(o)
        return QC(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        o = _qc(o)
        return QC(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        o = _qc(o)
        return QC(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __truediv__(self, o):
        o = _qc(o)
        den = o.re * o.re + o.im * o.im
        return QC((self.re * o.re + self.im * o.im) / den,
                  (self.im * o.re - self.re * o.im) / den)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, o):
        return _qc(o) - self

    def conjugate(self) -> "QC":
        return QC(self.re, -self.im)

    def __eq__(self, o):
        o = _qc(o)
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __repr__(self):
        return f"QC({self.re}, {self.im})"

    def to_mpc(self) -> mpc:
        return mpc(mpfr(mpq(self.re)), mpfr(mpq(self.im)))

    def __complex__(self):
        return complex(float(self.re), float(self.im))


def _qc(x) -> QC:
    if isinstance(x, QC):
        return x
    if isinstance(x, Rational):
        return QC(x, 0)
    if isinstance(x, complex):
        return QC(Fraction(x.real), Fraction(x.imag))
    raise TypeError(f"cannot coerce {x!r} to an exact complex rational")


class NotNumericallyPD(Exception):
    """Pivot stayed non-positive after all precision escalations."""

    def __init__(self, index: int, precision: int, pivot: float):
        self.index = index
        self.precision = precision
        self.pivot = pivot
        super().__init__(
            f"matrix not numerically positive-definite at n={index} "
            f"(pivot {pivot:.3e} at {precision}-bit precision)")


@dataclass(frozen=True)
class DeterminantSequence:
    """Leading-minor determinant sequence in log domain.

    ratios[k] is the k+1-st pivot D_{k+1}/D_k as an mpfr at the working
    precision; log-ratio and log-determinant views are derived from it.
    """

    ratios: tuple
    precision_bits: int
    pivot_floor: float
    kernel_name: str = ""

    @property
    def N(self) -> int:
        return len(self.ratios)

    @property
    def r(self) -> list[float]:
        return [float(x) for x in self.ratios]

    @property
    def ln_r(self) -> list[float]:
        return [float(gmpy2.log(x)) for x in self.ratios]

    def ln_r_mpfr(self) -> list:
        with gmpy2.context(precision=self.precision_bits):
            return [gmpy2.log(x) for x in self.ratios]

    @property
    def ln_D(self) -> list[float]:
        out = []
        with gmpy2.context(precision=max(self.precision_bits, 64)):
            acc = mpfr(0)
            for x in self.ratios:
                acc = acc + gmpy2.log(x)
                out.append(float(acc))
        return out

    def root_trace(self) -> list[float]:
        """D_n^{1/n} for each n."""
        return [math.exp(ld / (k + 1)) for k, ld in enumerate(self.ln_D)]

    def rows(self) -> list[tuple]:
        """(n, ln_D, r, ln_r, precision_bits) rows for the CSV surface."""
        lnD = self.ln_D
        lnr = self.ln_r
        rr = self.r
        return [(n + 1, lnD[n], rr[n], lnr[n], self.precision_bits)
                for n in range(self.N)]


class _PivotSmall(Exception):
    def __init__(self, index, pivot):
        self.index = index
        self.pivot = pivot


def _real(x):
    return x.real if isinstance(x, mpc) else x


def _ldl_pass(entry: Callable[[int, int], object], n: int, threshold) -> tuple[list, float]:
    """One factorization pass at the ambient context precision.

    entry(i, j) is queried for 1 <= j <= i <= n and must return mpfr/mpc
    (or something gmpy2 can combine with them).  Raises _PivotSmall when a
    pivot falls at or below threshold * (largest pivot so far).

    Row recurrence, with c[k] = L[i][k] * d[k] for the row in progress:
        c[j] = A[i][j] - sum_{k<j} c[k] * conj(L[j][k]),   L[i][j] = c[j]/d[j]
        d[i] = A[i][i] - sum_{k<i} c[k] * conj(L[i][k])
    """
    L: list[list] = []
    d: list = []
    maxpiv = None
    floor_ratio = math.inf
    for i in range(n):
        c = [entry(i + 1, j + 1) for j in range(i)]
        Li = []
        for j in range(i):
            acc = c[j]
            for ck, lk in zip(c, L[j]):
                acc = acc - ck * lk.conjugate()
            c[j] = acc
            Li.append(acc / d[j])
        piv = entry(i + 1, i + 1)
        for ck, lk in zip(c, Li):
            piv = piv - ck * lk.conjugate()
        piv = _real(piv)
        if maxpiv is None:
            if piv <= 0:
                raise _PivotSmall(i + 1, float(piv))
            maxpiv = piv
        else:
            if piv <= threshold * maxpiv:
                raise _PivotSmall(i + 1, float(piv))
            if piv > maxpiv:
                maxpiv = piv
        floor_ratio = min(floor_ratio, float(piv / maxpiv))
        d.append(piv)
        L.append(Li)
    return d, floor_ratio


def incremental_pivots(entry_factory: Callable[[], Callable[[int, int], object]],
                       n: int, precision: int = 53, *,
                       kernel_name: str = "") -> DeterminantSequence:
    """Determinant ratio sequence via incremental LDL*.

    entry_factory is called once per attempt and must return an entry
    function whose values are produced at the ambient gmpy2 context (so a
    precision escalation re-evaluates the matrix, not just the arithmetic).
    Escalation doubles the precision at most MAX_ESCALATIONS times when a
    pivot falls under 2^(-precision/2) relative to the running maximum.
    """
    if precision < 53:
        raise ValueError("precision must be at least 53 bits")
    if n < 1:
        raise ValueError("matrix size must be positive")
    prec = precision
    last: Optional[_PivotSmall] = None
    for _ in range(MAX_ESCALATIONS + 1):
        with gmpy2.context(precision=prec):
            entry = entry_factory()
            threshold = mpfr(2) ** (-(prec // 2))
            try:
                d, floor_ratio = _ldl_pass(entry, n, threshold)
                return DeterminantSequence(ratios=tuple(d), precision_bits=prec,
                                           pivot_floor=floor_ratio,
                                           kernel_name=kernel_name)
            except _PivotSmall as exc:
                last = exc
                prec *= 2
    raise NotNumericallyPD(last.index, prec // 2, last.pivot)


# -- exact dense oracle ------------------------------------------------------

def dense_exact_dets(entry_exact: Callable[[int, int], object], nmax: int) -> list[Fraction]:
    """D_1..D_nmax by independent exact Gaussian elimination.

    Each leading minor is eliminated from scratch on a fresh copy, so this
    path shares no code or state with the incremental engine.  Entries may
    be Fraction (real case) or QC; each determinant must come out real.
    """
    full = [[_qc(entry_exact(i + 1, j + 1)) for j in range(nmax)] for i in range(nmax)]
    out = []
    for k in range(1, nmax + 1):
        m = [row[:k] for row in full[:k]]
        det = QC(1)
        sign = 1
        for col in range(k):
            pivot_row = next((r for r in range(col, k) if not m[r][col].is_zero()), None)
            if pivot_row is None:
                det = QC(0)
                break
            if pivot_row != col:
                m[col], m[pivot_row] = m[pivot_row], m[col]
                sign = -sign
            piv = m[col][col]
            det = det * piv
            for r in range(col + 1, k):
                factor = m[r][col] / piv
                if factor.is_zero():
                    continue
                m[r] = [m[r][c] - factor * m[col][c] for c in range(k)]
        if det.im != 0:
            raise ValueError(f"leading minor {k} is not real: {det!r}")
        out.append(sign * det.re if isinstance(det.re, Fraction) else Fraction(sign) * det.re)
    return out
