"""Determinant sequences of hermitian multiplicative and additive Toeplitz
matrices: engine front ends, ratio monotonicity, the logarithmic-mean
summary, the per-prime product formula, the completely-multiplicative
limit, direct-factor block structure, and the classical-symbol baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpfr
from scipy.integrate import quad

from .arith import MonotoneVerdict, is_mult_monotone
from .engine import (DeterminantSequence, NotNumericallyPD, QC,
                     dense_exact_dets, incremental_pivots)
from .factors import make_pair
from .intervals import INF, Interval
from .kernels import (AdditiveSymbol, FractionKernel, MultiplicativeSigma,
                      direct_factor_kernel, hilberdink_kernel)
from .primes import primes_upto
from .sets import IntegerSet
from .tabulated import FLOAT, TabulatedFunction

__all__ = [
    "build_multiplicative_matrix",
    "incremental_cholesky_dets",
    "additive_toeplitz_dets",
    "exact_minor_dets",
    "exact_additive_minor_dets",
    "check_ratio_mult_monotone",
    "Prop29Report",
    "prop29_summary",
    "KernelNotPDAtPrime",
    "hilberdink_product_formula",
    "hilberdink_product_formula_exact",
    "CmLimitResult",
    "cm_limit",
    "Prop30Report",
    "prop30_factorization_check",
    "SzegoResult",
    "szego_symbol_tools",
    "scale_kernel",
]


def build_multiplicative_matrix(kernel: FractionKernel, n: int, exact: bool = False):
    """Materialize the n x n matrix with entry (i, j) = c(i/j).

    The lower triangle is the conjugate of the upper by construction.  With
    exact=True returns nested lists of QC (fails if the kernel has no exact
    path); otherwise a numpy complex array.
    """
    if not kernel.hermitian:
        raise ValueError(f"kernel {kernel.name} is not hermitian")
    if exact:
        rows = [[None] * n for _ in range(n)]
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                v = kernel.exact(i, j)
                if v is None:
                    raise ValueError(f"kernel {kernel.name} has no exact value at {i}/{j}")
                rows[i - 1][j - 1] = v
                rows[j - 1][i - 1] = v.conjugate()
        return rows
    m = np.zeros((n, n), dtype=complex)
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            v = kernel.evaluate(i, j)
            m[i - 1, j - 1] = v
            m[j - 1, i - 1] = v.conjugate()
    return m


def incremental_cholesky_dets(kernel: FractionKernel, N: int,
                              precision: int = 53) -> DeterminantSequence:
    """Determinant ratio sequence of the multiplicative matrix of a kernel."""
    if not kernel.hermitian:
        raise ValueError(f"kernel {kernel.name} is not hermitian")

    def factory():
        return lambda i, j: kernel.approx(i, j)

    return incremental_pivots(factory, N, precision, kernel_name=kernel.name)


def additive_toeplitz_dets(symbol: AdditiveSymbol, N: int,
                           precision: int = 53) -> DeterminantSequence:
    """Determinant ratio sequence of the additive Toeplitz matrix c0(i-j)."""

    def factory():
        cache = {}

        def entry(i, j):
            m = i - j
            if m not in cache:
                cache[m] = symbol.approx_value(m)
            return cache[m]

        return entry

    return incremental_pivots(factory, N, precision, kernel_name=symbol.name)


def exact_minor_dets(kernel: FractionKernel, n: int) -> list[Fraction]:
    """Leading minors D_1..D_n by the exact dense oracle (rational kernels)."""

    def entry(i, j):
        v = kernel.exact(i, j)
        if v is None:
            raise ValueError(f"kernel {kernel.name} has no exact path at {i}/{j}")
        return v

    return dense_exact_dets(entry, n)


def exact_additive_minor_dets(symbol: AdditiveSymbol, n: int) -> list[Fraction]:
    def entry(i, j):
        v = symbol.exact_value(i - j)
        if v is None:
            raise ValueError(f"symbol {symbol.name} has no exact path at {i - j}")
        return v

    return dense_exact_dets(entry, n)


def check_ratio_mult_monotone(seq: DeterminantSequence) -> MonotoneVerdict:
    """Divisibility monotonicity of the ratio sequence: k | n should force
    r_n <= r_k.  Runs the arith-core check on -ln(r_n) at the sequence's
    working precision."""
    with gmpy2.context(precision=seq.precision_bits):
        vals = [-gmpy2.log(x) for x in seq.ratios]
    table = TabulatedFunction(vals, FLOAT, precision_bits=seq.precision_bits)
    return is_mult_monotone(table, "increasing")


@dataclass(frozen=True)
class Prop29Report:
    N: int
    alpha_proxy: float
    exp_alpha_proxy: float
    ln_c1: float
    bound_ok: bool
    logmean_trace: list  # (M, logmean at M) at sample sizes
    root_trace: list  # (M, D_M^(1/M)) over the last decade
    root_max: float

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "alpha_proxy": self.alpha_proxy,
            "exp_alpha_proxy": self.exp_alpha_proxy,
            "ln_c1": self.ln_c1,
            "bound_ok": self.bound_ok,
            "logmean_trace": [{"M": m, "value": v} for m, v in self.logmean_trace],
            "root_trace": [{"M": m, "value": v} for m, v in self.root_trace],
            "root_max": self.root_max,
        }


def prop29_summary(seq: DeterminantSequence, tolerance: float = 1e-9) -> Prop29Report:
    """Finite-N diagnostics for the logarithmic mean of the log-ratios.

    alpha_proxy is (1/ln N) * sum_{k<=N} (1/k) ln r_k; the root trace keeps
    D_M^(1/M) over the last decade M in (N/10, N].  bound_ok records the
    alpha_proxy <= ln c(1) + tolerance comparison (exact for kernels with
    c(1) = 1, where every term is nonpositive).
    """
    N = seq.N
    if N < 2:
        raise ValueError("need N >= 2 for a logarithmic mean")
    lnr = seq.ln_r
    csum = 0.0
    logmean = {}
    for k in range(1, N + 1):
        csum += lnr[k - 1] / k
        logmean[k] = csum / math.log(k) if k > 1 else math.nan
    samples = sorted({2 ** e for e in range(1, N.bit_length()) if 2 ** e <= N} | {N})
    lnD = seq.ln_D
    roots = [(m, math.exp(lnD[m - 1] / m)) for m in range(max(2, N // 10 + 1), N + 1)]
    alpha = logmean[N]
    ln_c1 = lnr[0]
    return Prop29Report(
        N=N,
        alpha_proxy=alpha,
        exp_alpha_proxy=math.exp(alpha),
        ln_c1=ln_c1,
        bound_ok=alpha <= ln_c1 + tolerance,
        logmean_trace=[(m, logmean[m]) for m in samples],
        root_trace=roots,
        root_max=max(v for _, v in roots),
    )


class KernelNotPDAtPrime(Exception):
    def __init__(self, p: int, k: int):
        self.p, self.k = p, k
        super().__init__(f"kernel not positive-definite at prime p={p}, level k={k}")


def _prime_levels(n: int, p: int) -> int:
    k = 0
    q = p
    while q <= n:
        k += 1
        q *= p
    return k


def hilberdink_product_formula(sigma: MultiplicativeSigma, n: int,
                               precision: int = 53) -> float:
    """ln D_n from the per-prime factorization.

    For each prime p <= n the kernel restricted to powers of p is an
    additive Toeplitz matrix with symbol m -> sigma(p^m) (conjugated for
    m < 0); its pivots rho_k feed the double product
    prod_p prod_k (rho_{k+1}/rho_k)^floor(n/p^k).  The matrix of the full
    kernel is never materialized.
    """
    if n < 1:
        raise ValueError("n must be positive")
    total = 0.0
    kernel = hilberdink_kernel(sigma)
    for p in primes_upto(n):
        K = _prime_levels(n, p)

        def factory(p=p):
            cache = {}

            def entry(i, j):
                m = i - j
                if m not in cache:
                    cache[m] = kernel.approx(p ** m, 1) if m >= 0 else kernel.approx(1, p ** (-m))
                return cache[m]

            return entry

        try:
            sub = incremental_pivots(factory, K + 1, precision,
                                     kernel_name=f"{kernel.name}|p={p}")
        except NotNumericallyPD as exc:
            raise KernelNotPDAtPrime(p, exc.index) from None
        lnrho = sub.ln_r
        q = p
        for k in range(1, K + 1):
            total += (n // q) * (lnrho[k] - lnrho[k - 1])
            q *= p
    return total


def hilberdink_product_formula_exact(sigma: MultiplicativeSigma, n: int) -> Fraction:
    """D_n exactly, via exact per-prime Toeplitz determinants."""
    D = Fraction(1)
    for p in primes_upto(n):
        K = _prime_levels(n, p)

        def entry(i, j, p=p):
            m = i - j
            v = sigma.exact_value(p ** abs(m))
            if v is None:
                raise ValueError(f"sigma {sigma.name} has no exact value at {p}^{abs(m)}")
            return v.conjugate() if m < 0 else v

        dets = dense_exact_dets(entry, K + 1)
        for k in range(1, K + 1):
            if dets[k - 1] <= 0 or dets[k] <= 0:
                raise KernelNotPDAtPrime(p, k)
        rho = [dets[0]] + [dets[k] / dets[k - 1] for k in range(1, K + 1)]
        q = p
        for k in range(1, K + 1):
            D *= (rho[k] / rho[k - 1]) ** (n // q)
            q *= p
    return D


@dataclass(frozen=True)
class CmLimitResult:
    interval: Interval
    P: int
    tail_bound: float  # on the log scale; inf when no usable envelope
    heuristic: bool
    divergent_evidence: bool

    def to_json(self) -> dict:
        return {"interval": self.interval.to_json(), "P": self.P,
                "tail_bound": self.tail_bound, "heuristic": self.heuristic,
                "divergent_evidence": self.divergent_evidence}


def cm_limit(sigma: MultiplicativeSigma, P: int,
             decay: Optional[tuple[float, float]] = None,
             precision: int = 96) -> CmLimitResult:
    """Enclose prod_p (1 - |sigma(p)|^2)^(1/p) for completely
    multiplicative sigma with |sigma(p)| < 1.

    `decay` = (C, theta) asserts |sigma(p)| <= C * p^-theta beyond P and
    yields a rigorous tail bound; for the built-in power families it is
    derived automatically.  Without any envelope the tail is a flagged
    last-decade extrapolation.  A tail bound of +inf (theta <= 0, or the
    envelope not yet below 1) gives the divergence-evidence interval
    [0, exp(truncated log-sum)].
    """
    if not sigma.completely_multiplicative:
        raise ValueError("cm_limit requires a completely multiplicative sigma")
    if decay is None:
        if sigma.kind == "recip":
            decay = (1.0, 1.0)
        elif sigma.kind == "cm_power" and sigma.s > 0:
            decay = (1.0, sigma.s)
    heuristic = False
    plist = primes_upto(P)
    with gmpy2.context(precision=precision):
        lnL = mpfr(0)
        last_decade = mpfr(0)
        for p in plist:
            v = sigma.approx_value(p)
            a2 = gmpy2.norm(v) if not isinstance(v, mpfr) else v * v
            if a2 >= 1:
                raise ValueError(f"|sigma({p})| >= 1: matrices are not positive-definite")
            term = gmpy2.log(1 - a2) / p
            lnL += term
            if p > P // 10:
                last_decade += term
        lnL_f = float(lnL)
        ld = abs(float(last_decade))
    if decay is not None:
        C, theta = decay
        xcap = C * C * float(P) ** (-2 * theta)
        if theta <= 0 or xcap >= 1:
            tail = INF
        else:
            tail = (1.0 / (1.0 - xcap)) * C * C * float(P) ** (-2 * theta) / (2 * theta)
    else:
        heuristic = True
        tail = 2.0 * ld
    slop = 1e-20 * max(1.0, abs(lnL_f))
    divergent = tail == INF
    lo = 0.0 if divergent else math.exp(lnL_f - tail - slop)
    hi = math.exp(lnL_f + slop)
    return CmLimitResult(interval=Interval(lo, hi), P=P, tail_bound=float(tail),
                         heuristic=heuristic, divergent_evidence=divergent)


@dataclass(frozen=True)
class Prop30Report:
    N: int
    orthogonality_ok: bool
    worst_block_log_discrepancy: float
    worst_ratio_log_discrepancy: float
    blocks_checked: int

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "orthogonality_ok": self.orthogonality_ok,
            "worst_block_log_discrepancy": self.worst_block_log_discrepancy,
            "worst_ratio_log_discrepancy": self.worst_ratio_log_discrepancy,
            "blocks_checked": self.blocks_checked,
        }


def prop30_factorization_check(A: IntegerSet, B: IntegerSet, table: dict, N: int,
                               precision: int = 53) -> Prop30Report:
    """Check the block structure of a kernel supported on ratios of a
    multiplication-closed direct factor A.

    (i) entries (i, j) must vanish whenever the B-parts of i and j differ
    (support leakage is an error); (ii) ln D_n must equal the sum over
    b in B, b <= n of the log-Gram of the A-block of size #(A cap [1, n/b]);
    (iii) the ratio r_n must equal r_alpha where n = alpha*beta.
    """
    pair = make_pair(A, B, N)
    members = A.members_upto(N)
    mset = set(members)
    for a in members:
        for a2 in members:
            if a * a2 <= N and a * a2 not in mset:
                raise ValueError(f"A={A.name} is not multiplication-closed: "
                                 f"{a}*{a2} not a member")
    kernel = direct_factor_kernel(A, table)
    for (num, den) in table:
        if not _in_ratio_set(num, den, A, members):
            raise ValueError(f"support leakage: table ratio {num}/{den} is not a "
                             f"ratio of members of A={A.name}")
    # (i) orthogonality between different B-blocks
    ok = True
    bpart = [None] + [n // int(pair.a_part[n]) for n in range(1, N + 1)]
    for i in range(1, N + 1):
        for j in range(1, i):
            if bpart[i] != bpart[j] and kernel.evaluate(i, j) != 0:
                ok = False
    # (ii) block identity against the engine
    seq = incremental_cholesky_dets(kernel, N, precision)
    lnD = seq.ln_D
    block = incremental_pivots(
        lambda: (lambda i, j: kernel.approx(members[i - 1], members[j - 1])),
        len(members), precision, kernel_name=f"{kernel.name}|A-block")
    g = [0.0]
    acc = 0.0
    for x in block.ln_r:
        acc += x
        g.append(acc)  # g[m] = ln Gram of the first m members of A
    b_ind = B.indicator_upto(N)
    counts = np.zeros(N + 1, dtype=np.int64)  # counts[x] = #(A cap [1, x])
    for a in members:
        counts[a:] += 1
    worst_block = 0.0
    for n in range(1, N + 1):
        pred = 0.0
        for b in np.nonzero(b_ind[: n + 1])[0]:
            pred += g[counts[n // b]]
        worst_block = max(worst_block, abs(pred - lnD[n - 1]))
    # (iii) ratio identity r_n = r_alpha
    lnr = seq.ln_r
    worst_ratio = 0.0
    for n in range(1, N + 1):
        alpha = int(pair.a_part[n])
        worst_ratio = max(worst_ratio, abs(lnr[n - 1] - lnr[alpha - 1]))
    return Prop30Report(N=N, orthogonality_ok=ok,
                        worst_block_log_discrepancy=worst_block,
                        worst_ratio_log_discrepancy=worst_ratio,
                        blocks_checked=int(b_ind[: N + 1].sum()))


def _in_ratio_set(num: int, den: int, A: IntegerSet, members: list[int]) -> bool:
    if A.member(num) and A.member(den):
        return True
    for t in members:
        if A.member(num * t) and A.member(den * t):
            return True
    return False


@dataclass(frozen=True)
class SzegoResult:
    symbol: AdditiveSymbol
    geometric_mean: Optional[float]  # None when min f is not strictly positive
    quad_error: Optional[float]
    min_f: float
    max_f: float

    def to_json(self) -> dict:
        return {
            "coeffs": [[complex(c).real, complex(c).imag] for c in self.symbol.coeffs],
            "geometric_mean": self.geometric_mean,
            "quad_error": self.quad_error,
            "min_f": self.min_f,
            "max_f": self.max_f,
        }


def szego_symbol_tools(coeffs: Sequence, samples: int = 8192) -> SzegoResult:
    """Package trigonometric-polynomial coefficients as an additive symbol
    and compute the geometric mean exp(integral of ln f) by adaptive
    quadrature.

    f(t) = c0 + 2 * sum_k Re(c_k e^{2 pi i k t}) must be nonnegative
    (checked by dense sampling; genuinely negative f is rejected); the
    geometric mean is only reported when min f is strictly positive.
    """
    symbol = AdditiveSymbol(tuple(coeffs), name="szego")
    cs = [complex(c) for c in symbol.coeffs]

    def f(t):
        out = cs[0].real
        for k in range(1, len(cs)):
            out += 2 * (cs[k].real * math.cos(2 * math.pi * k * t)
                        - cs[k].imag * math.sin(2 * math.pi * k * t))
        return out

    ts = np.arange(samples) / samples
    vals = np.array([f(t) for t in ts])
    fmin, fmax = float(vals.min()), float(vals.max())
    if fmin < -1e-12 * max(1.0, abs(fmax)):
        raise ValueError(f"symbol is negative: min f = {fmin:.6g}")
    if fmin <= 1e-12 * max(1.0, abs(fmax)):
        return SzegoResult(symbol=symbol, geometric_mean=None, quad_error=None,
                           min_f=fmin, max_f=fmax)
    integral, err = quad(lambda t: math.log(f(t)), 0.0, 1.0, limit=200)
    return SzegoResult(symbol=symbol, geometric_mean=math.exp(integral),
                       quad_error=err, min_f=fmin, max_f=fmax)


def scale_kernel(kernel: FractionKernel, factor) -> FractionKernel:
    """The kernel factor * c; positive real factors preserve hermiticity."""
    if factor <= 0:
        raise ValueError("scale factor must be positive")
    exact_factor = QC(factor) if isinstance(factor, (int, Fraction)) else None

    def exact_entry(u, v):
        if exact_factor is None:
            return None
        base = kernel.exact_entry(u, v)
        return None if base is None else exact_factor * base

    def approx_entry(u, v):
        f = mpfr(gmpy2.mpq(factor)) if isinstance(factor, (int, Fraction)) else mpfr(factor)
        return f * kernel.approx_entry(u, v)

    return FractionKernel(name=f"{factor}*{kernel.name}", family=kernel.family,
                          exact_entry=exact_entry, approx_entry=approx_entry)
