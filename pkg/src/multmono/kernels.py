"""Kernels on positive rationals and the symbols that generate them.

A hermitian kernel c assigns a complex value to every reduced fraction
num/den with c(den/num) = conj(c(num/den)); the associated matrix has
entry (i, j) = c(i/j).  Every kernel here carries two evaluation paths: an
exact one over rational components (QC; None when the kernel is not
exactly representable) and an approximate one producing gmpy2 values at
the ambient context precision, so precision escalation re-evaluates
entries rather than re-rounding them.

Kernel grammar (CLI flag --kernel):

    hilberdink:sigma=recip          sigma(n) = 1/n
    hilberdink:sigma=cm,s=1.0       completely multiplicative sigma(n) = n^-s
    hilberdink:sigma=table,FILE     prime-power table (CSV: p,k,re,im)
    dfactor:A=powers:2,table=FILE   supported on ratios of A (CSV: ratio,re,im)
    additive:coeffs=2,0.5           additive Toeplitz symbol c0(0), c0(1), ...
    identity                        1 at ratio 1, else 0
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Optional

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .engine import QC
from .primes import factorize
from .sets import IntegerSet, parse_integer_set
from .tabulated import parse_value

__all__ = [
    "KernelGrammarError",
    "KernelRangeError",
    "MultiplicativeSigma",
    "sigma_recip",
    "sigma_cm_power",
    "sigma_cm_table",
    "sigma_prime_power_table",
    "sigma_prime_power_rule",
    "read_sigma_table",
    "FractionKernel",
    "hilberdink_kernel",
    "identity_kernel",
    "direct_factor_kernel",
    "read_ratio_table",
    "AdditiveSymbol",
    "parse_kernel",
]


class KernelGrammarError(ValueError):
    """Raised when a kernel spec string cannot be parsed."""


class KernelRangeError(ValueError):
    def __init__(self, p: int, k: int):
        self.p, self.k = p, k
        super().__init__(f"sigma table has no value at prime power (p={p}, k={k})")


def _to_exact(v) -> Optional[QC]:
    if isinstance(v, QC):
        return v
    if isinstance(v, Rational):
        return QC(v)
    if isinstance(v, complex) and float(v.real).is_integer() and float(v.imag).is_integer():
        return QC(int(v.real), int(v.imag))
    return None


def _to_approx(v):
    if isinstance(v, QC):
        if v.im == 0:
            return mpfr(mpq(v.re))
        return mpc(mpfr(mpq(v.re)), mpfr(mpq(v.im)))
    if isinstance(v, Rational):
        return mpfr(mpq(v))
    if isinstance(v, complex):
        if v.imag == 0:
            return mpfr(v.real)
        return mpc(v)
    return mpfr(v)


@dataclass(frozen=True)
class MultiplicativeSigma:
    """A multiplicative function given on prime powers.

    kind 'recip' is sigma(n) = 1/n; 'cm_power' is n^-s; 'cm_table' stores
    one value per prime (completely multiplicative extension); 'table' and
    'rule' give sigma(p^k) directly.  sigma(1) = 1 always (empty product).
    """

    kind: str
    name: str
    s: Optional[float] = None
    prime_values: Optional[dict] = None
    prime_power_values: Optional[dict] = None
    rule: Optional[Callable[[int, int], object]] = field(default=None, compare=False)

    @property
    def completely_multiplicative(self) -> bool:
        return self.kind in ("recip", "cm_power", "cm_table")

    def _prime_power(self, p: int, k: int):
        if self.kind == "recip":
            return Fraction(1, p**k)
        if self.kind == "cm_power":
            return None  # no exact form in general
        if self.kind == "cm_table":
            if p not in self.prime_values:
                raise KernelRangeError(p, 1)
            v = self.prime_values[p]
            e = _to_exact(v)
            if e is None:
                return None
            out = QC(1)
            for _ in range(k):
                out = out * e
            return out
        if self.kind == "table":
            if (p, k) not in self.prime_power_values:
                raise KernelRangeError(p, k)
            return self.prime_power_values[(p, k)]
        if self.kind == "rule":
            return self.rule(p, k)
        raise ValueError(f"unknown sigma kind {self.kind!r}")

    def exact_value(self, n: int) -> Optional[QC]:
        """sigma(n) with exact rational components, or None."""
        if n == 1:
            return QC(1)
        if self.kind == "recip":
            return QC(Fraction(1, n))
        out = QC(1)
        for p, e in factorize(n):
            v = self._prime_power(p, e)
            v = _to_exact(v) if not isinstance(v, QC) else v
            if v is None:
                return None
            out = out * v
        return out

    def approx_value(self, n: int):
        """sigma(n) as mpfr/mpc at the ambient gmpy2 context."""
        if n == 1:
            return mpfr(1)
        if self.kind == "recip":
            return mpfr(1) / n
        if self.kind == "cm_power":
            return mpfr(n) ** mpfr(-self.s)
        out = mpfr(1)
        for p, e in factorize(n):
            out = out * _to_approx(self._prime_power(p, e))
        return out


def sigma_recip() -> MultiplicativeSigma:
    return MultiplicativeSigma(kind="recip", name="recip")


def sigma_cm_power(s: float) -> MultiplicativeSigma:
    return MultiplicativeSigma(kind="cm_power", name=f"cm,s={s}", s=float(s))


def sigma_cm_table(prime_values: dict, name: str = "cm_table") -> MultiplicativeSigma:
    return MultiplicativeSigma(kind="cm_table", name=name, prime_values=dict(prime_values))


def sigma_prime_power_table(values: dict, name: str = "table") -> MultiplicativeSigma:
    return MultiplicativeSigma(kind="table", name=name, prime_power_values=dict(values))


def sigma_prime_power_rule(rule: Callable[[int, int], object],
                           name: str = "rule") -> MultiplicativeSigma:
    return MultiplicativeSigma(kind="rule", name=name, rule=rule)


def read_sigma_table(path: str) -> MultiplicativeSigma:
    """Load a prime-power sigma table from CSV with header p,k,re,im."""
    values = {}
    with open(path, newline="") as fh:
        rows = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(rows, None)
        if header is None or [h.strip() for h in header] != ["p", "k", "re", "im"]:
            raise KernelGrammarError(f"sigma table {path}: expected header p,k,re,im")
        for row in rows:
            if not row:
                continue
            p, k = int(row[0]), int(row[1])
            re, im = parse_value(row[2]), parse_value(row[3])
            if isinstance(re, Rational) and isinstance(im, Rational):
                values[(p, k)] = QC(re, im)
            else:
                values[(p, k)] = complex(float(re), float(im))
    return sigma_prime_power_table(values, name=f"table:{path}")


@dataclass(frozen=True)
class FractionKernel:
    """A hermitian kernel on reduced positive fractions."""

    name: str
    family: str
    exact_entry: Callable[[int, int], Optional[QC]] = field(compare=False)
    approx_entry: Callable[[int, int], object] = field(compare=False)
    hermitian: bool = True
    sigma: Optional[MultiplicativeSigma] = field(default=None, compare=False)

    def exact(self, num: int, den: int) -> Optional[QC]:
        g = math.gcd(num, den)
        return self.exact_entry(num // g, den // g)

    def approx(self, num: int, den: int):
        g = math.gcd(num, den)
        return self.approx_entry(num // g, den // g)

    def evaluate(self, num: int, den: int) -> complex:
        e = self.exact(num, den)
        if e is not None:
            return complex(e)
        return complex(self.approx(num, den))

    def c1(self) -> float:
        v = self.evaluate(1, 1)
        if v.imag != 0:
            raise ValueError(f"kernel {self.name}: c(1) = {v} is not real")
        return v.real


def hilberdink_kernel(sigma: MultiplicativeSigma) -> FractionKernel:
    """c(i/j) = sigma(i/gcd) * conj(sigma(j/gcd)); hermitian by construction."""

    def exact_entry(u, v):
        su = sigma.exact_value(u)
        if su is None:
            return None
        sv = sigma.exact_value(v)
        if sv is None:
            return None
        return su * sv.conjugate()

    def approx_entry(u, v):
        return sigma.approx_value(u) * sigma.approx_value(v).conjugate()

    return FractionKernel(name=f"hilberdink:sigma={sigma.name}", family="hilberdink",
                          exact_entry=exact_entry, approx_entry=approx_entry,
                          sigma=sigma)


def identity_kernel() -> FractionKernel:
    def exact_entry(u, v):
        return QC(1) if u == v else QC(0)

    def approx_entry(u, v):
        return mpfr(1) if u == v else mpfr(0)

    return FractionKernel(name="identity", family="identity",
                          exact_entry=exact_entry, approx_entry=approx_entry)


def read_ratio_table(path: str) -> dict:
    """Load kernel values keyed by reduced ratio from CSV: ratio,re,im."""
    table = {}
    with open(path, newline="") as fh:
        rows = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(rows, None)
        if header is None or [h.strip() for h in header] != ["ratio", "re", "im"]:
            raise KernelGrammarError(f"ratio table {path}: expected header ratio,re,im")
        for row in rows:
            if not row:
                continue
            if "/" in row[0]:
                num, den = (int(t) for t in row[0].split("/"))
            else:
                num, den = int(row[0]), 1
            g = math.gcd(num, den)
            re, im = parse_value(row[1]), parse_value(row[2])
            if isinstance(re, Rational) and isinstance(im, Rational):
                table[(num // g, den // g)] = QC(re, im)
            else:
                table[(num // g, den // g)] = complex(float(re), float(im))
    return table


def _conj_value(v):
    if isinstance(v, QC):
        return v.conjugate()
    return v.conjugate() if isinstance(v, complex) else v


def direct_factor_kernel(A: IntegerSet, table: dict,
                         name: Optional[str] = None) -> FractionKernel:
    """Kernel supported on ratios a/a' of members of A, zero elsewhere.

    The table is mirrored to enforce hermitian symmetry; inconsistent
    mirror values are rejected.
    """
    full = {}
    for (num, den), v in table.items():
        full[(num, den)] = v
        mirror = _conj_value(v)
        if (den, num) in table:
            existing = table[(den, num)]
            if complex(existing) != complex(mirror):
                raise ValueError(
                    f"table not hermitian at {num}/{den}: {existing!r} vs conj {v!r}")
        else:
            full[(den, num)] = mirror
    v1 = full.get((1, 1), QC(0))
    if complex(v1).imag != 0:
        raise ValueError("c(1) must be real")

    def exact_entry(u, v):
        val = full.get((u, v))
        if val is None:
            return QC(0)
        return val if isinstance(val, QC) else _to_exact(val)

    def approx_entry(u, v):
        val = full.get((u, v))
        if val is None:
            return mpfr(0)
        return _to_approx(val)

    return FractionKernel(name=name or f"dfactor:A={A.name}", family="direct_factor",
                          exact_entry=exact_entry, approx_entry=approx_entry)


@dataclass(frozen=True)
class AdditiveSymbol:
    """Hermitian symbol on the integers: c0(-m) = conj(c0(m))."""

    coeffs: tuple  # c0(0), c0(1), ... ; values beyond the list are 0
    name: str = "additive"

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("additive symbol needs at least c0(0)")
        v0 = self.coeffs[0]
        if complex(v0).imag != 0:
            raise ValueError("c0(0) must be real for a hermitian symbol")

    def value(self, m: int):
        a = abs(m)
        if a >= len(self.coeffs):
            return 0
        v = self.coeffs[a]
        return _conj_value(v) if m < 0 else v

    def exact_value(self, m: int) -> Optional[QC]:
        return _to_exact(self.value(m))

    def approx_value(self, m: int):
        return _to_approx(self.value(m))


def _parse_params(rest: str) -> list[str]:
    return [t.strip() for t in rest.split(",")] if rest else []


def parse_kernel(text: str):
    """Parse a kernel spec string into a FractionKernel or AdditiveSymbol.

    Raises KernelGrammarError naming the offending token.
    """
    head, _, rest = text.partition(":")
    head = head.strip()
    if head == "identity":
        if rest:
            raise KernelGrammarError(f"identity kernel takes no parameters, got {rest!r}")
        return identity_kernel()
    if head == "hilberdink":
        toks = _parse_params(rest)
        if not toks or not toks[0].startswith("sigma="):
            raise KernelGrammarError(f"hilberdink kernel needs sigma=..., got {rest!r}")
        which = toks[0][len("sigma="):]
        if which == "recip":
            return hilberdink_kernel(sigma_recip())
        if which == "cm":
            s = None
            for t in toks[1:]:
                if t.startswith("s="):
                    try:
                        s = float(t[2:])
                    except ValueError:
                        raise KernelGrammarError(f"bad exponent {t!r}") from None
                else:
                    raise KernelGrammarError(f"unknown hilberdink parameter {t!r}")
            if s is None:
                raise KernelGrammarError("sigma=cm requires s=<exponent>")
            return hilberdink_kernel(sigma_cm_power(s))
        if which == "table":
            if len(toks) != 2:
                raise KernelGrammarError("sigma=table requires a file: sigma=table,FILE")
            return hilberdink_kernel(read_sigma_table(toks[1]))
        raise KernelGrammarError(f"unknown sigma family {which!r}")
    if head == "dfactor":
        toks = _parse_params(rest)
        A = None
        table = None
        i = 0
        while i < len(toks):
            t = toks[i]
            if t.startswith("A="):
                spec = t[2:]
                # set specs may themselves contain a comma-free colon form
                A = parse_integer_set(spec)
            elif t.startswith("table="):
                table = read_ratio_table(t[len("table="):])
            else:
                raise KernelGrammarError(f"unknown dfactor parameter {t!r}")
            i += 1
        if A is None or table is None:
            raise KernelGrammarError("dfactor kernel needs A=<set> and table=<file>")
        return direct_factor_kernel(A, table)
    if head == "additive":
        toks = _parse_params(rest)
        if not toks or not toks[0].startswith("coeffs="):
            raise KernelGrammarError(f"additive kernel needs coeffs=..., got {rest!r}")
        raw = [toks[0][len("coeffs="):]] + toks[1:]
        coeffs = []
        for t in raw:
            v = parse_value(t)
            coeffs.append(Fraction(v) if isinstance(v, Rational) else float(v))
        return AdditiveSymbol(tuple(coeffs), name=f"additive:coeffs={','.join(raw)}")
    raise KernelGrammarError(f"unknown kernel family {head!r}")
