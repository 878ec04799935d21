"""Tabulated arithmetic functions on 1..N.

Exact-rational mode (ints and Fractions) is the default; float mode exists
for interoperating with determinant-ratio sequences and records the working
precision in bits so monotonicity tolerances can be derived from it.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Sequence

import numpy as np

EXACT = "exact"
FLOAT = "float"


class TabulatedFunction:
    """Values of an arithmetic function on 1..N, immutable once built."""

    __slots__ = ("values", "mode", "precision_bits")

    def __init__(self, values: Sequence, mode: str = EXACT, precision_bits: int = 53):
        values = tuple(values)
        if not values:
            raise ValueError("empty tabulation")
        if mode == EXACT:
            for v in values:
                if not isinstance(v, Rational):
                    raise ValueError(f"non-rational value {v!r} in exact mode")
        elif mode != FLOAT:
            raise ValueError(f"unknown value mode {mode!r}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "precision_bits", int(precision_bits))

    def __setattr__(self, name, value):
        raise AttributeError("TabulatedFunction is immutable")

    @property
    def limit_N(self) -> int:
        return len(self.values)

    def __call__(self, n: int):
        if not 1 <= n <= self.limit_N:
            raise IndexError(f"n={n} outside tabulation range 1..{self.limit_N}")
        return self.values[n - 1]

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        return isinstance(other, TabulatedFunction) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    @classmethod
    def from_callable(cls, f: Callable[[int], object], N: int, mode: str = EXACT,
                      precision_bits: int = 53) -> "TabulatedFunction":
        return cls([f(n) for n in range(1, N + 1)], mode, precision_bits)

    @classmethod
    def auto(cls, values: Sequence, precision_bits: int = 53) -> "TabulatedFunction":
        """Exact mode when every value is rational, float mode otherwise."""
        values = list(values)
        mode = EXACT if all(isinstance(v, Rational) for v in values) else FLOAT
        return cls(values, mode, precision_bits)

    @classmethod
    def constant(cls, c, N: int) -> "TabulatedFunction":
        mode = EXACT if isinstance(c, Rational) else FLOAT
        return cls([c] * N, mode)

    def to_float_array(self) -> np.ndarray:
        """float64 array a with a[n] = f(n) for n = 1..N; a[0] = 0."""
        a = np.zeros(self.limit_N + 1, dtype=np.float64)
        a[1:] = [float(v) for v in self.values]
        return a

    # -- CSV round trip: header `n,value`, exact rationals as `p/q` --

    def to_csv(self, stream: io.TextIOBase) -> None:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(["n", "value"])
        for n, v in enumerate(self.values, start=1):
            w.writerow([n, format_value(v)])

    @classmethod
    def from_csv(cls, stream: Iterable[str]) -> "TabulatedFunction":
        rows = csv.reader(line for line in stream if not line.startswith("#"))
        header = next(rows)
        if [h.strip() for h in header] != ["n", "value"]:
            raise ValueError(f"bad tabulation header {header!r}")
        values = []
        expect = 1
        exact = True
        for row in rows:
            if not row:
                continue
            if int(row[0]) != expect:
                raise ValueError(f"non-contiguous row index {row[0]} (wanted {expect})")
            v = parse_value(row[1])
            exact = exact and isinstance(v, Rational)
            values.append(v)
            expect += 1
        return cls(values, EXACT if exact else FLOAT)


def format_value(v) -> str:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def read_csv_artifact(stream: Iterable[str]) -> dict:
    """Parse any emitted CSV artifact: leading # comments, a header row,
    and typed cells (int, rational, float, or raw string)."""
    comments = []
    rows = []
    header = None
    for record in csv.reader(stream):
        if not record:
            continue
        if record[0].startswith("#"):
            comments.append(",".join(record))
            continue
        if header is None:
            header = record
            continue
        rows.append([_typed(cell) for cell in record])
    if header is None:
        raise ValueError("artifact has no header row")
    return {"comments": comments, "columns": header, "rows": rows}


def _typed(cell: str):
    cell = cell.strip()
    try:
        return parse_value(cell)
    except (ValueError, ZeroDivisionError):
        return cell


def parse_value(s: str):
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    try:
        return int(s)
    except ValueError:
        return float(s)
