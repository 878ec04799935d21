"""Command-line front end.

One subcommand per report family; every invocation writes exactly one
artifact (CSV or JSON) to stdout or --out, embedding its full normalized
configuration for provenance.  Identical configurations produce
byte-identical output; figures are rendered only on --plot and never
change the delimited artifact.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import plotting
from .arith import bougaief_derivative, is_mult_monotone
from .factors import esv_density, make_pair
from .kernels import (AdditiveSymbol, FractionKernel, KernelGrammarError,
                      parse_kernel, read_ratio_table)
from .means import alpha_limit_estimate
from .sets import SetSpecError, complement_set, parse_integer_set
from .tabulated import TabulatedFunction, format_value
from .toeplitz import (additive_toeplitz_dets, hilberdink_product_formula,
                       incremental_cholesky_dets, prop29_summary,
                       prop30_factorization_check, szego_symbol_tools)

PROG = "multmono"


class UsageError(Exception):
    """Configuration is syntactically valid but semantically unusable."""


@dataclass
class CommandConfig:
    subcommand: str
    options: argparse.Namespace

    def normalized(self) -> dict:
        out = {"subcommand": self.subcommand}
        for key, value in sorted(vars(self.options).items()):
            if key in ("func", "plot", "out") or value is None:
                continue
            key = key.rstrip("_")
            if isinstance(value, (FractionKernel, AdditiveSymbol)):
                out[key] = value.name
            elif hasattr(value, "name") and not isinstance(value, str):
                out[key] = value.name
            elif isinstance(value, tuple):
                out[key] = ",".join(str(v) for v in value)
            else:
                out[key] = value
        return out

    def header_comment(self) -> str:
        kv = self.normalized()
        parts = [f"{k}={kv[k]}" for k in sorted(kv) if k != "subcommand"]
        return f"# {PROG} {self.subcommand} " + " ".join(parts)


def _positive_int(tok: str) -> int:
    try:
        v = int(float(tok))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {tok!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"bound must be positive, got {tok!r}")
    return v


def _precision(tok: str) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {tok!r}") from None
    if v < 53:
        raise argparse.ArgumentTypeError(f"precision must be >= 53 bits, got {v}")
    return v


def _int_grid(tok: str) -> tuple:
    try:
        return tuple(int(float(t)) for t in tok.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {tok!r}") from None


def _float_grid(tok: str) -> tuple:
    try:
        return tuple(float(t) for t in tok.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {tok!r}") from None


def _set_spec(tok: str):
    try:
        return parse_integer_set(tok)
    except SetSpecError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _kernel_spec(tok: str):
    try:
        return parse_kernel(tok)
    except (KernelGrammarError, SetSpecError, OSError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _coeffs(tok: str) -> tuple:
    out = []
    for t in tok.split(","):
        try:
            if "/" in t:
                out.append(Fraction(t))
            else:
                out.append(float(t) if ("." in t or "e" in t.lower()) else Fraction(int(t)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad coefficient {t!r}") from None
    return tuple(out)


GRAMMAR_EPILOG = """\
set mini-grammar (--set / --A / --B):
  powers:2 | squares | squarefree | friable:Y | sifted:Y | list:2,3,5 | multiples:2,3

kernel mini-grammar (--kernel):
  hilberdink:sigma=recip            sigma(n) = 1/n
  hilberdink:sigma=cm,s=1.0         sigma(n) = n^-s (completely multiplicative)
  hilberdink:sigma=table,FILE       prime-power table CSV (header p,k,re,im)
  dfactor:A=powers:2,table=FILE     ratio-supported kernel CSV (header ratio,re,im)
  additive:coeffs=2,0.5             additive Toeplitz symbol c0(0), c0(1), ...
  identity                          1 at ratio 1, else 0
"""


def parse_args(argv) -> CommandConfig:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="multiplicative monotonicity, direct-factor densities, "
                    "and multiplicative Toeplitz determinants",
        epilog=GRAMMAR_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, fmt_default):
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
        p.add_argument("--plot", default=None, help="render a figure to this path")

    p = sub.add_parser("derive", help="Mobius-convolution derivative of a set indicator")
    p.add_argument("--set", dest="set_", type=_set_spec, required=True, metavar="SPEC")
    p.add_argument("--n", type=_positive_int, default=100)
    common(p, "csv")

    p = sub.add_parser("monotone", help="divisibility-monotonicity check")
    p.add_argument("--set", dest="set_", type=_set_spec, metavar="SPEC")
    p.add_argument("--table", default=None, help="tabulation CSV (n,value)")
    p.add_argument("--n", type=_positive_int, default=1000)
    p.add_argument("--direction", choices=("increasing", "decreasing"),
                   default="increasing")
    common(p, "json")

    p = sub.add_parser("density", help="direct-factor counting density vs prediction")
    p.add_argument("--A", dest="A", type=_set_spec, required=True, metavar="SPEC")
    p.add_argument("--B", dest="B", type=_set_spec, default=None, metavar="SPEC")
    p.add_argument("--xgrid", type=_int_grid, default=(10**3, 10**4, 10**5, 10**6))
    p.add_argument("--verify-n", type=_positive_int, default=10**4)
    p.add_argument("--tail-bound", type=float, default=None,
                   help="proven bound on the reciprocal-sum tail of A "
                        "(otherwise a flagged heuristic is used for general sets)")
    common(p, "csv")

    p = sub.add_parser("alpha", help="logarithmic mean value report")
    p.add_argument("--set", dest="set_", type=_set_spec, required=True, metavar="SPEC")
    p.add_argument("--ygrid", type=_float_grid, default=(2, 3, 5, 7, 11, 13))
    p.add_argument("--xgrid", type=_int_grid, default=(10**3, 10**4, 10**5, 10**6))
    p.add_argument("--ncheck", type=_positive_int, default=1000)
    common(p, "json")

    p = sub.add_parser("det", help="determinant ratio sequence of a kernel")
    p.add_argument("--kernel", type=_kernel_spec, required=True, metavar="SPEC")
    p.add_argument("--n", type=_positive_int, default=64)
    p.add_argument("--precision", type=_precision, default=53)
    common(p, "csv")

    p = sub.add_parser("product", help="per-prime product formula vs the engine")
    p.add_argument("--kernel", type=_kernel_spec, required=True, metavar="SPEC")
    p.add_argument("--n", type=_positive_int, default=64)
    p.add_argument("--precision", type=_precision, default=53)
    p.add_argument("--no-compare", action="store_true",
                   help="skip the Cholesky cross-check columns")
    common(p, "csv")

    p = sub.add_parser("prop29", help="logarithmic-mean summary of the ratio sequence")
    p.add_argument("--kernel", type=_kernel_spec, required=True, metavar="SPEC")
    p.add_argument("--n", type=_positive_int, default=100)
    p.add_argument("--precision", type=_precision, default=53)
    common(p, "json")

    p = sub.add_parser("prop30", help="direct-factor block structure checks")
    p.add_argument("--A", dest="A", type=_set_spec, required=True, metavar="SPEC")
    p.add_argument("--B", dest="B", type=_set_spec, default=None, metavar="SPEC")
    p.add_argument("--table", required=True, help="ratio table CSV (ratio,re,im)")
    p.add_argument("--n", type=_positive_int, default=64)
    p.add_argument("--precision", type=_precision, default=53)
    common(p, "json")

    p = sub.add_parser("szego", help="trig-polynomial symbol tools and baseline")
    p.add_argument("--coeffs", type=_coeffs, required=True, metavar="C0,C1,...")
    p.add_argument("--n", type=_positive_int, default=None,
                   help="also compute the additive determinant trace to n")
    p.add_argument("--precision", type=_precision, default=53)
    common(p, "json")

    ns = parser.parse_args(argv)
    return CommandConfig(subcommand=ns.subcommand, options=ns)


def _emit(text: str, out_path) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _csv_text(config: CommandConfig, header: list[str], rows: list) -> str:
    buf = io.StringIO()
    buf.write(config.header_comment() + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(c) for c in row])
    return buf.getvalue()


def _cell(c) -> str:
    if isinstance(c, bool):
        return str(int(c))
    if isinstance(c, float):
        return repr(c)
    if isinstance(c, Fraction):
        return format_value(c)
    return str(c)


def _json_text(config: CommandConfig, payload: dict) -> str:
    doc = {"config": config.normalized(), **payload}
    return json.dumps(doc, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, Fraction):
        return format_value(o)
    raise TypeError(f"not JSON serializable: {o!r}")


def run(config: CommandConfig) -> int:
    ns = config.options
    handler = _HANDLERS[config.subcommand]
    handler(config, ns)
    return 0


def _run_derive(config, ns):
    A = ns.set_
    table = TabulatedFunction([int(v) for v in A.indicator_upto(ns.n)[1:]])
    df = bougaief_derivative(table)
    rows = [(n, df(n)) for n in range(1, ns.n + 1)]
    if ns.format == "json":
        text = _json_text(config, {"values": [{"n": n, "value": int(v)} for n, v in rows]})
    else:
        text = _csv_text(config, ["n", "value"], rows)
    _emit(text, ns.out)
    if ns.plot:
        plotting.plot_values(rows, f"derivative of indicator({A.name})", ns.plot)


def _run_monotone(config, ns):
    if ns.set_ is not None:
        table = TabulatedFunction([int(v) for v in ns.set_.indicator_upto(ns.n)[1:]])
        name = f"indicator({ns.set_.name})"
    elif ns.table is not None:
        with open(ns.table) as fh:
            table = TabulatedFunction.from_csv(fh)
        name = ns.table
    else:
        raise UsageError("monotone needs --set or --table")
    verdict = is_mult_monotone(table, ns.direction)
    payload = {
        "function": name,
        "N": table.limit_N,
        "direction": ns.direction,
        "holds": verdict.holds,
        "violation": None if verdict.violation is None else
            {"k": verdict.violation[0], "n": verdict.violation[1]},
        "worst_margin": verdict.worst_margin,
    }
    if ns.format == "csv":
        text = _csv_text(config, ["holds", "k", "n", "worst_margin"],
                         [(verdict.holds,
                           "" if verdict.violation is None else verdict.violation[0],
                           "" if verdict.violation is None else verdict.violation[1],
                           verdict.worst_margin)])
    else:
        text = _json_text(config, payload)
    _emit(text, ns.out)
    if ns.plot:
        rows = [(n, table(n)) for n in range(1, table.limit_N + 1)]
        plotting.plot_values(rows, f"{name}: monotone={verdict.holds}", ns.plot)


def _pair_from_flags(A, B, verify_n, tail_bound=None):
    if B is None:
        B = complement_set(A)
        if B is None:
            raise UsageError(
                f"no known complementary factor for {A.name}; pass --B explicitly")
    return make_pair(A, B, verify_n, tail_bound=tail_bound)


def _run_density(config, ns):
    pair = _pair_from_flags(ns.A, ns.B, ns.verify_n, ns.tail_bound)
    rows = esv_density(pair, ns.xgrid)
    table = [(r.x, r.empirical, r.lambda_lo, r.lambda_hi, r.heuristic_tail)
             for r in rows]
    if ns.format == "json":
        text = _json_text(config, {"rows": [
            {"x": r.x, "empirical": r.empirical, "lambda_lo": r.lambda_lo,
             "lambda_hi": r.lambda_hi, "heuristic_tail": r.heuristic_tail}
            for r in rows]})
    else:
        text = _csv_text(config, ["x", "empirical", "lambda_lo", "lambda_hi",
                                  "heuristic_tail"], table)
    _emit(text, ns.out)
    if ns.plot:
        plotting.plot_density(rows, f"density of {pair.B.name} vs prediction", ns.plot)


def _run_alpha(config, ns):
    rep = alpha_limit_estimate(ns.set_, ns.ygrid, ns.xgrid, N_check=ns.ncheck, upper=1)
    if ns.format == "csv":
        logdict = dict(rep.logmean)
        rows = [(x, c, logdict.get(x, math.nan)) for x, c in rep.cesaro]
        text = _csv_text(config, ["x", "cesaro", "logmean"], rows)
    else:
        text = _json_text(config, rep.to_json())
    _emit(text, ns.out)
    if ns.plot:
        plotting.plot_mean_report(rep, ns.plot)


def _det_sequence(kernel, n, precision):
    if isinstance(kernel, AdditiveSymbol):
        return additive_toeplitz_dets(kernel, n, precision)
    return incremental_cholesky_dets(kernel, n, precision)


def _run_det(config, ns):
    seq = _det_sequence(ns.kernel, ns.n, ns.precision)
    rows = seq.rows()
    if ns.format == "json":
        text = _json_text(config, {"rows": [
            {"n": n, "ln_D": a, "r": b, "ln_r": c, "precision_bits": p}
            for n, a, b, c, p in rows]})
    else:
        text = _csv_text(config, ["n", "ln_D", "r", "ln_r", "precision_bits"], rows)
    _emit(text, ns.out)
    if ns.plot:
        plotting.plot_det_sequence(rows, f"determinant sequence: {ns.kernel.name}", ns.plot)


def _run_product(config, ns):
    kernel = ns.kernel
    sigma = getattr(kernel, "sigma", None)
    if sigma is None:
        raise UsageError("product requires a hilberdink kernel (--kernel hilberdink:...)")
    t0 = time.perf_counter()
    ln_pf = [hilberdink_product_formula(sigma, n, ns.precision)
             for n in range(1, ns.n + 1)]
    t_pf = time.perf_counter() - t0
    if ns.no_compare:
        rows = [(n, ln_pf[n - 1], math.nan, math.nan) for n in range(1, ns.n + 1)]
        print(f"{PROG} product: formula {t_pf:.3f}s (no engine comparison)",
              file=sys.stderr)
    else:
        t0 = time.perf_counter()
        seq = _det_sequence(kernel, ns.n, ns.precision)
        t_ch = time.perf_counter() - t0
        lnD = seq.ln_D
        rows = [(n, ln_pf[n - 1], lnD[n - 1], abs(ln_pf[n - 1] - lnD[n - 1]))
                for n in range(1, ns.n + 1)]
        print(f"{PROG} product: formula {t_pf:.3f}s, engine {t_ch:.3f}s",
              file=sys.stderr)
    if ns.format == "json":
        text = _json_text(config, {"rows": [
            {"n": n, "ln_D_product": a, "ln_D_cholesky": _nan_null(b),
             "abs_diff": _nan_null(c)} for n, a, b, c in rows]})
    else:
        text = _csv_text(config, ["n", "ln_D_product", "ln_D_cholesky", "abs_diff"], rows)
    _emit(text, ns.out)
    if ns.plot:
        plotting.plot_product_rows(rows, f"product formula: {kernel.name}", ns.plot)


def _nan_null(x):
    return None if isinstance(x, float) and math.isnan(x) else x


def _run_prop29(config, ns):
    seq = _det_sequence(ns.kernel, ns.n, ns.precision)
    rep = prop29_summary(seq)
    text = _json_text(config, rep.to_json())
    _emit(text, ns.out)
    if ns.plot:
        plotting.plot_prop29(rep, f"log-mean summary: {ns.kernel.name}", ns.plot)


def _run_prop30(config, ns):
    B = ns.B or complement_set(ns.A)
    if B is None:
        raise UsageError(f"no known complementary factor for {ns.A.name}; pass --B")
    table = read_ratio_table(ns.table)
    rep = prop30_factorization_check(ns.A, B, table, ns.n, ns.precision)
    text = _json_text(config, rep.to_json())
    _emit(text, ns.out)
    if ns.plot:
        plotting.plot_prop30(rep, f"block structure: A={ns.A.name}", ns.plot)


def _run_szego(config, ns):
    res = szego_symbol_tools(ns.coeffs)
    payload = res.to_json()
    det_rows = None
    if ns.n is not None:
        seq = additive_toeplitz_dets(res.symbol, ns.n, ns.precision)
        det_rows = seq.rows()
        root = math.exp(seq.ln_D[-1] / ns.n)
        payload["root_at_n"] = {"n": ns.n, "value": root}
        if res.geometric_mean is not None:
            payload["root_gap"] = abs(root - res.geometric_mean)
    text = _json_text(config, payload)
    _emit(text, ns.out)
    if ns.plot:
        plotting.plot_szego(res, det_rows, ns.plot)


_HANDLERS = {
    "derive": _run_derive,
    "monotone": _run_monotone,
    "density": _run_density,
    "alpha": _run_alpha,
    "det": _run_det,
    "product": _run_product,
    "prop29": _run_prop29,
    "prop30": _run_prop30,
    "szego": _run_szego,
}


def main(argv=None) -> int:
    config = parse_args(argv)
    try:
        return run(config)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - single CLI boundary
        module = type(exc).__module__
        where = module.split(".")[-1] if module.startswith("multmono") else module
        print(f"{PROG} ({where}): {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
