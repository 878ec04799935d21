"""Figure rendering for CLI reports.

Every figure writer takes the already-computed artifact and a path; the
CLI invokes these only when --plot is given, so the delimited output stays
byte-identical with or without figures.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

FIGSIZE = (7.0, 4.3)
DPI = 150


def _new_axes(title: str, xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.set_title(title, fontsize=10)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path: str) -> None:
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)


def plot_values(rows, title: str, path: str, ylabel: str = "value") -> None:
    """Stem plot of (n, value) rows; used by derive and monotone."""
    ns = [r[0] for r in rows]
    vs = [float(r[1]) for r in rows]
    fig, ax = _new_axes(title, "n", ylabel)
    ax.stem(ns, vs, basefmt="k-")
    _save(fig, path)


def plot_density(rows, title: str, path: str) -> None:
    xs = [r.x for r in rows]
    fig, ax = _new_axes(title, "x", "density")
    ax.semilogx(xs, [r.empirical for r in rows], "o-", label="empirical count/x")
    ax.semilogx(xs, [r.lambda_lo for r in rows], "k--", lw=0.8, label="predicted band")
    ax.semilogx(xs, [r.lambda_hi for r in rows], "k--", lw=0.8)
    ax.legend()
    _save(fig, path)


def plot_mean_report(rep, path: str) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4.2))
    ax = axes[0]
    ys = [a.y for a in rep.alpha_y]
    mid = [(float(a.interval.lo) + min(float(a.interval.hi), float(a.interval.lo) + 1)) / 2
           if a.interval.hi == math.inf else a.interval.midpoint() for a in rep.alpha_y]
    lo = [float(a.interval.lo) for a in rep.alpha_y]
    hi = [float(a.interval.hi) if a.interval.hi != math.inf else float("nan")
          for a in rep.alpha_y]
    ax.errorbar(ys, mid, yerr=[[m - l for m, l in zip(mid, lo)],
                               [h - m if not math.isnan(h) else 0 for m, h in zip(mid, hi)]],
                fmt="s", capsize=3)
    ax.set_xlabel("y")
    ax.set_ylabel("alpha(f; y)")
    ax.set_title(f"alpha ladder: {rep.name}", fontsize=10)
    ax.grid(True, alpha=0.3)
    ax = axes[1]
    ax.semilogx([x for x, _ in rep.cesaro], [v for _, v in rep.cesaro], "o-",
                label="Cesaro mean")
    ax.semilogx([x for x, _ in rep.logmean], [v for _, v in rep.logmean], "s-",
                label="logarithmic mean")
    ax.axhline(rep.alpha_sup_lower, color="k", ls="--", lw=0.8, label="sup_y lower bound")
    ax.set_xlabel("x")
    ax.legend()
    ax.set_title("finite-x traces", fontsize=10)
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def plot_det_sequence(rows, title: str, path: str) -> None:
    """rows: (n, ln_D, r, ln_r, precision) tuples."""
    ns = [r[0] for r in rows]
    fig, axes = plt.subplots(1, 2, figsize=(10, 4.2))
    axes[0].plot(ns, [r[2] for r in rows], ".-", ms=3)
    axes[0].set_xlabel("n")
    axes[0].set_ylabel("ratio D_n/D_{n-1}")
    axes[0].grid(True, alpha=0.3)
    roots = [math.exp(r[1] / r[0]) for r in rows]
    axes[1].plot(ns, roots, ".-", ms=3)
    axes[1].set_xlabel("n")
    axes[1].set_ylabel("D_n^(1/n)")
    axes[1].grid(True, alpha=0.3)
    fig.suptitle(title, fontsize=10)
    _save(fig, path)


def plot_product_rows(rows, title: str, path: str) -> None:
    """rows: (n, ln_D_product, ln_D_cholesky, abs_diff) with possible NaNs."""
    ns = [r[0] for r in rows]
    fig, ax = _new_axes(title, "n", "ln D_n")
    ax.plot(ns, [r[1] for r in rows], "-", label="product formula")
    if not math.isnan(rows[-1][2]):
        ax.plot(ns, [r[2] for r in rows], "--", label="Cholesky engine")
    ax.legend()
    _save(fig, path)


def plot_prop29(rep, title: str, path: str) -> None:
    fig, ax = _new_axes(title, "M", "value")
    ax.semilogx([m for m, _ in rep.logmean_trace if m > 1],
                [v for m, v in rep.logmean_trace if m > 1], "o-",
                label="logmean of (1/k) ln r_k")
    ax.semilogx([m for m, _ in rep.root_trace], [math.log(v) for _, v in rep.root_trace],
                ".", ms=2, label="ln D_M^(1/M) (last decade)")
    ax.axhline(rep.alpha_proxy, color="k", ls="--", lw=0.8, label="alpha proxy")
    ax.legend()
    _save(fig, path)


def plot_prop30(rep, title: str, path: str) -> None:
    fig, ax = _new_axes(title, "", "log discrepancy")
    ax.bar(["block identity", "ratio identity"],
           [rep.worst_block_log_discrepancy, rep.worst_ratio_log_discrepancy])
    ax.set_yscale("log" if max(rep.worst_block_log_discrepancy,
                               rep.worst_ratio_log_discrepancy) > 0 else "linear")
    _save(fig, path)


def plot_szego(res, det_rows, path: str) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4.2))
    ax = axes[0]
    ts = [i / 512 for i in range(513)]
    cs = [complex(c) for c in res.symbol.coeffs]

    def f(t):
        out = cs[0].real
        for k in range(1, len(cs)):
            out += 2 * (cs[k].real * math.cos(2 * math.pi * k * t)
                        - cs[k].imag * math.sin(2 * math.pi * k * t))
        return out

    ax.plot(ts, [f(t) for t in ts])
    ax.set_xlabel("t")
    ax.set_ylabel("f(t)")
    ax.set_title("symbol", fontsize=10)
    ax.grid(True, alpha=0.3)
    ax = axes[1]
    if det_rows:
        ns = [r[0] for r in det_rows]
        ax.plot(ns, [math.exp(r[1] / r[0]) for r in det_rows], ".-", ms=3,
                label="Delta_n^(1/n)")
    if res.geometric_mean is not None:
        ax.axhline(res.geometric_mean, color="k", ls="--", lw=0.8,
                   label="geometric mean G(f)")
    ax.set_xlabel("n")
    ax.legend()
    ax.grid(True, alpha=0.3)
    _save(fig, path)
