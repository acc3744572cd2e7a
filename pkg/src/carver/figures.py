"""Matplotlib figures accompanying the delimited report outputs.

Figures render through the Agg backend with fixed size, dpi, and
metadata, so repeated runs write byte-identical PNG files.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SAVE = {"dpi": 120, "metadata": {"Software": "carver"}}


def save_series_figure(series, estimate, path, title="box-count regression") -> None:
    """Log-log scatter of the count series with the fitted slope line."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    xs = [-math.log(dl) for dl in series.deltas]
    ys = [math.log(c) if c > 0 else float("nan") for c in series.counts]
    ax.plot(xs, ys, "o", color="#24518f", label="log N(A, delta)")
    if estimate is not None:
        lo, hi = min(xs), max(xs)
        ax.plot(
            [lo, hi],
            [estimate.slope * lo + estimate.intercept, estimate.slope * hi + estimate.intercept],
            "-",
            color="#c22f2f",
            label=f"slope {estimate.slope:.4f} (r2 {estimate.r_squared:.4f})",
        )
    ax.set_xlabel("-log delta")
    ax.set_ylabel("log count")
    ax.set_title(title)
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def save_assembly_figure(report: dict, path) -> None:
    """Stage ladder: certified exponent and measured slope against 1 - 1/n."""
    stages = report["stages"]
    ns = [st["n"] for st in stages]
    targets = [1.0 - 1.0 / n for n in ns]
    certified = [st["s"] for st in stages]
    measured = [st["intersection_slope"] for st in stages]
    lengths = [st["curve_length"] for st in stages]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    ax1.plot(ns, targets, "k--", label="1 - 1/n")
    ax1.plot(ns, certified, "o-", color="#24518f", label="certified s")
    keep = [(n, m) for n, m in zip(ns, measured) if m is not None]
    if keep:
        ax1.plot([k[0] for k in keep], [k[1] for k in keep], "s-",
                 color="#c22f2f", label="measured slope")
    ax1.set_xlabel("stage n")
    ax1.set_ylabel("exponent")
    ax1.set_title("dimension ladder")
    ax1.legend(loc="lower right")
    ax1.grid(True, alpha=0.3)

    budgets = [2.0 ** (-n) for n in ns]
    ax2.bar([n - 0.18 for n in ns], budgets, width=0.36, color="#b8c7dd", label="2^-n")
    ax2.bar([n + 0.18 for n in ns], lengths, width=0.36, color="#f2b06c", label="curve length")
    ax2.set_xlabel("stage n")
    ax2.set_ylabel("length")
    ax2.set_title(
        f"lengths (total {report['final']['total_length']:.4f} < 3)"
    )
    ax2.legend(loc="upper right")
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
