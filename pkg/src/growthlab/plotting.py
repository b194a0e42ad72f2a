"""Figures written next to the CLI's data output (matplotlib, file backend only)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_growth(counts, activity, path, title=""):
    """log log b(r) against log r, and the activity s_ω(r)."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.6))
    pts = [(math.log(r), math.log(math.log(b))) for r, b in enumerate(counts)
           if r > 1 and b > math.e]
    if pts:
        x, y = zip(*pts)
        left.plot(x, y, "o-", ms=3)
    left.set_xlabel("log r")
    left.set_ylabel("log log b(r)")
    left.set_title("ball growth")
    right.step(range(len(counts)), [math.log(b) for b in counts], where="post", label="log b(r)")
    if activity:
        right.step(range(len(activity)), activity, where="post", label="s(r)")
    right.set_xlabel("r")
    right.legend()
    if title:
        fig.suptitle(title)
    return _save(fig, path)


def plot_certificates(reports, path, reference=None, title=""):
    """log s(w_k) against log |w_k|; ``reference`` draws the slope of an exponent."""
    fig, ax = plt.subplots(figsize=(5, 3.6))
    x = [math.log(r.length) for r in reports]
    y = [math.log(r.s) for r in reports]
    ax.plot(x, y, "o-", ms=3, label="certificates")
    if reference is not None and x:
        xs = np.linspace(0, max(x), 20)
        ax.plot(xs, reference * xs, "--", label=f"slope {reference:.4f}")
    ax.set_xlabel("log |w_k|")
    ax.set_ylabel("log s(w_k)")
    ax.legend()
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_oscillation(series, report, path, title=""):
    """The exponent curve log log b / log r with the α, β levels and U/L marks."""
    fig, ax = plt.subplots(figsize=(7, 3.6))
    X = series.X
    e = series.exponents()
    ax.plot(X, e, "-", lw=1)
    ax.axhline(report.alpha, ls="--", c="tab:blue", lw=0.8)
    ax.axhline(report.beta, ls="--", c="tab:red", lw=0.8)
    if report.U:
        ax.plot(X[list(report.U)], e[list(report.U)], ".", c="tab:red", ms=3, label="U")
    if report.L:
        ax.plot(X[list(report.L)], e[list(report.L)], ".", c="tab:blue", ms=3, label="L")
    if X.size and X[-1] / X[0] > 100:
        ax.set_xscale("log")
    ax.set_xlabel("log r")
    ax.set_ylabel("log log b / log r")
    ax.legend()
    if title:
        ax.set_title(title)
    return _save(fig, path)
