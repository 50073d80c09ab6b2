"""Figure rendering for the CLI report path.

Every function writes a PNG next to the command's delimited output.  The Agg
backend keeps rendering deterministic and headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 120


def _save(fig, path):
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_marginals_figure(marginals, path):
    """Grid of marginal posterior histograms with median and interval band."""
    n = len(marginals)
    cols = min(3, n)
    rows = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(4 * cols, 2.6 * rows), squeeze=False)
    for ax in axes.flat[n:]:
        ax.set_visible(False)
    for ax, marg in zip(axes.flat, marginals):
        centers = 0.5 * (marg.edges[:-1] + marg.edges[1:])
        widths = np.diff(marg.edges)
        ax.bar(centers, marg.heights, width=widths, color="#d9c27a", alpha=0.6)
        ax.axvspan(marg.ci_lo, marg.ci_hi, color="#f2cc4b", alpha=0.25)
        ax.axvline(marg.median, color="#333333", linewidth=2)
        ax.set_title(marg.parameter, fontsize=10)
        ax.set_yticks([])
    fig.tight_layout()
    _save(fig, path)


def save_prediction_figure(rows, path):
    """Interval plot: one (lo, hi, mean) bar per prediction row.

    ``rows`` is a list of (label, lo, hi, mean).
    """
    labels = [r[0] for r in rows]
    lo = np.array([r[1] for r in rows], dtype=float)
    hi = np.array([r[2] for r in rows], dtype=float)
    mean = np.array([r[3] for r in rows], dtype=float)
    y = np.arange(len(rows))[::-1]
    fig, ax = plt.subplots(figsize=(6, 0.6 * len(rows) + 1.2))
    ax.hlines(y, lo, hi, color="#4878a8", linewidth=4, alpha=0.7)
    ax.plot(mean, y, "o", color="#20324a")
    ax.set_yticks(y)
    ax.set_yticklabels(labels)
    ax.set_xlabel("faults detected")
    fig.tight_layout()
    _save(fig, path)


def save_utility_figure(report, path):
    """Per-option bars for the tail/central utility values plus the EU marker."""
    options = report.options
    x = np.arange(len(options))
    width = 0.25
    fig, ax = plt.subplots(figsize=(1.8 * len(options) + 2.5, 4))
    lo = [o.tails[0].value for o in options]
    mid = [o.tails[1].value for o in options]
    hi = [o.tails[2].value for o in options]
    ax.bar(x - width, lo, width, label="lower 3%", color="#b3491f")
    ax.bar(x, mid, width, label="central 94%", color="#4878a8")
    ax.bar(x + width, hi, width, label="upper 3%", color="#3f8f4f")
    ax.plot(x, [o.utility for o in options], "kD", label="expected utility")
    ax.axhline(0.0, color="#777777", linewidth=0.8)
    ax.set_xticks(x)
    ax.set_xticklabels([o.label for o in options])
    ax.set_ylabel("utility")
    ax.set_title(f"scenario: {report.scenario}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def save_sweep_figure(sweep, path):
    labels = list(sweep.rows[0].utilities)
    grid = [row.value for row in sweep.rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    for label in labels:
        ax.plot(grid, [row.utilities[label] for row in sweep.rows], "o-", label=label)
    ax.set_xlabel(sweep.parameter)
    ax.set_ylabel("expected utility")
    ax.set_title(f"scenario: {sweep.scenario}")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def save_comparison_figure(result, path):
    entries = result.entries
    y = np.arange(len(entries))[::-1]
    elpd = np.array([e.elpd for e in entries])
    se = np.array([e.se for e in entries])
    fig, ax = plt.subplots(figsize=(6, 0.6 * len(entries) + 1.2))
    ax.errorbar(elpd, y, xerr=se, fmt="o", color="#20324a", capsize=4)
    ax.set_yticks(y)
    ax.set_yticklabels([e.label for e in entries])
    ax.set_xlabel("elpd (PSIS-LOO)")
    fig.tight_layout()
    _save(fig, path)
