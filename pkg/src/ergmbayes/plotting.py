"""Trace, density and goodness-of-fit figures written as SVG (or any format
matplotlib understands, chosen by file extension)."""

import matplotlib
from matplotlib.figure import Figure
import numpy as np

from .gof import STATISTICS, bin_labels
from .summary import density_curve

STYLE = {
    "font.size": 9,
    "axes.titlesize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "ergmbayes",
    "svg.fonttype": "path",
}

_GOF_XLABEL = {
    "degree": "degree",
    "geodesic": "minimum geodesic distance",
    "esp": "edge-wise shared partners",
}


def _save(fig, path):
    fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None)


def trace_plot(draws, labels, path):
    """One row per parameter: traces of every chain and the pooled density."""
    draws = np.asarray(draws, dtype=float)
    if draws.ndim == 2:
        draws = draws[None]
    d = draws.shape[2]
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(8, 1.9 * d + 0.4))
        axes = fig.subplots(d, 2, squeeze=False, gridspec_kw={"width_ratios": [1, 2]})
        for k in range(d):
            x, dens = density_curve(draws[:, :, k].ravel())
            ax = axes[k, 0]
            ax.fill_between(x, dens, color="0.75", lw=0)
            ax.plot(x, dens, color="0.2", lw=1)
            ax.set_title(labels[k])
            ax = axes[k, 1]
            for c in range(draws.shape[0]):
                ax.plot(draws[c, :, k], lw=0.5, alpha=0.8)
            ax.set_title("trace: %s" % labels[k])
            ax.set_xlabel("iteration")
        fig.tight_layout()
        _save(fig, path)


def gof_plot(result, path):
    """Per-bin 5-95% band, median line and observed counts for each statistic."""
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(11, 3.4))
        axes = fig.subplots(1, 3)
        for ax, stat in zip(axes, STATISTICS):
            obs = result.observed[stat]
            rep = result.replicated[stat]
            total = rep.sum(axis=1, keepdims=True).astype(float)
            total[total == 0] = 1.0
            scale = max(obs.sum(), 1)
            q = np.quantile(rep / total, result.probs, axis=0)
            xs = np.arange(obs.size)
            ax.boxplot(rep / total, positions=xs, widths=0.5, showfliers=False,
                       medianprops={"color": "0.3"}, boxprops={"color": "0.5"},
                       whiskerprops={"color": "0.5"}, capprops={"color": "0.5"})
            ax.fill_between(xs, q[0], q[-1], color="0.85", lw=0, zorder=0)
            ax.plot(xs, q[1], color="0.4", lw=1, ls="--")
            ax.plot(xs, obs / scale, color="black", lw=1.8, marker="o", ms=3)
            labels = bin_labels(stat, result.bins)
            step = max(1, len(labels) // 8)
            ax.set_xticks(xs[::step])
            ax.set_xticklabels(labels[::step])
            ax.set_xlabel(_GOF_XLABEL[stat])
            ax.set_ylabel("proportion")
        fig.tight_layout()
        _save(fig, path)
