"""Posterior summaries: moments, standard errors, quantiles, density curves."""

from dataclasses import dataclass
import math

import numpy as np
from scipy.stats import gaussian_kde

QUANTILE_PROBS = (0.025, 0.25, 0.5, 0.75, 0.975)


@dataclass
class SummaryTable:
    labels: list
    mean: np.ndarray
    sd: np.ndarray
    naive_se: np.ndarray
    ts_se: np.ndarray
    quantiles: np.ndarray
    n_draws: int
    acceptance_rate: float = None
    probs: tuple = QUANTILE_PROBS

    def format(self):
        return format_summary(self)


def naive_se(sd, n):
    return np.asarray(sd, dtype=float) / math.sqrt(n)


def batch_means_se(x):
    """Standard error of the mean of a 1-d series by non-overlapping batch means
    with floor(sqrt(N)) batches."""
    x = np.asarray(x, dtype=float)
    n = x.size
    nb = int(math.isqrt(n))
    if nb < 2:
        return float("nan")
    b = n // nb
    means = x[:nb * b].reshape(nb, b).mean(axis=1)
    return float(np.sqrt(means.var(ddof=1) / nb))


def _as_chains(draws):
    draws = np.asarray(draws, dtype=float)
    if draws.ndim == 2:
        draws = draws[None]
    if draws.ndim != 3 or draws.shape[0] * draws.shape[1] == 0:
        raise ValueError("need a nonempty (nchains, iters, d) array of draws")
    return draws


def summarize(sample, labels=None, acceptance_rate=None):
    """Pool all chains and summarise each parameter.

    ``sample`` is a ``PosteriorSample`` or an array of shape (iters, d) or
    (nchains, iters, d).
    """
    if hasattr(sample, "draws"):
        labels = labels or sample.labels
        if acceptance_rate is None:
            acceptance_rate = sample.acceptance_rate
        sample = sample.draws
    draws = _as_chains(sample)
    d = draws.shape[2]
    pooled = draws.reshape(-1, d)
    n = pooled.shape[0]
    labels = list(labels) if labels else ["theta%d" % (k + 1) for k in range(d)]
    sd = pooled.std(axis=0, ddof=1) if n > 1 else np.zeros(d)
    ts = np.array([batch_means_se(pooled[:, k]) for k in range(d)])
    constant = np.ptp(pooled, axis=0) == 0
    sd[constant] = 0.0
    ts[constant & (n >= 4)] = 0.0
    q = np.quantile(pooled, QUANTILE_PROBS, axis=0)
    return SummaryTable(labels, pooled.mean(axis=0), sd, naive_se(sd, n), ts, q, n,
                        acceptance_rate)


def format_summary(tab):
    names = ["theta%d (%s)" % (k + 1, lab) for k, lab in enumerate(tab.labels)]
    w = max(len(s) for s in names) + 1
    lines = ["%-*s %12s %12s %12s" % (w, "", "Mean", "SD", "Naive SE")]
    for k, name in enumerate(names):
        lines.append("%-*s %12.7f %12.7f %12.9f" % (w, name, tab.mean[k], tab.sd[k],
                                                    tab.naive_se[k]))
    lines += ["", "%-*s %14s" % (w, "", "Time-series SE")]
    for k, name in enumerate(names):
        lines.append("%-*s %14.9f" % (w, name, tab.ts_se[k]))
    lines.append("")
    lines.append("%-*s" % (w, "") + "".join("%12s" % ("%g%%" % (100 * p)) for p in tab.probs))
    for k, name in enumerate(names):
        lines.append("%-*s" % (w, name) + "".join("%12.7f" % v for v in tab.quantiles[:, k]))
    if tab.acceptance_rate is not None:
        lines += ["", "Acceptance rate: %.7f" % tab.acceptance_rate]
    return "\n".join(lines) + "\n"


def density_curve(x, num=512):
    """Gaussian kernel density (Silverman bandwidth) as (grid, density)."""
    x = np.asarray(x, dtype=float)
    lo, hi = x.min(), x.max()
    if x.size < 2 or hi - lo <= 0:
        grid = np.linspace(lo - 0.5, hi + 0.5, num)
        dens = np.zeros(num)
        dens[np.argmin(np.abs(grid - lo))] = 1.0 / (grid[1] - grid[0])
        return grid, dens
    kde = gaussian_kde(x, bw_method="silverman")
    pad = 3 * kde.factor * x.std(ddof=1)
    grid = np.linspace(lo - pad, hi + pad, num)
    return grid, kde(grid)
