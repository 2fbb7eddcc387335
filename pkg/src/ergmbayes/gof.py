"""Posterior-predictive goodness of fit on degree, geodesic and
edgewise-shared-partner distributions."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import degree_histogram, esp_histogram, geodesic_histogram
from .simulate import NetworkSimulator

STATISTICS = ("degree", "geodesic", "esp")
GOF_PROBS = (0.05, 0.5, 0.95)


def _fit_length(h, size):
    out = np.zeros(size, dtype=np.int64)
    k = min(size, h.size)
    out[:k] = h[:k]
    return out


def binned_histograms(g, n_deg, n_dist, n_esp):
    """Degree counts for 0..n_deg, shared-partner counts for 0..n_esp and
    geodesic counts for 1..n_dist followed by the unreachable count."""
    deg = _fit_length(degree_histogram(g), n_deg + 1)
    esp = _fit_length(esp_histogram(g), n_esp + 1)
    geo = geodesic_histogram(g)
    dist = np.append(_fit_length(geo[:-1], n_dist), geo[-1])
    return {"degree": deg, "geodesic": dist, "esp": esp}


def bin_labels(stat, bins):
    n_deg, n_dist, n_esp = bins
    if stat == "degree":
        return [str(k) for k in range(n_deg + 1)]
    if stat == "esp":
        return [str(k) for k in range(n_esp + 1)]
    return [str(k) for k in range(1, n_dist + 1)] + ["Inf"]


@dataclass
class GofResult:
    observed: dict
    replicated: dict
    bins: tuple
    quantiles: dict
    probs: tuple = GOF_PROBS

    @property
    def nsim(self):
        return self.replicated["degree"].shape[0]

    def coverage(self, stat=None):
        """Fraction of non-empty bins whose observed count lies inside the
        outer quantile band; a bin is empty when both the observed count and
        the upper quantile are zero."""
        stats = [stat] if stat else STATISTICS
        inside = total = 0
        for s in stats:
            obs = self.observed[s]
            lo, hi = self.quantiles[s][0], self.quantiles[s][-1]
            used = (obs > 0) | (hi > 0)
            inside += int(((obs >= lo) & (obs <= hi) & used).sum())
            total += int(used.sum())
        return inside / total if total else 1.0


def run_gof(y, spec, draws, nsim=100, aux_iters=20000, bins=(14, 15, 10), seed=None,
            threads=1, proposal="uniform"):
    """Simulate ``nsim`` networks at parameter vectors resampled uniformly
    (with replacement) from the pooled posterior ``draws``.

    ``draws`` may be a ``PosteriorSample`` or an array whose last axis is the
    parameter dimension.
    """
    if hasattr(draws, "pooled"):
        draws = draws.pooled()
    draws = np.asarray(draws, dtype=float)
    draws = draws.reshape(-1, draws.shape[-1]) if draws.size else draws.reshape(0, spec.dim)
    if draws.shape[0] == 0:
        raise ValueError("posterior sample is empty")
    if draws.shape[1] != spec.dim:
        raise ValueError("draws have %d columns, model has %d terms" % (draws.shape[1], spec.dim))
    bins = tuple(int(b) for b in bins)
    if len(bins) != 3 or min(bins) < 1:
        raise ValueError("bins must be three positive integers (n_deg, n_dist, n_esp)")
    if nsim < 1:
        raise ValueError("nsim must be positive")
    ss = np.random.SeedSequence(seed)
    pick_seed, *sim_seeds = ss.spawn(nsim + 1)
    picks = np.random.default_rng(pick_seed).integers(draws.shape[0], size=nsim)
    sim = NetworkSimulator(y, spec, proposal)

    def one(r):
        ch = sim.simulate(draws[picks[r]], aux_iters, np.random.default_rng(sim_seeds[r]))
        return binned_histograms(ch.graph(), *bins)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            reps = list(pool.map(one, range(nsim)))
    else:
        reps = [one(r) for r in range(nsim)]
    observed = binned_histograms(y, *bins)
    replicated = {s: np.array([r[s] for r in reps]) for s in STATISTICS}
    quantiles = {s: np.quantile(replicated[s], GOF_PROBS, axis=0) for s in STATISTICS}
    return GofResult(observed, replicated, bins, quantiles)
