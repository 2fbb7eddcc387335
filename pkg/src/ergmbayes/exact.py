"""Exhaustive enumeration over all graphs on a handful of nodes.

Ground truth for the samplers: exact normalising constants, likelihoods,
graph probabilities and grid posteriors. Only feasible while 2^C(n,2) stays
small, so node counts are capped.
"""

from dataclasses import dataclass
from functools import lru_cache
import itertools
import math

import numpy as np
from scipy.special import logsumexp

from .terms import compute_stats, gw_weights

MAX_NODES = 5
MAX_NODES_SINGLE_TERM = 6


class OracleError(ValueError):
    pass


def _check_size(n, spec):
    limit = MAX_NODES_SINGLE_TERM if spec.dim == 1 else MAX_NODES
    if n > limit:
        raise OracleError("exhaustive enumeration is limited to n <= %d for this model" % limit)


def graph_code(g):
    """Index of ``g`` in the enumeration: bit e is dyad e of ``np.triu_indices``."""
    iu = np.triu_indices(g.n, 1)
    bits = g.adjacency()[iu].astype(np.int64)
    return int((bits << np.arange(bits.size)).sum())


def _attr_key(spec, attributes):
    attributes = attributes or {}
    return tuple((name, tuple(str(v) for v in attributes[name])) for name in spec.attributes)


def all_stats(n, spec, attributes=None):
    """Statistics of every graph on ``n`` nodes, shape (2^C(n,2), d)."""
    _check_size(n, spec)
    missing = [a for a in spec.attributes if not attributes or a not in attributes]
    if missing:
        raise OracleError("missing attribute(s) %s" % ", ".join(missing))
    return _all_stats(n, spec, _attr_key(spec, attributes))


@lru_cache(maxsize=32)
def _all_stats(n, spec, attr_key):
    attrs = dict(attr_key)
    iu = np.triu_indices(n, 1)
    ndy = iu[0].size
    codes = np.arange(2 ** ndy, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(ndy)) & 1).astype(float)
    adj = np.zeros((codes.size, n, n))
    adj[:, iu[0], iu[1]] = bits
    adj[:, iu[1], iu[0]] = bits
    deg = adj.sum(axis=2)
    shared = adj @ adj
    out = np.empty((codes.size, spec.dim))
    for t, term in enumerate(spec.terms):
        if term.kind == "edges":
            out[:, t] = bits.sum(axis=1)
        elif term.kind == "nodematch":
            a = np.asarray(attrs[term.attribute])
            match = (a[iu[0]] == a[iu[1]]).astype(float)
            out[:, t] = bits @ match
        elif term.kind == "kstar":
            out[:, t] = np.vectorize(lambda d: math.comb(int(d), term.k))(deg).sum(axis=1)
        elif term.kind == "gwdegree":
            out[:, t] = gw_weights(deg, term.decay).sum(axis=1)
        elif term.kind == "triangle":
            out[:, t] = (shared * adj).sum(axis=(1, 2)) / 6
        elif term.kind == "gwesp":
            w = gw_weights(shared, term.decay) * adj
            out[:, t] = w.sum(axis=(1, 2)) / 2
    out.setflags(write=False)
    return out


def _unique_stats(n, spec, attributes):
    s = all_stats(n, spec, attributes)
    rows, counts = np.unique(s, axis=0, return_counts=True)
    return rows, np.log(counts)


def exact_log_z(n, spec, theta, attributes=None):
    """log of the sum of exp(theta . s(g)) over every graph on ``n`` nodes.

    ``theta`` may be one point or an (N, d) array of points.
    """
    rows, logc = _unique_stats(n, spec, attributes)
    theta = np.asarray(theta, dtype=float)
    return logsumexp(theta @ rows.T + logc, axis=-1)


def exact_loglik(y, spec, theta):
    s = compute_stats(y, spec)
    theta = np.asarray(theta, dtype=float)
    return theta @ s - exact_log_z(y.n, spec, theta, y.attributes)


def graph_probabilities(n, spec, theta, attributes=None):
    """Probability of every graph, indexed by ``graph_code``."""
    s = all_stats(n, spec, attributes)
    logp = s @ np.asarray(theta, dtype=float)
    return np.exp(logp - logsumexp(logp))


def exact_mean_stats(n, spec, theta, attributes=None):
    s = all_stats(n, spec, attributes)
    return graph_probabilities(n, spec, theta, attributes) @ s


def exact_loglik_grad(y, spec, theta):
    return compute_stats(y, spec) - exact_mean_stats(y.n, spec, theta, y.attributes)


@dataclass
class ExactPosteriorGrid:
    grid: np.ndarray
    log_post: np.ndarray
    weights: np.ndarray
    bounds: list

    def mean(self):
        return self.weights @ self.grid

    def cov(self):
        z = self.grid - self.mean()
        return (z * self.weights[:, None]).T @ z

    def sd(self):
        return np.sqrt(np.diag(self.cov()))

    def mode(self):
        return self.grid[np.argmax(self.log_post)]


def exact_posterior_grid(y, spec, prior, bounds, num=101):
    """Unnormalised log posterior on a regular grid, normalised to weights.

    ``bounds`` is a list of ``(lo, hi)`` per coordinate; ``num`` is the
    number of points per coordinate (int or list).
    """
    if len(bounds) != spec.dim:
        raise OracleError("need one (lo, hi) pair per model term")
    nums = [num] * spec.dim if np.isscalar(num) else list(num)
    axes = [np.linspace(lo, hi, k) for (lo, hi), k in zip(bounds, nums)]
    grid = np.array(list(itertools.product(*axes)))
    s = compute_stats(y, spec)
    log_z = np.concatenate([exact_log_z(y.n, spec, chunk, y.attributes)
                            for chunk in np.array_split(grid, max(1, grid.shape[0] // 20000))])
    log_post = grid @ s - log_z + prior.logpdf(grid)
    weights = np.exp(log_post - logsumexp(log_post))
    return ExactPosteriorGrid(grid, log_post, weights, [tuple(b) for b in bounds])
