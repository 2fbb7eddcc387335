"""Approximate exchange algorithm with parallel adaptive-direction proposals.

Each chain proposes theta' = theta_h + gamma (theta_h1 - theta_h2) + jitter
from two other chains, simulates an auxiliary network y' at theta' and
accepts with the exchange ratio, in which every normalising constant cancels.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
import math
import time

import numpy as np

from .calibrate import NonEstimableError, PseudoLikelihood, fit_mple
from .prior import PriorSpec
from .simulate import NetworkSimulator

log = logging.getLogger(__name__)

UPDATE_MODES = ("sequential", "split")


@dataclass
class ExchangeControl:
    burn_in: int = 300
    main_iters: int = 2000
    aux_iters: int = 20000
    nchains: int = 6
    gamma: float = 0.6
    sigma_epsilon: float = 0.0125
    seed: int = None
    proposal: str = "uniform"
    update: str = "sequential"
    init_sd: float = 0.1
    threads: int = 1

    def __post_init__(self):
        if self.nchains < 3:
            raise ValueError("adaptive direction sampling needs at least 3 chains")
        if self.burn_in < 0 or self.main_iters < 1 or self.aux_iters < 1:
            raise ValueError("burn_in must be >= 0; main_iters and aux_iters >= 1")
        if self.gamma <= 0 or self.sigma_epsilon < 0:
            raise ValueError("gamma must be positive and sigma_epsilon nonnegative")
        if self.update not in UPDATE_MODES:
            raise ValueError("update must be one of %s" % (UPDATE_MODES,))
        if self.update == "split" and self.nchains < 4:
            raise ValueError("split updates need at least 4 chains")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class PosteriorSample:
    draws: np.ndarray
    accept_count: int
    proposal_count: int
    labels: list = None
    meta: dict = field(default_factory=dict)

    @property
    def acceptance_rate(self):
        return self.accept_count / self.proposal_count if self.proposal_count else float("nan")

    @property
    def nchains(self):
        return self.draws.shape[0]

    @property
    def dim(self):
        return self.draws.shape[2]

    def pooled(self):
        return self.draws.reshape(-1, self.draws.shape[2])


def ads_propose(states, h, gamma, jitter, rng, helpers=None):
    """theta_h + gamma (theta_h1 - theta_h2) + jitter for two distinct helper
    chains h1 != h2, both different from h, chosen uniformly.

    ``helpers`` restricts the helper pool (it must not contain ``h``).
    """
    states = np.asarray(states, dtype=float)
    k = states.shape[0]
    if k < 3:
        raise ValueError("adaptive direction sampling needs at least 3 chains")
    if not 0 <= h < k:
        raise IndexError("chain index %d out of range" % h)
    if helpers is None:
        a, b = rng.choice(k - 1, size=2, replace=False)
        h1 = a + (a >= h)
        h2 = b + (b >= h)
    else:
        h1, h2 = rng.choice(helpers, size=2, replace=False)
    return states[h] + gamma * (states[h1] - states[h2]) + jitter


def exchange_log_alpha(theta, theta_p, s_obs, s_sim, prior):
    """log acceptance probability min(0, (theta - theta')^T (s(y') - s(y))
    + log p(theta') - log p(theta))."""
    theta, theta_p, s_obs, s_sim = (np.asarray(v, dtype=float)
                                    for v in (theta, theta_p, s_obs, s_sim))
    if not (theta.shape == theta_p.shape == s_obs.shape == s_sim.shape):
        raise ValueError("dimension mismatch in exchange ratio")
    with np.errstate(all="ignore"):
        val = float((theta - theta_p) @ (s_sim - s_obs)
                    + prior.logpdf(theta_p) - prior.logpdf(theta))
    if math.isnan(val):
        return -math.inf
    return min(0.0, val)


def initial_states(y, spec, prior, control, rng):
    """Chains start around the MPLE (prior mean if it does not exist)."""
    try:
        centre = fit_mple(y, spec, PseudoLikelihood(y, spec))
    except NonEstimableError:
        centre = prior.mean.copy()
    return centre + control.init_sd * rng.standard_normal((control.nchains, spec.dim))


def run_exchange(y, spec, prior=None, control=None, init=None):
    """Sample p(theta | y) with the approximate exchange algorithm.

    Returns a ``PosteriorSample`` whose ``draws`` array has shape
    (nchains, main_iters, d). Acceptance is counted per proposal over the
    retained sweeps.
    """
    control = control or ExchangeControl()
    prior = prior or PriorSpec.isotropic(spec.dim)
    if prior.dim != spec.dim:
        raise ValueError("prior has dimension %d, model has %d" % (prior.dim, spec.dim))
    ss = np.random.SeedSequence(control.seed)
    init_seed, *chain_seeds = ss.spawn(control.nchains + 1)
    rngs = [np.random.default_rng(s) for s in chain_seeds]
    sim = NetworkSimulator(y, spec, control.proposal)
    s_obs = sim.stats0
    if init is None:
        theta = initial_states(y, spec, prior, control, np.random.default_rng(init_seed))
    else:
        theta = np.array(init, dtype=float).reshape(control.nchains, spec.dim)
    d = spec.dim
    draws = np.empty((control.nchains, control.main_iters, d))
    accepted = proposed = 0
    pool = ThreadPoolExecutor(control.threads) if (
        control.threads > 1 and control.update == "split") else None
    half = control.nchains // 2
    groups = (np.arange(half), np.arange(half, control.nchains))

    def update(h, helpers=None):
        rng = rngs[h]
        jitter = control.sigma_epsilon * rng.standard_normal(d)
        prop = ads_propose(theta, h, control.gamma, jitter, rng, helpers)
        logu = math.log(rng.random())
        if not np.all(np.isfinite(prop)):
            return theta[h], False
        s_sim = sim.simulate(prop, control.aux_iters, rng).stats
        if logu < exchange_log_alpha(theta[h], prop, s_obs, s_sim, prior):
            return prop, True
        return theta[h], False

    t0 = time.perf_counter()
    try:
        for sweep in range(control.burn_in + control.main_iters):
            keep = sweep >= control.burn_in
            results = []
            if control.update == "sequential":
                for h in range(control.nchains):
                    new, ok = update(h)
                    theta[h] = new
                    results.append(ok)
            else:
                # each half moves with helpers from the other, frozen, half
                for group, other in (groups, groups[::-1]):
                    if pool is None:
                        out = [update(h, other) for h in group]
                    else:
                        out = list(pool.map(lambda h: update(h, other), group))
                    for h, (new, ok) in zip(group, out):
                        theta[h] = new
                        results.append(ok)
            if keep:
                draws[:, sweep - control.burn_in] = theta
                accepted += sum(results)
                proposed += control.nchains
    finally:
        if pool is not None:
            pool.shutdown()
    elapsed = time.perf_counter() - t0
    log.info("exchange sampler: %d sweeps in %.1f s, acceptance %.3f",
             control.burn_in + control.main_iters, elapsed, accepted / max(proposed, 1))
    return PosteriorSample(draws, accepted, proposed, spec.labels, {"elapsed": elapsed})
