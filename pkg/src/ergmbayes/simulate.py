"""Approximate ERGM draws by Metropolis-Hastings dyad toggling."""

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .terms import EncodedSpec, ModelError, NetworkState, compute_stats

PROPOSALS = {"uniform": K.PROPOSAL_UNIFORM, "tnt": K.PROPOSAL_TNT}


@dataclass
class SimControl:
    aux_iters: int = 20000
    thin: int = 1000
    seed: int = None
    proposal: str = "uniform"

    def __post_init__(self):
        if self.aux_iters < 1 or self.thin < 1:
            raise ValueError("aux_iters and thin must be positive")
        if self.proposal not in PROPOSALS:
            raise ValueError("proposal must be one of %s" % sorted(PROPOSALS))


def as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class NetworkSimulator:
    """Reusable sampler started from a fixed network ``g0``.

    The starting state and its statistics are computed once, so repeated
    simulations from the same warm start (as in the exchange algorithm) only
    pay for copying the state arrays.
    """

    def __init__(self, g0, spec, proposal="uniform"):
        if proposal not in PROPOSALS:
            raise ValueError("proposal must be one of %s" % sorted(PROPOSALS))
        self.g0 = g0
        self.spec = spec
        self.encoded = EncodedSpec(spec, g0)
        self.state0 = NetworkState(g0)
        self.stats0 = compute_stats(g0, spec)
        self.proposal = PROPOSALS[proposal]

    def chain(self, theta, rng):
        return Chain(self, theta, rng)

    def simulate(self, theta, aux_iters, rng):
        """Run one chain for ``aux_iters`` steps; returns the final ``Chain``."""
        ch = self.chain(theta, rng)
        ch.run(aux_iters)
        return ch

    def simulate_stats(self, theta, nsim, burn_in, thin, rng):
        ch = self.chain(theta, rng)
        ch.run(burn_in)
        out = np.empty((nsim, self.spec.dim))
        for r in range(nsim):
            if r:
                ch.run(thin)
            out[r] = ch.stats
        return out


class Chain:
    """One Metropolis chain over networks, owning a private state copy."""

    def __init__(self, sim, theta, rng):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (sim.spec.dim,):
            raise ModelError("theta has %d entries, model has %d terms"
                             % (theta.size, sim.spec.dim))
        self.sim = sim
        self.theta = theta
        self.rng = as_rng(rng)
        self.state = sim.state0.copy()
        self.stats = sim.stats0.copy()
        self.accepted = 0
        self.steps = 0

    def run(self, steps):
        if steps <= 0:
            return self
        s = self.state
        uniforms = self.rng.random((steps, 4))
        self.accepted += K.metropolis(
            s.adj, s.deg, s.nbr, s.npos, s.elist, s.epos, s.m, self.stats, self.theta,
            *self.sim.encoded.arrays, uniforms, self.sim.proposal)
        self.steps += steps
        return self

    def graph(self):
        return self.state.to_graph(attributes=self.sim.g0.attributes)


def simulate_network(g0, spec, theta, control=None):
    """Network after ``control.aux_iters`` Metropolis steps started from ``g0``."""
    control = control or SimControl()
    sim = NetworkSimulator(g0, spec, control.proposal)
    return sim.simulate(theta, control.aux_iters, as_rng(control.seed)).graph()


def simulate_stats(g0, spec, theta, nsim, control=None):
    """``nsim`` x d matrix of statistics: an ``aux_iters`` burn-in from ``g0``,
    then one row every ``control.thin`` steps."""
    control = control or SimControl()
    if nsim < 1:
        raise ValueError("nsim must be positive")
    sim = NetworkSimulator(g0, spec, control.proposal)
    return sim.simulate_stats(theta, nsim, control.aux_iters, control.thin,
                              as_rng(control.seed))
