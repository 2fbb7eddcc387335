"""Pseudolikelihood inference and affine calibration of pseudo-posterior draws.

The pseudolikelihood treats every dyad as a logistic regression on its change
statistics. Draws from the resulting pseudo-posterior are moved by an affine
map so that their mode and curvature match a stochastic-approximation
estimate of the true posterior's MAP and Hessian.
"""

from dataclasses import dataclass, field
import logging
import warnings

import numpy as np
from scipy.special import expit

from .simulate import NetworkSimulator, as_rng
from .terms import EncodedSpec, ModelError, dyad_design

log = logging.getLogger(__name__)


class NonEstimableError(ModelError):
    """The maximum pseudolikelihood estimate does not exist (separation)."""


class CalibrationError(ValueError):
    pass


class ConvergenceWarning(UserWarning):
    pass


def _log1pexp(eta):
    return np.where(eta > 0, eta + np.log1p(np.exp(-np.abs(eta))), np.log1p(np.exp(eta)))


class PseudoLikelihood:
    """Logistic pseudolikelihood of ``y``, with the dyad design compressed to
    unique (change-statistic row, edge indicator) pairs."""

    def __init__(self, y, spec):
        self.spec = spec
        x, ind = dyad_design(y, spec, EncodedSpec(spec, y))
        rows, inverse = np.unique(x, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        self.x = rows
        self.n_dyads = np.bincount(inverse, minlength=rows.shape[0]).astype(float)
        self.n_edges = np.bincount(inverse, weights=ind, minlength=rows.shape[0])

    def loglik(self, theta):
        eta = self.x @ np.asarray(theta, dtype=float)
        return float(self.n_edges @ eta - self.n_dyads @ _log1pexp(eta))

    def grad(self, theta):
        p = expit(self.x @ np.asarray(theta, dtype=float))
        return self.x.T @ (self.n_edges - self.n_dyads * p)

    def hessian(self, theta):
        p = expit(self.x @ np.asarray(theta, dtype=float))
        w = self.n_dyads * p * (1 - p)
        return -(self.x.T * w) @ self.x


def pseudo_loglik(y, spec, theta):
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.dim,):
        raise ModelError("theta has %d entries, model has %d terms" % (theta.size, spec.dim))
    return PseudoLikelihood(y, spec).loglik(theta)


def _newton(f, grad, hess, theta0, tol=1e-8, max_iter=200, max_norm=1e3):
    theta = np.array(theta0, dtype=float)
    fval = f(theta)
    for _ in range(max_iter):
        g = grad(theta)
        if np.linalg.norm(g) < tol:
            return theta, g
        h = hess(theta)
        try:
            step = np.linalg.solve(h, -g)
        except np.linalg.LinAlgError:
            raise NonEstimableError("singular Hessian: model terms are collinear on this network")
        t = 1.0
        while True:
            cand = theta + t * step
            fc = f(cand)
            if fc >= fval - 1e-12 * abs(fval) or t < 1e-10:
                break
            t /= 2
        theta, fval = cand, fc
        if not np.all(np.isfinite(theta)) or np.linalg.norm(theta) > max_norm:
            break
    g = grad(theta)
    if np.linalg.norm(g) < tol:
        return theta, g
    raise NonEstimableError(
        "Newton iterations did not converge (|grad| = %.3g, |theta| = %.3g); the estimate "
        "probably does not exist because of separation" % (np.linalg.norm(g), np.linalg.norm(theta)))


def fit_mple(y, spec, pl=None):
    """Maximum pseudolikelihood estimate by Newton's method."""
    pl = pl or PseudoLikelihood(y, spec)
    if pl.n_edges.sum() == 0 or pl.n_edges.sum() == pl.n_dyads.sum():
        raise NonEstimableError("empty or complete network: the pseudolikelihood has no maximum")
    if np.linalg.matrix_rank(pl.x) < spec.dim:
        raise NonEstimableError("change statistics are collinear on this network")
    theta, _ = _newton(pl.loglik, pl.grad, pl.hessian, np.zeros(spec.dim))
    # with separation the gradient can underflow on the way to infinity
    p = expit(pl.x @ theta)
    if np.any(p * (1 - p) < 1e-8):
        raise NonEstimableError("fitted dyad probabilities reach 0 or 1: the change statistics "
                                "separate edges from non-edges")
    return theta


@dataclass
class PseudoFit:
    theta_pl: np.ndarray
    hessian_pl: np.ndarray


def fit_pseudo_posterior_mode(y, spec, prior, pl=None):
    """Mode and Hessian of log pseudolikelihood + log prior, started at the MPLE."""
    pl = pl or PseudoLikelihood(y, spec)
    try:
        start = fit_mple(y, spec, pl)
    except NonEstimableError:
        start = prior.mean.copy()
    theta, _ = _newton(lambda t: pl.loglik(t) + prior.logpdf(t),
                       lambda t: pl.grad(t) + prior.grad(t),
                       lambda t: pl.hessian(t) + prior.hessian(),
                       start)
    return PseudoFit(theta, pl.hessian(theta) + prior.hessian())


def sample_pseudo_posterior(y, spec, prior, mcmc, seed=None, pl=None, fit=None):
    """Random-walk Metropolis on the pseudo-posterior.

    Proposal covariance is (2.38^2 / d) times the inverse negative Hessian at
    the mode; ``mcmc // 10`` burn-in steps are discarded. Returns
    ``(draws, accepted)`` with ``draws`` of shape (mcmc, d).
    """
    pl = pl or PseudoLikelihood(y, spec)
    fit = fit or fit_pseudo_posterior_mode(y, spec, prior, pl)
    rng = as_rng(seed)
    d = spec.dim
    chol = np.linalg.cholesky(np.linalg.inv(-fit.hessian_pl) * 2.38 ** 2 / d)
    burn = mcmc // 10

    def target(t):
        return pl.loglik(t) + prior.logpdf(t)

    theta = fit.theta_pl.copy()
    cur = target(theta)
    draws = np.empty((mcmc, d))
    accepted = 0
    steps = rng.standard_normal((burn + mcmc, d)) @ chol.T
    logu = np.log(rng.random(burn + mcmc))
    for t in range(burn + mcmc):
        prop = theta + steps[t]
        val = target(prop)
        if logu[t] < val - cur:
            theta, cur = prop, val
            if t >= burn:
                accepted += 1
        if t >= burn:
            draws[t - burn] = theta
    return draws, accepted


@dataclass
class CalibrateControl:
    iters: int = 1000
    aux_iters: int = 20000
    noisy_nsim: int = 100
    noisy_thin: int = 1000
    mcmc: int = 10000
    seed: int = None
    step_a0: float = 10.0
    step_t0: float = 10.0
    hessian_nsim: int = 1000
    proposal: str = "uniform"

    def __post_init__(self):
        for name in ("iters", "aux_iters", "noisy_nsim", "noisy_thin", "mcmc", "hessian_nsim"):
            if getattr(self, name) < 1:
                raise ValueError("%s must be positive" % name)
        if self.step_a0 <= 0 or self.step_t0 <= 0:
            raise ValueError("step-size constants must be positive")


def _lower_factor(n_mat):
    """Lower-triangular L with L L^T = inverse of the positive-definite ``n_mat``."""
    try:
        return np.linalg.cholesky(np.linalg.inv(n_mat))
    except np.linalg.LinAlgError:
        raise CalibrationError("negative Hessian is not positive definite") from None


@dataclass
class CalibrationMap:
    theta_map: np.ndarray
    hessian_map: np.ndarray
    theta_pl: np.ndarray
    hessian_pl: np.ndarray
    V: np.ndarray = None

    def __post_init__(self):
        if self.V is None:
            lm = _lower_factor(-self.hessian_map)
            lp = _lower_factor(-self.hessian_pl)
            self.V = lm @ np.linalg.inv(lp)


def calibrate_sample(draws, cmap):
    """Map pseudo-posterior draws through theta_map + V (theta - theta_pl)."""
    draws = np.asarray(draws, dtype=float)
    return cmap.theta_map + (draws - cmap.theta_pl) @ cmap.V.T


def _mean_zscores(g):
    g = np.asarray(g, dtype=float)
    if g.shape[0] < 2:
        return np.zeros(g.shape[1])
    se = g.std(axis=0, ddof=1) / np.sqrt(g.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, g.mean(axis=0) / se, 0.0)
    return z


@dataclass
class MapEstimate:
    theta_map: np.ndarray
    hessian_map: np.ndarray
    pseudo: PseudoFit
    trace: np.ndarray = field(repr=False)
    grad_norm: np.ndarray = field(repr=False)


def estimate_map_and_hessians(y, spec, prior, control=None, pl=None, rng=None):
    """Stochastic-approximation MAP of the true posterior plus both Hessians.

    Each iteration estimates the gradient s(y) - mean s(y') + grad log p(theta)
    from ``noisy_nsim`` simulated networks and takes a step preconditioned by
    the inverse negative pseudo-posterior Hessian. The returned MAP averages
    the second half of the iterates.
    """
    control = control or CalibrateControl()
    rng = as_rng(control.seed if rng is None else rng)
    pl = pl or PseudoLikelihood(y, spec)
    fit = fit_pseudo_posterior_mode(y, spec, prior, pl)
    sim = NetworkSimulator(y, spec, control.proposal)
    s_obs = sim.stats0
    precond = np.linalg.inv(-fit.hessian_pl)
    theta = fit.theta_pl.copy()
    trace = np.empty((control.iters, spec.dim))
    grad_norm = np.empty(control.iters)
    grads = np.empty((control.iters, spec.dim))
    for t in range(control.iters):
        sims = sim.simulate_stats(theta, control.noisy_nsim, control.aux_iters,
                                  control.noisy_thin, rng)
        g = s_obs - sims.mean(axis=0) + prior.grad(theta)
        step = control.step_a0 / (t + control.step_t0)
        theta = theta + step * (precond @ g)
        if not np.all(np.isfinite(theta)):
            raise CalibrationError("stochastic approximation diverged at iteration %d" % t)
        trace[t] = theta
        grads[t] = g
        grad_norm[t] = float(np.sqrt(g @ precond @ g))
    theta_map = trace[control.iters // 2:].mean(axis=0)

    window = max(2, control.iters // 10)
    z = _mean_zscores(grads[-window:])
    if np.max(np.abs(z)) > 4.0:
        warnings.warn("stochastic approximation may not have converged: over the last %d "
                      "iterations the mean gradient has z-scores %s"
                      % (window, np.array2string(z, precision=2)), ConvergenceWarning)

    sims = sim.simulate_stats(theta_map, control.hessian_nsim, control.aux_iters,
                              control.noisy_thin, rng)
    hessian_map = -np.cov(sims, rowvar=False).reshape(spec.dim, spec.dim) + prior.hessian()
    return MapEstimate(theta_map, hessian_map, fit, trace, grad_norm)


@dataclass
class CalibrationResult:
    draws: np.ndarray
    pseudo_draws: np.ndarray
    cmap: CalibrationMap
    estimate: MapEstimate
    accepted: int


def run_calibration(y, spec, prior, control=None):
    """Full pipeline: pseudo-posterior sample, MAP/Hessian estimate, calibration."""
    control = control or CalibrateControl()
    seeds = np.random.SeedSequence(control.seed).spawn(2)
    pl = PseudoLikelihood(y, spec)
    est = estimate_map_and_hessians(y, spec, prior, control, pl,
                                    rng=np.random.default_rng(seeds[0]))
    pseudo, accepted = sample_pseudo_posterior(y, spec, prior, control.mcmc,
                                               np.random.default_rng(seeds[1]), pl, est.pseudo)
    cmap = CalibrationMap(est.theta_map, est.hessian_map,
                          est.pseudo.theta_pl, est.pseudo.hessian_pl)
    log.info("calibration map V = %s", cmap.V.tolist())
    return CalibrationResult(calibrate_sample(pseudo, cmap), pseudo, cmap, est, accepted)
