import math

import numpy as np
import pytest
from scipy import stats

from ergmbayes.exact import exact_posterior_grid
from ergmbayes.exchange import (ExchangeControl, ads_propose, exchange_log_alpha,
                                run_exchange)
from ergmbayes.formula import parse_formula
from ergmbayes.graph import from_edge_list
from ergmbayes.prior import PriorSpec

EDGES = parse_formula("edges")
FLAT = PriorSpec(np.zeros(2), np.eye(2) * 1e12)


def test_ads_zero_direction():
    states = np.tile([0.3, -1.2], (4, 1))
    out = ads_propose(states, 2, 0.6, np.zeros(2), np.random.default_rng(0))
    np.testing.assert_array_equal(out, [0.3, -1.2])


def test_ads_arithmetic():
    states = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])

    class Fixed:
        def choice(self, k, size, replace):
            return np.array([0, 1])

    out = ads_propose(states, 0, 0.6, np.zeros(2), Fixed())
    np.testing.assert_allclose(out, [0.6, -0.6])


def test_ads_needs_three_chains():
    with pytest.raises(ValueError):
        ads_propose(np.zeros((2, 1)), 0, 0.6, np.zeros(1), np.random.default_rng())
    with pytest.raises(ValueError):
        ExchangeControl(nchains=2)


def test_ads_helper_pairs_uniform():
    # one-hot states make the helper pair readable from the proposal
    k, h = 5, 1
    states = np.eye(k)
    rng = np.random.default_rng(11)
    counts = {}
    for _ in range(100_000):
        diff = ads_propose(states, h, 1.0, np.zeros(k), rng) - states[h]
        pair = (int(np.argmax(diff)), int(np.argmin(diff)))
        counts[pair] = counts.get(pair, 0) + 1
    expected_pairs = {(a, b) for a in range(k) for b in range(k) if len({a, b, h}) == 3}
    assert set(counts) == expected_pairs
    obs = np.array([counts[p] for p in sorted(expected_pairs)])
    assert stats.chisquare(obs).pvalue > 1e-3


def test_log_alpha_examples():
    assert exchange_log_alpha([1, 0], [0, 1], [3, 2], [4, 4], FLAT) == pytest.approx(-1.0)
    std = PriorSpec.isotropic(2, sd=1.0)
    assert exchange_log_alpha([2, 0], [0, 0], [1, 1], [1, 1], std) == 0.0
    theta = [0.4, -2.0]
    assert exchange_log_alpha(theta, theta, [5, 3], [9, 1], std) == 0.0


def test_log_alpha_dimension_mismatch():
    with pytest.raises(ValueError):
        exchange_log_alpha([0, 0], [0], [1, 1], [1, 1], FLAT)


def raw_log_ratio(theta, theta_p, s_obs, s_sim, prior):
    theta, theta_p, s_obs, s_sim = map(np.asarray, (theta, theta_p, s_obs, s_sim))
    return (theta - theta_p) @ (s_sim - s_obs) + prior.logpdf(theta_p) - prior.logpdf(theta)


def test_log_alpha_antisymmetry():
    rng = np.random.default_rng(3)
    prior = PriorSpec(np.array([0.5, -1.0]), np.array([[2.0, 0.3], [0.3, 1.0]]))
    for _ in range(200):
        a, b, s, t = rng.normal(size=(4, 2)) * 3
        fwd = raw_log_ratio(a, b, s, t, prior)
        # exchanging the two parameter values negates the ratio ...
        assert fwd + raw_log_ratio(b, a, s, t, prior) == pytest.approx(0.0, abs=1e-9)
        # ... while exchanging the statistics as well leaves the likelihood part unchanged
        assert (raw_log_ratio(b, a, t, s, prior) - fwd
                == pytest.approx(2 * (prior.logpdf(a) - prior.logpdf(b)), abs=1e-9))
        assert exchange_log_alpha(a, b, s, t, prior) == pytest.approx(min(0.0, fwd))


def test_forced_identical_proposals_always_accept(small_net):
    ctl = ExchangeControl(burn_in=0, main_iters=30, aux_iters=50, nchains=3, gamma=0.6,
                          sigma_epsilon=0.0, seed=5)
    init = np.tile([-0.2], (3, 1))
    post = run_exchange(small_net, EDGES, None, ctl, init=init)
    assert post.acceptance_rate == 1.0
    assert np.all(post.draws == -0.2)


def test_sample_shape_and_determinism(small_net):
    spec = parse_formula("edges + nodematch(a)")
    ctl = ExchangeControl(burn_in=5, main_iters=20, aux_iters=200, nchains=4, seed=42)
    a = run_exchange(small_net, spec, None, ctl)
    b = run_exchange(small_net, spec, None, ctl)
    assert a.draws.shape == (4, 20, 2)
    assert a.proposal_count == 80
    assert 0.0 <= a.acceptance_rate <= 1.0
    assert np.array_equal(a.draws, b.draws) and a.accept_count == b.accept_count
    assert a.labels == ["edges", "nodematch.a"]


def test_split_updates_match_with_threads(small_net):
    kw = dict(burn_in=5, main_iters=20, aux_iters=200, nchains=4, seed=8, update="split")
    one = run_exchange(small_net, EDGES, None, ExchangeControl(threads=1, **kw))
    two = run_exchange(small_net, EDGES, None, ExchangeControl(threads=3, **kw))
    assert np.array_equal(one.draws, two.draws)


def test_prior_dimension_checked(small_net):
    with pytest.raises(ValueError):
        run_exchange(small_net, EDGES, PriorSpec.isotropic(2), ExchangeControl(main_iters=1))


def edges_posterior_mean(m, seed):
    iu = list(zip(*np.triu_indices(5, 1)))
    y = from_edge_list(5, iu[:m])
    ctl = ExchangeControl(burn_in=200, main_iters=1500, aux_iters=500, nchains=3,
                          sigma_epsilon=0.3, seed=seed)
    prior = PriorSpec.isotropic(1, sd=10.0)
    post = run_exchange(y, EDGES, prior, ctl)
    grid = exact_posterior_grid(y, EDGES, prior, [(-10, 10)], num=801)
    return post.pooled().mean(), grid.mean()[0]


def test_edges_posterior_matches_oracle_and_is_monotone():
    means = []
    for m in (2, 5, 8):
        est, exact = edges_posterior_mean(m, seed=m)
        assert abs(est - exact) < 0.1
        means.append(exact)
    assert means[0] < means[1] < means[2]
    assert means[1] == pytest.approx(0.0, abs=1e-9)
