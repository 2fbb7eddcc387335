import math

import numpy as np
import pytest

from ergmbayes.formula import parse_formula
from ergmbayes.graph import from_edge_list
from ergmbayes.simulate import NetworkSimulator, SimControl, simulate_network, simulate_stats
from ergmbayes.terms import ModelError, compute_stats

from conftest import random_graph

EDGES = parse_formula("edges")


def binomial_check(n, theta, seed):
    ndy = n * (n - 1) // 2
    p = 1 / (1 + math.exp(-theta))
    ctl = SimControl(aux_iters=2000, thin=200, seed=seed)
    s = simulate_stats(from_edge_list(n, []), EDGES, [theta], 2000, ctl)[:, 0]
    se = math.sqrt(ndy * p * (1 - p) / len(s))
    return s.mean(), ndy * p, se


def test_half_density_edges():
    mean, expect, se = binomial_check(8, 0.0, seed=1)
    assert expect == 14
    assert abs(mean - expect) < 3 * se


def test_sparse_edges():
    mean, expect, se = binomial_check(10, math.log(0.1 / 0.9), seed=2)
    assert expect == pytest.approx(4.5)
    assert abs(mean - expect) < 3 * se


def test_single_draw_matches_network(small_net):
    spec = parse_formula("edges + triangle")
    ctl = SimControl(aux_iters=500, seed=7)
    stats = simulate_stats(small_net, spec, [-0.5, 0.2], 1, ctl)
    g = simulate_network(small_net, spec, [-0.5, 0.2], ctl)
    assert stats.shape == (1, 2)
    np.testing.assert_allclose(stats[0], compute_stats(g, spec))


def test_output_shape_and_determinism(small_net):
    spec = parse_formula("edges + nodematch(a) + gwesp(0.3)")
    ctl = SimControl(aux_iters=300, thin=10, seed=99)
    a = simulate_stats(small_net, spec, [-1, 0.5, 0.2], 25, ctl)
    b = simulate_stats(small_net, spec, [-1, 0.5, 0.2], 25, ctl)
    assert a.shape == (25, 3)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("proposal", ["uniform", "tnt"])
def test_tracked_stats_stay_exact(proposal, rng):
    spec = parse_formula("edges + nodematch(a) + gwdegree(0.4) + gwesp(0.25) + triangle + kstar(2)")
    g0 = random_graph(12, 20, rng, attributes={"a": rng.integers(0, 3, 12)})
    ch = NetworkSimulator(g0, spec, proposal).chain([-1.5, 0.6, -0.3, 0.4, 0.1, -0.05], rng)
    for _ in range(10):
        ch.run(500)
        np.testing.assert_allclose(ch.stats, compute_stats(ch.graph(), spec), atol=1e-8)
    assert ch.steps == 5000
    assert 0 < ch.accepted < ch.steps


def test_tnt_agrees_with_uniform():
    spec = parse_formula("edges + triangle")
    g0 = from_edge_list(8, [])
    theta = [-1.8, 0.4]
    means = []
    for proposal, seed in (("uniform", 3), ("tnt", 4)):
        ctl = SimControl(aux_iters=2000, thin=100, seed=seed, proposal=proposal)
        means.append(simulate_stats(g0, spec, theta, 3000, ctl).mean(axis=0))
    np.testing.assert_allclose(means[0], means[1], atol=0.25)


def test_bad_inputs(small_net):
    with pytest.raises(ModelError):
        simulate_stats(small_net, EDGES, [0.0, 1.0], 3)
    with pytest.raises(ValueError):
        SimControl(proposal="gibbs")
    with pytest.raises(ValueError):
        simulate_stats(small_net, EDGES, [0.0], 0)
