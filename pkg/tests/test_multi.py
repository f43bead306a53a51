import itertools

import numpy as np
import pytest

from censored_newsvendor.core import ActionGrid, CostParams
from censored_newsvendor.estimators import censored_estimates
from censored_newsvendor.multi import (AllocationSpace, ChainParams, CombinatorialEWF,
                                       allocation_cost, best_fixed_allocation, chain_regret,
                                       conditional_allocation_mean, enumerate_allocations,
                                       estimate_allocation_costs, exploration_pmf, marginal_tail,
                                       marginal_tails, retailer_cost, run_chain,
                                       second_moment_bound, theorem3_parameters, warehouse_cost)


def chain(levels=(0, 1, 2), D=2, r=3, K=2, f=None, h=None, b=None, f0=1.0, h0=0.5, **kw):
    return ChainParams(ActionGrid(levels, D), r, f or [0.0] * K, h or [1.0] * K, b or [1.0] * K,
                       f0, h0, **kw)


class TestCosts:
    def test_retailer_cost(self):
        c = chain(D=5, r=5, f=[5, 5], h=[1, 1], b=[2, 2])
        assert retailer_cost(0, 0, 0, c) == 0
        assert retailer_cost(0, 2, 0, c) == 7
        assert retailer_cost(1, 1, 3, c) == 9

    def test_warehouse_cost(self):
        c = chain(levels=(0, 1, 2), D=4, r=4, f0=1.0, h0=0.5)
        assert warehouse_cost((0, 0), c) == 3
        assert warehouse_cost((2, 2), c) == 1
        pull = chain(levels=(0, 1, 2), D=4, r=4, f0=1.0, h0=0.5, pull=True)
        assert warehouse_cost((0, 0), pull) == 0 and warehouse_cost((1, 0), pull) == 1

    def test_allocation_cost_sums_parts(self):
        c = chain(f=[1, 2], h=[1, 3], b=[2, 1])
        assert allocation_cost((1, 2), (0, 2), c) == warehouse_cost((1, 2), c) + (1 + 1) + (2 + 0)


class TestSpace:
    def test_enumeration(self):
        c = chain()
        lv = AllocationSpace(c).levels
        expected = [a for a in itertools.product(range(3), repeat=2) if sum(a) <= 3]
        assert [tuple(x) for x in lv] == expected

    def test_cap(self):
        with pytest.raises(ValueError, match="allocations"):
            enumerate_allocations(chain(cap=5))

    def test_replenishment_must_cover_exploration(self):
        with pytest.raises(ValueError):
            chain(r=1)
        with pytest.raises(ValueError):
            chain(levels=(1, 2), r=2)  # fill level 1 plus top level 2 exceeds r

    def test_exploration_pmf_example(self):
        c = chain(levels=(0, 1), D=1, r=2)
        sp = AllocationSpace(c)
        mu = exploration_pmf(c, sp)
        assert mu[sp.position((0, 0))] == 0.5
        assert mu[sp.position((1, 0))] == 0.25 and mu[sp.position((0, 1))] == 0.25
        assert mu[sp.position((1, 1))] == 0

    def test_exploration_single_retailer_uniform(self):
        c = chain(levels=(0, 2, 3), D=3, r=3, K=1)
        assert np.allclose(exploration_pmf(c), 1 / 3)

    def test_exploration_without_zero_level(self):
        c = chain(levels=(1, 2), D=2, r=3)
        sp = AllocationSpace(c)
        mu = exploration_pmf(c, sp)
        assert mu.sum() == pytest.approx(1)
        assert mu[sp.position((1, 1))] == pytest.approx(0.5)

    def test_marginal_tail_pure_exploration(self):
        c = chain(levels=(0, 1), D=1, r=2)
        sp = AllocationSpace(c)
        mu = exploration_pmf(c, sp)
        assert marginal_tail(mu, sp, 0, 1) == pytest.approx(0.25)
        assert marginal_tail(mu, sp, 0, 0) == pytest.approx(1.0)
        tails = marginal_tails(mu, sp)
        assert np.all(np.diff(tails, axis=-1) <= 1e-15)


def test_theorem3_parameters():
    g, e = theorem3_parameters(1000, 4, 2, 8)
    assert g == pytest.approx(0.001) and e > 0


def random_distribution(rng, space, gamma):
    w = rng.exponential(size=space.A) ** 3
    return (1 - gamma) * w / w.sum() + gamma * space.exploration_pmf()


def exact_expectations(space, probs, demands):
    """First and second moments of every allocation's estimate over the policy's own draw."""
    chosen = space.levels
    sales = np.minimum(chosen, np.asarray(demands)[None, :])
    est = estimate_allocation_costs(chosen, sales, np.broadcast_to(probs, (space.A, space.A)), space)
    return probs @ est, probs @ est ** 2


def random_chain(rng):
    h = rng.uniform(0.2, 3, 2)
    b = rng.uniform(0.2, 3, 2)
    f = rng.uniform(0, 2, 2)
    return chain(f=list(f), h=list(h), b=list(b), f0=float(rng.uniform(0, 2)), h0=float(rng.uniform(0.2, 3)))


def test_difference_unbiasedness_and_bounds():
    rng = np.random.default_rng(0)
    for _ in range(100):
        c = random_chain(rng)
        sp = AllocationSpace(c)
        gamma = float(rng.uniform(0.01, 1))
        p = random_distribution(rng, sp, gamma)
        d = rng.integers(0, c.D + 1, 2)
        mean, second = exact_expectations(sp, p, d)
        true = sp.costs(d[None, :])[0]
        diff_err = np.abs((mean[:, None] - mean[None, :]) - (true[:, None] - true[None, :])).max()
        assert diff_err <= 1e-9
        assert np.allclose(mean, conditional_allocation_mean(sp, d), atol=1e-9)
        f = c.f_max
        assert mean.min() >= -1e-9 and mean.max() <= f + c.K * (2 * c.beta + f) + 1e-9
        assert p @ second <= second_moment_bound(c.K, c.grid.N, c.beta, f, gamma)


def test_small_instance_example():
    c = chain(levels=(0, 1), D=1, r=2)
    sp = AllocationSpace(c)
    p = random_distribution(np.random.default_rng(1), sp, 0.3)
    for d in itertools.product(range(2), repeat=2):
        mean, _ = exact_expectations(sp, p, d)
        true = sp.costs(np.array(d)[None, :])[0]
        for a, a2 in itertools.combinations(range(sp.A), 2):
            assert mean[a] - mean[a2] == pytest.approx(true[a] - true[a2], abs=1e-12)


def test_single_retailer_reduces_to_censored_estimator():
    grid = ActionGrid([0, 1, 3], 3)
    c = ChainParams(grid, 3, [0.0], [2.0], [1.0], 0.0, 1e-9, pull=True)
    sp = AllocationSpace(c)
    p = np.array([0.2, 0.5, 0.3])
    for lv in grid:
        for d in range(4):
            est = estimate_allocation_costs(np.array([[lv]]), np.array([[min(lv, d)]]), p[None], sp)[0]
            ref = censored_estimates(grid.array, np.array([lv]), np.array([min(lv, d)]), p[None],
                                     CostParams(2.0, 1.0, 3))[0]
            # warehouse cost is f0 1{sum>0} = 0 here
            assert np.allclose(est, ref)


def test_unobserved_allocation_gets_warehouse_cost():
    c = chain()
    sp = AllocationSpace(c)
    p = np.full(sp.A, 1 / sp.A)
    est = estimate_allocation_costs(np.array([[0, 0]]), np.array([[0, 0]]), p[None], sp)[0]
    a = sp.position((1, 2))
    assert est[a] == pytest.approx(sp.warehouse[a])


def test_initial_distribution_and_marginal_floor():
    c = chain()
    pol = CombinatorialEWF(c, 100, gamma=0.2).reset([0])
    p = pol.next_distribution()[0]
    assert np.allclose(p, 0.8 / pol.space.A + 0.2 * pol.mu)
    marg = np.einsum("a,kan->kn", p, pol.space.onehot)
    assert marg.min() >= 0.2 / (c.grid.N * c.K) - 1e-15


def test_policy_shift_invariance():
    c = chain()
    a = CombinatorialEWF(c, 100, gamma=0.1, eta=0.3).reset([0])
    b = CombinatorialEWF(c, 100, gamma=0.1, eta=0.3).reset([0])
    a.next_distribution()
    b.next_distribution()
    a.log_weights = a.log_weights - 0.3 * np.arange(a.space.A)
    b.log_weights = b.log_weights - 0.3 * (np.arange(b.space.A) + 7.0)
    assert np.allclose(a.next_distribution(), b.next_distribution())


def test_run_chain_records_costs_and_regret():
    c = chain()
    pol = CombinatorialEWF(c, 200)
    d = np.ones((2, 200, 2), dtype=np.int64)
    recs = run_chain(pol, d, [1, 2])
    sp = pol.space
    for rec in recs:
        lv = sp.levels[rec.allocations]
        assert np.allclose(rec.costs, allocation_cost(lv, rec.demands, c))
    best, curve = best_fixed_allocation(d[0], sp)
    brute = min(itertools.product((0, 1, 2), repeat=2),
                key=lambda a: (allocation_cost(a, (1, 1), c) if sum(a) <= 3 else np.inf))
    assert allocation_cost(best, (1, 1), c) == allocation_cost(brute, (1, 1), c)
    assert chain_regret(recs[0], sp)[-1] >= 0
    again = run_chain(CombinatorialEWF(c, 200), d[1:], [2])
    assert np.array_equal(again[0].allocations, recs[1].allocations)
