import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from censored_newsvendor.core import ActionGrid, CostParams, newsvendor_cost, observed_value
from censored_newsvendor.estimators import (ActionDistribution, Feedback, conditional_mean,
                                            estimate_costs, exploration_diagnostic,
                                            full_info_costs, tail_probability)


def dist(*p):
    return ActionDistribution(np.array(p, dtype=float))


class TestTailProbability:
    def test_examples(self):
        g = ActionGrid([1, 3], 5)
        assert tail_probability(dist(0.5, 0.5), g, 3) == 0.5
        assert tail_probability(dist(0.5, 0.5), g, 1) == 1.0
        assert tail_probability(dist(0.2, 0.3, 0.5), ActionGrid([0, 1, 2], 2), 1) == pytest.approx(0.8)

    def test_zero_tail_is_fatal(self):
        with pytest.raises(FloatingPointError):
            tail_probability(dist(1.0, 0.0), ActionGrid([1, 3], 5), 3)


def test_distribution_must_sum_to_one():
    with pytest.raises(ValueError):
        dist(0.5, 0.6)


class TestFeedback:
    def test_modes(self):
        fb = Feedback.from_demand(3, 5, "partially-censored")
        assert fb.sales == 3 and fb.lost_sales_indicator is False and fb.true_demand is None
        fb = Feedback.from_demand(3, 2, "full")
        assert fb.sales == 2 and fb.lost_sales_indicator is True and fb.true_demand == 2

    def test_inconsistent(self):
        with pytest.raises(ValueError):
            Feedback(3, 4)
        with pytest.raises(ValueError):
            Feedback(3, 2, true_demand=3)


class TestEstimateCosts:
    p = CostParams(1, 2, 5)
    g = ActionGrid([1, 3], 5)

    def test_worked_example(self):
        est = estimate_costs(Feedback(3, 2), dist(0.5, 0.5), self.g, self.p)
        # hand evaluation: (1 - 3*1 + 10)/1 and (3 - 3*2 + 10)/0.5
        assert est == pytest.approx([8.0, 14.0])
        # expectation of the top-level estimate: 0.5 * 14 = 7 = v_3 S_3 e_2 + beta
        assert 0.5 * est[1] == conditional_mean(3, 2, self.p) == 7

    def test_unseen_levels_are_zero(self):
        est = estimate_costs(Feedback(1, 1), dist(0.5, 0.5), self.g, self.p)
        assert est[1] == 0.0

    def test_single_zero_level(self):
        est = estimate_costs(Feedback(0, 0), dist(1.0), ActionGrid([0], 2), CostParams(1, 1, 2))
        assert est[0] == 2.0


@pytest.mark.parametrize("i,d,expected", [(3, 2, 7), (0, 0, 10), (1, 5, 8)])
def test_conditional_mean(i, d, expected):
    assert conditional_mean(i, d, CostParams(1, 2, 5)) == expected


def test_full_info_costs():
    assert list(full_info_costs(2, ActionGrid([1, 3], 5), CostParams(1, 2, 5))) == [2, 1]
    assert list(full_info_costs(4, ActionGrid([4], 5), CostParams(1, 2, 5))) == [0]
    assert list(full_info_costs(1, ActionGrid([0, 1, 2], 2), CostParams(1, 1, 2))) == [1, 0, 1]


def random_instance(rng, max_n=31):
    D = int(rng.integers(1, 40))
    N = int(rng.integers(1, min(max_n, D + 1) + 1))
    levels = np.sort(rng.choice(D + 1, size=N, replace=False))
    grid = ActionGrid(levels, D)
    gamma = float(rng.uniform(0.01, 1.0))
    w = rng.exponential(size=N) ** 3
    probs = (1 - gamma) * w / w.sum() + gamma / N
    p = CostParams(float(rng.uniform(0.1, 5)), float(rng.uniform(0.1, 5)), D)
    return grid, ActionDistribution(probs, gamma / N), p, int(rng.integers(0, D + 1))


def enumerate_estimates(grid, dist, p, d):
    """Every realization of the chosen level with its probability and the estimate it produces."""
    for n, level in enumerate(grid.levels):
        fb = Feedback.from_demand(level, d)
        yield dist.probabilities[n], estimate_costs(fb, dist, grid, p)


def test_unbiasedness_by_enumeration():
    rng = np.random.default_rng(7)
    for _ in range(200):
        grid, dd, p, d = random_instance(rng)
        outcomes = list(enumerate_estimates(grid, dd, p, d))
        mean = sum(w * e for w, e in outcomes)
        second = sum(w * e ** 2 for w, e in outcomes)
        for n, i in enumerate(grid.levels):
            assert mean[n] == pytest.approx(conditional_mean(i, d, p), abs=1e-9)
            assert -1e-9 <= mean[n] <= 2 * p.beta + 1e-9
            # the ends are reached only by the top level at the cap: demand D with b >= h gives 0,
            # demand 0 with h >= b gives 2 beta
            if i < p.D:
                assert 1e-12 < mean[n] < 2 * p.beta - 1e-12
            assert second[n] <= 4 * p.beta ** 2 / tail_probability(dd, grid, i) + 1e-9
        for a, i in enumerate(grid.levels):
            for b_, j in enumerate(grid.levels):
                diff = newsvendor_cost(i, d, p) - newsvendor_cost(j, d, p)
                assert mean[a] - mean[b_] == pytest.approx(diff, abs=1e-9)


@settings(max_examples=60)
@given(st.integers(0, 2 ** 32 - 1))
def test_estimates_depend_only_on_sales(seed):
    rng = np.random.default_rng(seed)
    grid, dd, p, _ = random_instance(rng)
    level = int(rng.choice(grid.levels))
    # every demand that produces sales == level yields the same estimate
    ref = estimate_costs(Feedback.from_demand(level, level), dd, grid, p)
    assert np.all(ref >= 0)
    for d in range(level, p.D + 1):
        fb = Feedback.from_demand(level, d, "full")
        assert np.array_equal(estimate_costs(fb, dd, grid, p), ref)


def test_exploration_diagnostic_uniform():
    # uniform over N: sum_k (1/N) / ((N-k)/N) = harmonic number
    probs = np.full(5, 0.2)
    assert exploration_diagnostic(probs) == pytest.approx(sum(1 / k for k in range(1, 6)))


def test_estimates_nonnegative_even_at_extremes():
    p = CostParams(7, 0.5, 30)
    grid = ActionGrid.span(0, 30)
    probs = np.full(31, 1e-9)
    probs[0] = 1 - probs[1:].sum()
    for level in (0, 15, 30):
        for d in (0, 15, 30):
            est = estimate_costs(Feedback.from_demand(level, d), ActionDistribution(probs), grid, p)
            assert np.all(est >= 0) and np.all(np.isfinite(est))
            expected_top = (observed_value(level, min(level, d), p) + p.beta) / probs[grid.index(level):].sum()
            assert est[grid.index(level)] == pytest.approx(expected_top)
