# %% [markdown]
# What a retailer learns from sales alone.
#
# Stock 3 units, sell 2: demand was 2. Stock 3, sell 3: demand was 3 or more.
# The script walks through why that is still enough to compare any two stock levels.

# %%
import numpy as np

from censored_newsvendor import ActionGrid, CostParams, newsvendor_cost, observed_value
from censored_newsvendor.core import observation_vector, signal_matrix
from censored_newsvendor.estimators import ActionDistribution, Feedback, estimate_costs, tail_probability

p = CostParams(h=1, b=2, D=5)
print("holding h =", p.h, " lost sale b =", p.b, " max demand D =", p.D, " beta =", p.beta)

# %%
# The sales seen when stocking i are min(i, d). The signal matrix lumps every d >= i together.
S3 = signal_matrix(3, p.D)
print(S3)
print("columns d = 0..5; the last row lights up for d = 3, 4, 5")

# %%
# v_i^T S_i e_d is what the manager can compute from sales. Differences of it match cost differences.
for d in range(p.D + 1):
    seen = observation_vector(3, p) @ signal_matrix(3, p.D)
    seen1 = observation_vector(1, p) @ signal_matrix(1, p.D)
    print(f"d={d}  c(3,d)-c(1,d)={newsvendor_cost(3, d, p) - newsvendor_cost(1, d, p):+.0f}"
          f"  from sales: {seen[d] - seen1[d]:+.0f}")

# %%
# One randomized round on levels {1, 3}, half and half, stocking 3 and selling 2.
grid = ActionGrid([1, 3], 5)
dist = ActionDistribution(np.array([0.5, 0.5]))
est = estimate_costs(Feedback(chosen_level=3, sales=2), dist, grid, p)
print("estimates", est)
print("P(I >= 3) =", tail_probability(dist, grid, 3))

# %%
# Averaging over the coin flip. Every level is off by the same amount,
# so the offset cancels in every difference.
d = 2
mean = sum(pr * estimate_costs(Feedback.from_demand(lv, d), dist, grid, p)
           for pr, lv in zip(dist.probabilities, grid.levels))
true = np.array([newsvendor_cost(i, d, p) for i in grid.levels])
print("mean estimates   ", mean)
print("true costs       ", true)
print("mean - true      ", mean - true)
print("mean difference  ", mean[1] - mean[0], " true difference ", true[1] - true[0])

# %%
# Levels above the stocked one are not revealed this round, so their estimate is 0.
print(estimate_costs(Feedback(chosen_level=1, sales=1), dist, grid, p))
print(observed_value(1, 1, p) + p.beta, "is the level-1 numerator before dividing by P(I >= 1) = 1")
