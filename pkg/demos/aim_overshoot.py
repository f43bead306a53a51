# %% [markdown]
# Gradient steps from sales data overshoot.
#
# Three levels {0, 1, 2}, demand always 1, h = b = 1. Stocking 1 is free.
# Without the lost-sales bit, selling out at level 1 looks like a shortage,
# so the auxiliary point keeps climbing toward 2.

# %%
import numpy as np

from censored_newsvendor import ActionGrid, CostParams, DemandGenerator, aggregate, make_policy, simulate
from censored_newsvendor.policies import aim_gradient

p = CostParams(1, 1, 2)
grid = ActionGrid([0, 1, 2], 2)

# sold 1 of 1: the indicator says demand was met, the sales-only estimate says it was not
print("sales-only gradient at I=1, sales=1:", aim_gradient(1.0, 1, 1, p))
print("with indicator d <= I:             ", aim_gradient(1.0, 1, 1, p, indicator=True))

# %%
T, RUNS = 10_000, 20
gen = DemandGenerator("constant", T, 2, value=1)
pols = [make_policy("aim", grid, p, T), make_policy("aim-unbiased", grid, p, T)]
recs = simulate(pols, gen, RUNS, base_seed=3)

for name, rs in recs.items():
    tr = aggregate(rs, grid)
    share2 = np.mean([np.mean(r.levels[T // 2:] == 2) for r in rs])
    print(f"{name:13s} regret {tr.at(T):7.0f}  R(T)/T {tr.at(T) / T:.3f}  "
          f"time at level 2 in second half {share2:.2f}")

# %%
# A larger step only changes how fast the point reaches 2.
for scale in (0.1, 0.5, 2.0):
    pol = make_policy("aim", grid, p, T, step_scale=scale)
    tr = aggregate(simulate([pol], gen, 5, base_seed=3)["aim"], grid)
    print(f"step scale {scale:4}: regret {tr.at(T):6.0f}")
