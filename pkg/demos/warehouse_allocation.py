# %% [markdown]
# One warehouse, two retailers, three units a period.
#
# Each retailer gets 0, 1 or 2 units and the total cannot exceed 3.
# Retailers only report sales. The learner keeps one weight per feasible allocation.

# %%
import numpy as np

from censored_newsvendor import ActionGrid
from censored_newsvendor.multi import (AllocationSpace, ChainParams, CombinatorialEWF, best_fixed_allocation,
                                       chain_regret, marginal_tails, run_chain)

chain = ChainParams(ActionGrid([0, 1, 2], 2), r=3, f=[0.5, 0.5], h=[1, 2], b=[3, 1], f0=1.0, h0=0.5)
space = AllocationSpace(chain)
print("feasible allocations:", [tuple(x) for x in space.levels.tolist()])
print("beta =", chain.beta)

# %%
mu = space.exploration_pmf()
for lv, m in zip(space.levels.tolist(), mu):
    if m:
        print("exploration mass", tuple(lv), round(m, 4))
print("marginal P(retailer k gets >= level):\n", marginal_tails(mu, space))

# %%
T, R = 5000, 10
rng = np.random.default_rng(1)
demands = rng.integers(0, 3, size=(R, T, 2))
pol = CombinatorialEWF(chain, T)
print(pol.parameters())
recs = run_chain(pol, demands, list(range(R)))

# %%
regret = np.mean([chain_regret(r, space) for r in recs], axis=0)
print("mean regret at T/4 and T:", round(regret[T // 4 - 1]), round(regret[-1]))
best, _ = best_fixed_allocation(demands[0], space)
counts = np.bincount(recs[0].allocations[T // 2:], minlength=space.A)
print("best fixed allocation in run 0:", best)
print("most played in the second half:", tuple(space.levels[np.argmax(counts)].tolist()))
