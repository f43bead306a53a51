# %% [markdown]
# A demand drop in the middle of the horizon.
#
# Success probability is 1/2 except on [T/5, T/2], where it falls to 0.1.
# Cumulative cost is compared, along with tracking regret against the best
# level sequence with at most 3 switches.

# %%
import sys

import numpy as np

from censored_newsvendor import ActionGrid, CostParams, DemandGenerator, aggregate, make_policy, simulate
from censored_newsvendor.arena import best_switching_cost

T = int(sys.argv[1]) if len(sys.argv) > 1 else 30_000
RUNS = 10
grid = ActionGrid.span(1, 30)
p = CostParams(1, 1, 30)
gen = DemandGenerator("shifted-binomial", T, 30)
print("low-demand window:", gen.low_window())

policies = [make_policy("ewf", grid, p, T), make_policy("fsf", grid, p, T, switches=3),
            make_policy("aee", grid, p, T), make_policy("aim", grid, p, T)]
records = simulate(policies, gen, RUNS, base_seed=11)

# %%
costs = {k: aggregate(v, grid, metric="cumulative-cost") for k, v in records.items()}
lo, hi = gen.low_window()
print(f"\n{'policy':8s} {'before':>9s} {'window':>9s} {'after':>9s} {'total':>9s}")
for name, tr in costs.items():
    m = tr.mean
    print(f"{name:8s} {m[lo - 2]:9.0f} {m[hi - 1] - m[lo - 2]:9.0f} {m[-1] - m[hi - 1]:9.0f} {m[-1]:9.0f}")

# %%
# AEE only samples demand at a handful of exploration periods.
aee = records["aee"][0]
sched = np.nonzero(policies[2].explore)[0]
print("\nAEE exploration periods:", sched.tolist())
print("levels AEE stocks after the window:", np.unique(aee.levels[hi:]).tolist())

# %%
demands = records["ewf"][0].demands
for S in (0, 1, 3):
    print(f"best sequence with <= {S} switches, run 0: {best_switching_cost(demands, grid, p, S):.0f}")
tracking = {k: aggregate(v, grid, benchmark=("switching", 3)) for k, v in records.items()}
for name, tr in tracking.items():
    print(f"{name:8s} tracking regret at T: {tr.at(T):9.0f}")
