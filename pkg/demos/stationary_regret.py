# %% [markdown]
# Regret under i.i.d. binomial demand, censored and uncensored.
#
# Demand each period is Binomial(30, 1/2); the manager picks a level in {1..30}.
# Smaller than the full experiment so it finishes in well under a minute:
# `newsvendor-arena run --preset fig1` runs the complete version.

# %%
import math
import sys
from pathlib import Path

from censored_newsvendor import ActionGrid, CostParams, DemandGenerator, aggregate, make_policy, simulate
from censored_newsvendor.cli import render_svg
from censored_newsvendor.policies import theorem1_regret_bound

T = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
RUNS = 10
grid = ActionGrid.span(1, 30)
p = CostParams(1, 1, 30)
gen = DemandGenerator("iid-binomial", T, 30, trials=30, prob=0.5)

kinds = ["ewf", "ewf-full", "fsf", "aee", "greedy-full", "aim", "aim-full"]
policies = [make_policy(k, grid, p, T) for k in kinds]
for pol in policies:
    print(f"{pol.name:12s} needs {pol.requires:18s} {pol.parameters()}")

# %%
records = simulate(policies, gen, RUNS, base_seed=7)
cache = {}
traces = [aggregate(records[k], grid, _cache=cache) for k in kinds]

print(f"\n{'policy':12s} {'R(T/4)':>9s} {'R(T)':>9s} {'ratio':>6s}")
for tr in traces:
    print(f"{tr.policy:12s} {tr.at(T // 4):9.0f} {tr.at(T):9.0f} {tr.at(T) / tr.at(T // 4):6.2f}")

# %%
# Square-root growth predicts a ratio of 2 between T and T/4. Linear growth predicts 4.
ewf = traces[0]
print("\nEWF regret / sqrt(T):", round(ewf.at(T) / math.sqrt(T), 1))
print("worst-case guarantee at T:", round(theorem1_regret_bound(T, grid.N, p.beta)))
print("censored / uncensored EWF:", round(ewf.at(T) / traces[1].at(T), 2))

# %%
out = Path("stationary_regret.svg")
out.write_text(render_svg(traces, "regret"))
print("plot written to", out.resolve())
