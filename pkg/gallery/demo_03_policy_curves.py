"""
Utility against budget for four policies
========================================

A scaled-down version of the Erdos-Renyi comparison: NetExp with
epsilon 0.5 against uniform frontier picks (random), pure exploration
(deg) and pure exploitation (val).
"""

# %%
from netexp.harness import ExperimentConfig, run_utility_curve

config = ExperimentConfig(n=600, p_edge=0.015, p_val=0.002, tasks=8, seeds=(0, 1, 2), budgets=(10, 20, 40, 60))
points = run_utility_curve(config)

# %%
budgets = sorted({p.budget for p in points})
print("policy      " + "".join(f"{b:>9d}" for b in budgets))
for policy in config.policies:
    row = [p for p in points if p.policy == policy]
    print(f"{policy:12s}" + "".join(f"{p.mean_utility:9.3f}" for p in row))

# %%
# The exposed network tells the other half of the story: deg exposes the
# most but never cashes in until it saturates.
for policy in config.policies:
    last = [p for p in points if p.policy == policy][-1]
    print(f"{policy:12s} exposed at budget {last.budget}: {last.mean_exposed:.0f}")
