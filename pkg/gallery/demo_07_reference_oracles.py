"""
Reference oracles
=================

Exhaustive and greedy baselines used to sanity-check the explorer:
connected dominating sets, and the smallest node set meeting a quota when
the whole network is visible.
"""

# %%
import numpy as np

from netexp import Task, brute_force_min_cds, brute_force_min_cover, centralized_greedy, greedy_cds, max_degree
from netexp.checks import random_connected_graph, random_feature_table
from netexp.graph import cds_bound_factor

rng = np.random.default_rng(5)
g = random_connected_graph(rng, 14, 0.25)
best, gamma = brute_force_min_cds(g)
approx = greedy_cds(g)
print(f"minimum CDS {sorted(best)} (size {gamma}); greedy {sorted(approx)} (size {len(approx)})")
print(f"greedy guarantee: {len(approx)} <= {cds_bound_factor(max_degree(g)) * gamma:.1f}")

# %%
ft = random_feature_table(rng, 14, 3, 0.3)
task = Task(0, {0: 1.0, 1: 1.0, 2: 1.0}, quota=0.7, tolerance=0.05)
opt, size = brute_force_min_cover(ft, task)
print("optimal cover", sorted(opt), "| greedy cover", centralized_greedy(ft, task))
