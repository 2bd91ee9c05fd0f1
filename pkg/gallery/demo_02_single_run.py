"""
One NetExp run, step by step
============================

NetExp flips a biased coin at every step. Heads: grow toward the part of
the network that reveals the most new nodes. Tails: take the visible node
with the best utility gain. Each step lands in the trace.
"""

# %%
from netexp import NetExpParams, build_er_dataset, netexp, sample_tasks

bundle = build_er_dataset(n=500, p_edge=0.02, feature_count=5, p_val=0.01, seed=3)
task = sample_tasks(5, 3, task_count=1, node_count=500, seed=1)[0]
print("start node", task.initial_node, "needs features", list(task.weights))

# %%
trace = netexp(bundle.graph, bundle.features, task, NetExpParams(epsilon=0.5, seed=7, max_selected=60))
for step in trace.steps[:12]:
    print(f"{step.iteration:3d} {step.action:8s} {step.chain} utility={step.utility:.3f} |S|={step.size} exposed={step.exposed}")
print("...")
print("outcome:", trace.outcome, "| final size", trace.size, "| utility", round(trace.final_utility, 3))

# %%
# Every prefix of the selection stays connected and contains the start.
from netexp import is_connected_subset

assert all(is_connected_subset(bundle.graph, p) for p in trace.prefixes())
