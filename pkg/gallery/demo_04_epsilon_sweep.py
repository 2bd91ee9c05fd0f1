"""
How much to explore
===================

Sweeping epsilon from pure exploitation (0) to pure exploration (1) and
reporting utility per selected node, scaled so the best epsilon reads 1.
"""

# %%
from netexp.harness import ExperimentConfig, run_epsilon_sweep

config = ExperimentConfig(n=600, p_edge=0.015, p_val=0.002, tasks=8, seeds=(0, 1), budgets=(60,))
rows = run_epsilon_sweep(config, [0.0, 0.25, 0.5, 0.75, 1.0])
for _, eps, mean, se, normalized, runs in rows:
    print(f"epsilon={eps:.2f}  f(S)/|S|={mean:.4f} +- {se:.4f}  normalized={normalized:.3f}  ({runs} runs)")
