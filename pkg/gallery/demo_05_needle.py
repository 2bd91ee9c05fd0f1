"""
Finding a needle in a small world
=================================

A single node holds all the value. On a preferential-attachment overlay
the search cost grows far slower than the network; on a path it grows in
lockstep with it.
"""

# %%
from netexp.harness import run_needle_scenario

for kind in ("pa", "path"):
    rows = run_needle_scenario([300, 3000], seed_count=4, kind=kind, starts=5)
    (_, n0, m0, *_), (_, n1, m1, *_) = rows
    print(f"{kind:5s} median |S|: n={n0} -> {m0:g}, n={n1} -> {m1:g}  (x{m1 / m0:.1f} for x{n1 // n0} nodes)")
