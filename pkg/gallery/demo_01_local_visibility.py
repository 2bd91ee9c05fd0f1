"""
What an explorer can see
========================

A selected set S only ever sees a bounded neighborhood of the network.
Adjacency is readable within ``l_deg`` hops of S, feature values within
``l_val`` hops, and only the one-hop frontier can actually be selected.
"""

# %%
# A small hand-drawn network. Node ``i`` here is ``v{i+1}`` in the comments.
from netexp import FeatureTable, Graph, VisibilityError, new_view

edges = [(1, 2), (2, 3), (1, 4), (2, 5), (3, 6), (4, 8), (5, 7), (6, 9),
         (7, 9), (7, 11), (7, 12), (8, 10), (11, 13)]
g = Graph.from_edges(13, [(a - 1, b - 1) for a, b in edges])
features = FeatureTable({u: {0: 0.5} for u in range(13)}, 1)

# %%
# Start at v1 with two hops of structural and value visibility, then grow
# S to {v1, v2, v3}.
view = new_view(g, 0, l_deg=2, l_val=2, features=features)
view.extend((1,)).extend((2,))
print("selected:", sorted(u + 1 for u in view.selected))
print("frontier:", sorted(u + 1 for u in view.frontier))

# %%
# Chains look ahead through the frontier. Going v5 then v7 reaches a hub
# that exposes three nodes nobody could see before.
for chain in view.enumerate_chains(2):
    gain = view.exposure_gain(chain)
    print("chain", [u + 1 for u in chain], "exposes", gain, "new nodes")

# %%
# Reading past the visible region is an error, not a silent leak.
print("values of v9:", dict(view.feature_values(8)))
try:
    view.feature_values(10)
except VisibilityError as exc:
    print("v11 is hidden:", exc)
