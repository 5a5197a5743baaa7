"""
The block z-score statistic
===========================

For a labeling of the nodes into K groups, each pair of groups gets a
z-score comparing observed and expected edge counts under the null. A block
matrix B says which blocks should be dense (+1), sparse (-1) or ignored (0),
and Z averages the signed z-scores.
"""
import numpy as np

import netsig
from netsig.graph import Graph
from netsig.zstat import BlockState

# Two triangles joined by one edge.
g = Graph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])
m = netsig.fit(g, netsig.NullSpec("er"))
labels = np.array([0, 0, 0, 1, 1, 1])

stats = netsig.block_stats(g, m, labels, 2)
print("observed S:\n", stats.s)
print("expected T:\n", stats.t)
zb = netsig.z_blocks(stats)
print("block z-scores:\n", zb.round(4))
print("Z (two communities) =", netsig.z_total(zb, netsig.assortative(2)))
print("Z (bipartite)       =", netsig.z_total(zb, netsig.named_pattern("bipartite")))

# Moving a node updates the block sums incrementally.
state = BlockState(g, m, netsig.assortative(2), labels)
print("Z change if node 2 switches sides:", state.delta(2, 1))

# The optimiser searches labelings for the largest Z.
best = netsig.maximize_z(g, m, netsig.assortative(2))
print("best labeling", best.labels, "Z =", round(best.z, 4))

# A zero row and column lets nodes opt out of the pattern.
b = netsig.assortative(2, unassigned=True)
print(b)
