"""
Fitting maximum-entropy null models
===================================

Each null is a distribution over simple graphs that matches chosen features
of the observed network on average. Here we fit the four kinds on the
karate-club network and on a small spatial graph, and check how well the
constraints are met.
"""
import numpy as np

import netsig
from netsig.generators import PPMSpec, SpatialPPMSpec, gen_spatial_ppm

g = netsig.karate()
print(g)

# Erdos-Renyi: one global edge probability, 2E / (N(N-1)).
er = netsig.fit(g, netsig.NullSpec("er"))
print("ER p =", er.P[0, 1])

# Configuration model: expected degrees equal observed degrees.
cfg = netsig.fit(g, netsig.NullSpec("configuration"))
print("max |expected - observed degree| =", np.abs(cfg.P.sum(axis=1) - g.degrees).max())

# Random dot product graph null: the edge count plus the projections of A onto
# its top-d eigenvectors. With the all-ones vector it is the configuration model.
rdpg = netsig.fit(g, netsig.NullSpec("rdpg", rank=2))
ones = netsig.nullmodels.fit_rdpg(g, np.ones((g.n, 1)))
print("RDPG(2) residual:", rdpg.diagnostics["max_residual"])
print("RDPG(ones) vs configuration:", np.abs(ones.P - cfg.P).max())

# Gravity null: degrees plus the number of edges in each distance bin.
spatial, labels = gen_spatial_ppm(SpatialPPMSpec(PPMSpec([30, 30], 0.5, 0.025), 0.1),
                                  np.random.default_rng(1))
grav = netsig.fit(spatial, netsig.NullSpec("gravity"))
same = labels[:, None] == labels[None, :]
print("gravity: mean P within clouds %.3f, between clouds %.4f"
      % (grav.P[same & ~np.eye(60, dtype=bool)].mean(), grav.P[~same].mean()))

# Models serialise to JSON and rebuild P exactly.
again = netsig.NullModel.from_json(cfg.to_json())
print("round trip exact:", np.array_equal(again.P, cfg.P))

# Sampling draws each pair independently with probability P_ij.
sample = netsig.sample(cfg, np.random.default_rng(0))
print("sampled graph:", sample)
