"""
Spatial networks and the gravity null
=====================================

Two groups of nodes sit in Gaussian clouds. When the clouds are tight, the
groups are also far apart, and a null that knows about distance explains
the clustering. When the clouds overlap, distance cannot explain it.

Usage: python demos/06_spatial_gravity.py [networks] [replicas]
"""
import sys

import netsig
from netsig.pipeline import ExperimentSpec

networks = int(sys.argv[1]) if len(sys.argv) > 1 else 3
replicas = int(sys.argv[2]) if len(sys.argv) > 2 else 100

exp = ExperimentSpec.load(netsig.experiment_path("fig4"))
print(netsig.sweep(exp, networks=networks, replicas=replicas).to_csv())
