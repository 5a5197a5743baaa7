"""
Detectability of planted communities
====================================

A planted partition model with three groups of 20 nodes is tested against
an ER null as the between-group probability grows. Significance is lost
near the point where the signal-to-noise condition stops holding.

Usage: python demos/04_planted_partition_sweep.py [networks] [replicas]
"""
import sys

import netsig
from netsig.pipeline import ExperimentSpec, kesten_stigum_boundary

networks = int(sys.argv[1]) if len(sys.argv) > 1 else 5
replicas = int(sys.argv[2]) if len(sys.argv) > 2 else 100

exp = ExperimentSpec.load(netsig.experiment_path("fig1a"))
print("boundary p_out =", kesten_stigum_boundary(3, 60, 0.8))
res = netsig.sweep(exp, networks=networks, replicas=replicas)
print(res.to_csv())

# Planted clique: how large must a clique be before it stands out?
exp = ExperimentSpec.load(netsig.experiment_path("fig1b"))
res = netsig.sweep(exp, networks=networks, replicas=replicas)
print(res.to_csv())
