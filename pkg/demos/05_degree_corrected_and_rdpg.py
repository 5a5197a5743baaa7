"""
Stronger nulls for heterogeneous degrees
========================================

With heavy-tailed degrees the ER null flags almost anything. The
configuration null accounts for degrees; the RDPG null additionally fixes
the leading eigenvectors, and once enough of them are included the
remaining community structure is no longer surprising.

Usage: python demos/05_degree_corrected_and_rdpg.py [networks] [replicas]
"""
import sys

import netsig
from netsig.pipeline import ExperimentSpec

networks = int(sys.argv[1]) if len(sys.argv) > 1 else 3
replicas = int(sys.argv[2]) if len(sys.argv) > 2 else 50

for name in ("fig2", "fig3"):
    exp = ExperimentSpec.load(netsig.experiment_path(name))
    print(name, "-", exp.null, exp.param, exp.values)
    print(netsig.sweep(exp, networks=networks, replicas=replicas).to_csv())
