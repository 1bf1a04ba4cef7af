"""
Per-node uncertainty of a decomposition
=======================================

Build a tiny graph by hand, solve it, and look at how cheap it would be
to move each node into a neighbouring cluster.
"""

import numpy as np

from mcu import LiftedGraph, build_instance, compute_report, solve_exact

# a square 0-1-2-3 with one diagonal; the diagonal is a lifted edge
g = LiftedGraph(4, edges=[(0, 1), (1, 2), (2, 3), (0, 3)], lifted=[(0, 2)])

# cut probabilities for E first, then F
costs = build_instance(g, [0.1, 0.8, 0.2, 0.55, 0.9])
print("edge costs:", np.round(costs.cost, 3))

best = solve_exact(g, costs)
print("optimal partition:", best.partition.labels, "energy", round(best.objective_value, 3))

# gamma is the energy change of the cheapest legal move;
# confidence = logistic(gamma)
report = compute_report(g, costs, best.partition)
for row in report.per_node:
    print(f"node {row.node}: gamma {row.gamma:7.3f}  confidence {row.confidence:.3f}  "
          f"cheapest target {row.best_target_cluster}")

# the likelihood baseline multiplies the agreeing probabilities instead
baseline = compute_report(g, costs, best.partition, method="likelihood")
print("likelihood confidences:", np.round(baseline.confidence, 3))
