"""
Sparsification on a planted partition
=====================================

Remove the most uncertain nodes first and watch the clustering error on
the remaining nodes. A good uncertainty measure should make the curve
drop faster than removing nodes at random.
"""

from mcu import PlantedConfig, compare_orderings, generate_planted, solve_klj

cfg = PlantedConfig(n_nodes=200, n_clusters=5, flip_noise=0.3, seed=7)
g, costs, gt = generate_planted(cfg)
p = solve_klj(g, costs).partition
print(f"{g.n_nodes} nodes, {g.n_edges} edges, solution with {p.n_clusters} clusters")

curves = compare_orderings(g, costs, p, gt, steps=10, seeds=(1, 2, 3))

# one column per ordering, VI in nats
print("density " + " ".join(f"{m:>11}" for m in curves))
for i, (d, _, _) in enumerate(curves["calibrated"].samples):
    print(f"{d:7.2f} " + " ".join(f"{c.samples[i][1]:11.3f}" for c in curves.values()))
