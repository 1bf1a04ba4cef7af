"""Sparsification curves: remove the most uncertain nodes step by step and
track how VI and RI of the remaining labeled nodes evolve.

Removal only excludes nodes from evaluation; the decomposition itself is
never re-solved.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError
from .metrics import rand_index, variation_of_information
from .uncertainty import compute_report

__all__ = [
    "ORDERINGS",
    "SparsificationCurve",
    "removal_order",
    "retained_counts",
    "sparsify",
    "compare_orderings",
    "write_curves_csv",
]

log = logging.getLogger(__name__)

ORDERINGS = ("calibrated", "likelihood", "random")


@dataclass
class SparsificationCurve:
    method: str
    samples: list = field(default_factory=list)  # (density, vi, ri)
    seed: int | None = None
    status: str = "ok"

    @property
    def densities(self):
        return np.array([s[0] for s in self.samples])

    @property
    def vi(self):
        return np.array([s[1] for s in self.samples])

    @property
    def ri(self):
        return np.array([s[2] for s in self.samples])

    def at(self, density):
        """Sample whose density is closest to ``density``."""
        i = int(np.argmin(np.abs(self.densities - density)))
        return self.samples[i]


def removal_order(g, costs, p, method, seed=None):
    """Node ids in removal order: most uncertain first, ties by node id."""
    n = g.n_nodes
    if method == "random":
        return np.random.default_rng(seed).permutation(n)
    if method not in ("calibrated", "likelihood"):
        raise InputError(f"unknown ordering {method!r}, expected one of {ORDERINGS}")
    u = compute_report(g, costs, p, method).uncertainty
    return np.lexsort((np.arange(n), -u))


def retained_counts(n, steps, min_density):
    """Node counts kept at each step: equal batches from ``n`` down to ``min_density * n``."""
    if steps < 1:
        raise InputError("steps must be at least 1")
    if not 0.0 < min_density < 1.0:
        raise InputError("min_density must lie in (0, 1)")
    if steps == 1:
        return np.array([n])
    floor = max(1, int(round(min_density * n)))
    counts = n - np.rint(np.arange(steps) * (n - floor) / (steps - 1)).astype(np.int64)
    return np.unique(counts)[::-1]


def sparsify(g, costs, p, gt, method="calibrated", steps=50, min_density=0.1, seed=None):
    """Sparsification curve of ``p`` against ground truth ``gt`` for one ordering."""
    n = g.n_nodes
    order = removal_order(g, costs, p, method, seed)
    curve = SparsificationCurve(method, seed=seed if method == "random" else None)
    labeled = np.zeros(n, dtype=bool)
    labeled[gt.nodes] = True
    for k in retained_counts(n, steps, min_density).tolist():
        active = np.zeros(n, dtype=bool)
        active[order[n - k:]] = True
        if np.count_nonzero(active & labeled) < 2:
            curve.status = "truncated"
            log.warning("%s ordering removed all labeled nodes before density %.3f", method, k / n)
            break
        curve.samples.append((k / n, variation_of_information(p, gt, active), rand_index(p, gt, active)))
    return curve


def compare_orderings(g, costs, p, gt, steps=50, seeds=(1, 2, 3), min_density=0.1,
                      methods=ORDERINGS):
    """One curve per ordering; the random curve is the mean over ``seeds``."""
    out = {}
    for method in methods:
        if method != "random":
            out[method] = sparsify(g, costs, p, gt, method, steps, min_density)
            continue
        if not seeds:
            raise InputError("random ordering needs at least one seed")
        runs = [sparsify(g, costs, p, gt, "random", steps, min_density, s) for s in seeds]
        m = min(len(r.samples) for r in runs)
        mean = np.mean([np.array(r.samples[:m]) for r in runs], axis=0)
        status = "ok" if all(r.status == "ok" for r in runs) else "truncated"
        out[method] = SparsificationCurve("random", [tuple(row) for row in mean.tolist()], None, status)
    return out


def write_curves_csv(fh, curves):
    """Write ``method,seed,density,vi,ri`` rows for an iterable of curves."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["method", "seed", "density", "vi", "ri"])
    for curve in curves:
        seed = "" if curve.seed is None else curve.seed
        for d, vi, ri in curve.samples:
            writer.writerow([curve.method, seed, format(d, ".17g"), format(vi, ".17g"), format(ri, ".17g")])
