"""Clustering comparison against (partial) ground truth.

All metrics first restrict both clusterings to the nodes that carry a
ground-truth label *and* are still active (not removed by sparsification).
Entropies use natural logarithms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import EvaluationError, InputError
from .graph import Partition

__all__ = [
    "LabeledSubset",
    "variation_of_information",
    "rand_index",
    "precision_recall_f",
    "score",
    "METRICS",
]


@dataclass(frozen=True, eq=False)
class LabeledSubset:
    """Ground-truth labels for a subset of the nodes."""

    nodes: np.ndarray
    gt_labels: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=np.int64).reshape(-1)
        labels = np.asarray(self.gt_labels).reshape(-1)
        if len(nodes) == 0:
            raise InputError("ground truth must label at least one node")
        if len(nodes) != len(labels):
            raise InputError("nodes and gt_labels differ in length")
        if nodes.min() < 0 or len(np.unique(nodes)) != len(nodes):
            raise InputError("ground-truth node ids must be distinct and non-negative")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "gt_labels", labels)

    @classmethod
    def full(cls, p):
        """Ground truth covering every node of partition ``p``."""
        labels = p.labels if isinstance(p, Partition) else np.asarray(p)
        return cls(np.arange(len(labels)), labels)

    def __eq__(self, other):
        if not isinstance(other, LabeledSubset):
            return NotImplemented
        return np.array_equal(self.nodes, other.nodes) and np.array_equal(self.gt_labels, other.gt_labels)


def _restrict(p, gt, active):
    labels = p.labels if isinstance(p, Partition) else np.asarray(p)
    if not isinstance(gt, LabeledSubset):
        gt = LabeledSubset.full(gt)
    if gt.nodes.max() >= len(labels):
        raise InputError("ground truth references nodes outside the partition")
    keep = np.ones(len(gt.nodes), dtype=bool)
    if active is not None:
        active = np.asarray(active)
        if active.dtype == bool:
            if len(active) != len(labels):
                raise InputError("active mask has the wrong length")
            keep = active[gt.nodes]
        else:
            mask = np.zeros(len(labels), dtype=bool)
            mask[active] = True
            keep = mask[gt.nodes]
    return labels[gt.nodes[keep]], gt.gt_labels[keep]


def _contingency(a, b):
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    return table


def variation_of_information(p, gt, active=None):
    """Variation of information in nats between ``p`` and the ground truth."""
    a, b = _restrict(p, gt, active)
    if len(a) == 0:
        raise EvaluationError("no labeled node left to evaluate")
    table = _contingency(a, b).astype(float) / len(a)
    pa = table.sum(axis=1, keepdims=True)
    pb = table.sum(axis=0, keepdims=True)
    i, j = np.nonzero(table)
    pij = table[i, j]
    vi = -np.sum(pij * (np.log(pij / pa[i, 0]) + np.log(pij / pb[0, j])))
    return float(vi) if vi > 0 else 0.0


def _pairs(x):
    return x * (x - 1) // 2


def rand_index(p, gt, active=None):
    """Unadjusted Rand index: fraction of node pairs on which both clusterings agree."""
    a, b = _restrict(p, gt, active)
    m = len(a)
    if m < 2:
        raise EvaluationError(f"rand index needs at least 2 labeled nodes, got {m}")
    table = _contingency(a, b)
    together_both = _pairs(table).sum()
    together_a = _pairs(table.sum(axis=1)).sum()
    together_b = _pairs(table.sum(axis=0)).sum()
    total = _pairs(m)
    agree = total + 2 * together_both - together_a - together_b
    return float(agree / total)


def precision_recall_f(p, gt, active=None):
    """Precision, recall and F-measure under greedy one-to-one cluster matching.

    Predicted and ground-truth clusters are paired greedily by largest
    overlap (ties to the lowest ids), each cluster used at most once.
    Precision is the matched overlap over the size of the matched predicted
    clusters, recall the matched overlap over all evaluated nodes.
    """
    a, b = _restrict(p, gt, active)
    if len(a) == 0:
        return 0.0, 0.0, 0.0
    table = _contingency(a, b)
    work = table.copy()
    matched = covered = 0
    while work.size and work.max() > 0:
        i, j = np.unravel_index(np.argmax(work), work.shape)
        matched += table[i, j]
        covered += table[i].sum()
        work[i, :] = 0
        work[:, j] = 0
    precision = matched / covered if covered else 0.0
    recall = matched / len(a)
    f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return float(precision), float(recall), float(f)


def _neg_vi(p, gt, active=None):
    return -variation_of_information(p, gt, active)


def _f_measure(p, gt, active=None):
    return precision_recall_f(p, gt, active)[2]


METRICS = {
    "vi": variation_of_information,
    "ri": rand_index,
    "neg_vi": _neg_vi,
    "f_measure": _f_measure,
}


def score(p, gt, metric, active=None):
    """Evaluate one of :data:`METRICS` by name."""
    try:
        fn = METRICS[metric]
    except KeyError:
        raise InputError(f"unknown metric {metric!r}") from None
    return fn(p, gt, active)
