"""Per-node label uncertainty for a given (lifted) multicut decomposition.

For a node ``v`` in cluster ``A`` and a cluster ``B`` that contains one of
``v``'s original-graph neighbours, the move cost

    gamma_B = sum_{w in N'(v) & A} c_vw - sum_{w in N'(v) & B} c_vw

is the exact energy change of relabeling ``v`` to ``B`` (``N'`` is the
neighbourhood over original and lifted edges). The node's score is the
cheapest move, ``gamma = min_B gamma_B`` (``inf`` if ``v`` has no cut
original edge), mapped through the logistic function. That value is the
confidence in the current label: it equals the local posterior of the
current label normalised against the best alternative. We report
``uncertainty = 1 - confidence``.

The likelihood baseline instead multiplies the local probabilities of the
observed edge labels around ``v``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .exceptions import InputError, MoveError, UnsupportedPriorError
from .graph import Partition

__all__ = [
    "NodeUncertainty",
    "UncertaintyReport",
    "gamma_move",
    "legal_targets",
    "node_uncertainty",
    "calibrated_probability",
    "log_move_ratio",
    "likelihood_confidence",
    "compute_report",
    "select_hard_examples",
]

METHODS = ("calibrated", "likelihood")


def logistic(x):
    if x == math.inf:
        return 1.0
    return float(expit(x))


@dataclass(frozen=True)
class NodeUncertainty:
    node: int
    gamma: float
    confidence: float
    uncertainty: float
    best_target_cluster: int | None


@dataclass(frozen=True, eq=False)
class UncertaintyReport:
    """Column-wise uncertainty values for every node.

    ``gamma`` is ``nan`` and ``best_target`` is ``-1`` for the likelihood
    method; ``best_target`` is also ``-1`` wherever ``gamma`` is infinite.
    """

    method: str
    gamma: np.ndarray
    confidence: np.ndarray
    uncertainty: np.ndarray
    best_target: np.ndarray

    def __len__(self):
        return len(self.confidence)

    def __getitem__(self, v):
        t = int(self.best_target[v])
        return NodeUncertainty(int(v), float(self.gamma[v]), float(self.confidence[v]),
                               float(self.uncertainty[v]), None if t < 0 else t)

    @property
    def per_node(self):
        return [self[v] for v in range(len(self))]

    def __eq__(self, other):
        if not isinstance(other, UncertaintyReport):
            return NotImplemented
        return self.method == other.method and all(
            np.array_equal(getattr(self, f), getattr(other, f), equal_nan=True)
            for f in ("gamma", "confidence", "uncertainty", "best_target"))


def _labels(p):
    return p.labels if isinstance(p, Partition) else np.asarray(p)


def _cluster_sums(g, cost, labels, v):
    """Summed cost from ``v`` to each neighbouring cluster over E'."""
    sums = {}
    nbr, eid = g.neighbors(v)
    for w, c in zip(labels[nbr].tolist(), cost[eid].tolist()):
        sums[w] = sums.get(w, 0.0) + c
    return sums


def legal_targets(g, p, v):
    """Sorted ids of foreign clusters holding an original-graph neighbour of ``v``."""
    labels = _labels(p)
    nbr, _ = g.neighbors(v, lifted=False)
    own = labels[v]
    return sorted({int(x) for x in labels[nbr].tolist() if x != own})


def gamma_move(g, costs, p, v, target):
    """Energy change of moving node ``v`` into cluster ``target``."""
    labels = _labels(p)
    own = int(labels[v])
    if target == own:
        raise MoveError(f"node {v} already belongs to cluster {target}")
    if target not in legal_targets(g, labels, v):
        raise MoveError(f"cluster {target} is not adjacent to node {v} in the original graph")
    sums = _cluster_sums(g, costs.cost, labels, v)
    return sums.get(own, 0.0) - sums.get(target, 0.0)


def node_uncertainty(g, costs, p, v):
    """Cheapest legal move of ``v`` and the derived confidence.

    Ties between targets go to the smallest cluster id.
    """
    labels = _labels(p)
    targets = legal_targets(g, labels, v)
    if not targets:
        return NodeUncertainty(int(v), math.inf, 1.0, 0.0, None)
    sums = _cluster_sums(g, costs.cost, labels, v)
    own = sums.get(int(labels[v]), 0.0)
    gamma, best = min((own - sums.get(b, 0.0), b) for b in targets)
    conf = logistic(gamma)
    return NodeUncertainty(int(v), gamma, conf, 1.0 - conf, best)


def _log_prob_sums(g, costs, labels, v, target):
    """Sums of log join/cut probabilities over edges into v's cluster and ``target``."""
    nbr, eid = g.neighbors(v)
    lab = labels[nbr]
    pc = costs.cut_prob[eid]
    own = labels[v]
    in_a, in_b = lab == own, lab == target
    log_pj, log_pc = np.log1p(-pc), np.log(pc)
    return (log_pj[in_a].sum(), log_pc[in_a].sum(), log_pj[in_b].sum(), log_pc[in_b].sum())


def calibrated_probability(g, costs, p, v, target):
    """Local posterior of ``v``'s current label normalised against moving to ``target``.

    Evaluated directly from the cut probabilities::

        prod_A p_j * prod_B p_c / (prod_A p_j * prod_B p_c + prod_B p_j * prod_A p_c)

    where ``A`` ranges over edges into ``v``'s cluster and ``B`` over edges
    into ``target``. Only defined for the unbiased prior ``beta = 0.5``, in
    which case it coincides with ``logistic(gamma_move(v, target))``.
    """
    if costs.beta != 0.5:
        raise UnsupportedPriorError("the probability form requires beta = 0.5")
    labels = _labels(p)
    if target == labels[v] or target not in legal_targets(g, labels, v):
        raise MoveError(f"cluster {target} is not a legal target for node {v}")
    a_join, a_cut, b_join, b_cut = _log_prob_sums(g, costs, labels, v, target)
    keep = a_join + b_cut
    move = b_join + a_cut
    return float(np.exp(keep - np.logaddexp(keep, move)))


def log_move_ratio(g, costs, p, v, target):
    """Log of the likelihood ratio favouring a move of ``v`` into ``target``.

    ``prod_A p_c/p_j * prod_B p_j/p_c``; larger means the move is more likely.
    """
    labels = _labels(p)
    a_join, a_cut, b_join, b_cut = _log_prob_sums(g, costs, labels, v, target)
    return float((a_cut - a_join) + (b_join - b_cut))


def likelihood_confidence(g, costs, p, v):
    """Product of the local probabilities of the observed labels of all edges at ``v``."""
    labels = _labels(p)
    nbr, eid = g.neighbors(v)
    pc = costs.cut_prob[eid]
    cut = labels[nbr] != labels[v]
    logs = np.where(cut, np.log(pc), np.log1p(-pc))
    return float(np.exp(logs.sum()))


def _calibrated_report(g, costs, labels):
    n = g.n_nodes
    cost = costs.cost
    src, dst, eid = g.directed(lifted=True)
    lab_src, lab_dst = labels[src], labels[dst]
    c = cost[eid]
    same = lab_src == lab_dst
    own = np.bincount(src[same], weights=c[same], minlength=n)

    K = int(labels.max()) + 1
    key = src * K + lab_dst
    uniq, inv = np.unique(key[~same], return_inverse=True)
    to_cluster = np.bincount(inv, weights=c[~same], minlength=len(uniq))

    # legal (node, cluster) targets come from cut original edges only
    se, de, _ = g.directed(lifted=False)
    cut_e = labels[se] != labels[de]
    tkey = np.unique(se[cut_e] * K + labels[de[cut_e]])
    tv, tb = np.divmod(tkey, K)
    gam = own[tv] - to_cluster[np.searchsorted(uniq, tkey)]

    gamma = np.full(n, np.inf)
    best = np.full(n, -1, dtype=np.int64)
    if len(tkey):
        order = np.lexsort((tb, gam, tv))
        tv_o = tv[order]
        first = np.ones(len(order), dtype=bool)
        first[1:] = tv_o[1:] != tv_o[:-1]
        pick = order[first]
        gamma[tv[pick]] = gam[pick]
        best[tv[pick]] = tb[pick]
    confidence = expit(gamma)
    return UncertaintyReport("calibrated", gamma, confidence, 1.0 - confidence, best)


def _likelihood_report(g, costs, labels):
    n = g.n_nodes
    src, dst, eid = g.directed(lifted=True)
    pc = costs.cut_prob[eid]
    cut = labels[src] != labels[dst]
    logs = np.where(cut, np.log(pc), np.log1p(-pc))
    confidence = np.exp(np.bincount(src, weights=logs, minlength=n))
    return UncertaintyReport("likelihood", np.full(n, np.nan), confidence, 1.0 - confidence,
                             np.full(n, -1, dtype=np.int64))


def compute_report(g, costs, p, method="calibrated"):
    """Uncertainty of every node under ``method`` (``calibrated`` or ``likelihood``)."""
    labels = _labels(p)
    if len(labels) != g.n_nodes:
        raise InputError("partition does not match the graph")
    if method == "calibrated":
        return _calibrated_report(g, costs, labels)
    if method == "likelihood":
        return _likelihood_report(g, costs, labels)
    raise InputError(f"unknown method {method!r}, expected one of {METHODS}")


def select_hard_examples(p, report, phi):
    """Nodes more uncertain than their cluster's mean, within clusters whose mean exceeds ``phi``.

    Returns a sorted array of node ids.
    """
    labels = _labels(p)
    u = np.asarray(report.uncertainty, dtype=float)
    if len(u) != len(labels):
        raise InputError("report does not cover the partition")
    k = int(labels.max()) + 1
    mean = np.bincount(labels, weights=u, minlength=k) / np.maximum(np.bincount(labels, minlength=k), 1)
    mu = mean[labels]
    # rounding in the mean must not make equal values look larger
    above = (u > mu) & ~np.isclose(u, mu, rtol=1e-12, atol=1e-15)
    return np.flatnonzero(above & (mu > phi))
