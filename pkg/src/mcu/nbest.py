"""Alternative likely decompositions obtained by flipping cheap boundary nodes.

After a solver has terminated, every ordered pair of adjacent clusters
``(A, B)`` yields a move vector: the cost ``gamma_B`` of moving each node of
``A`` that touches ``B`` into ``B``. Nodes whose move is (nearly) free are
flipped, alone and jointly per vector, and the resulting decompositions
are ranked by energy.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError
from .graph import Partition, energy, labeling_from_partition, partition_from_labeling
from .metrics import score

__all__ = [
    "MoveVector",
    "CandidateSolution",
    "move_vectors",
    "generate_nbest",
    "best_of_n_score",
    "POOL_CAP",
]

POOL_CAP = 10_000


@dataclass(frozen=True)
class MoveVector:
    source_cluster: int
    target_cluster: int
    entries: list  # (node, delta) pairs
    epsilon: float = 0.0

    def flippable(self):
        return [(v, d) for v, d in self.entries if d <= self.epsilon]

    @property
    def magnitude(self):
        """Energy increase of flipping every near-free node of the vector at once."""
        return float(sum(max(d, 0.0) for _, d in self.flippable()))


@dataclass(frozen=True)
class CandidateSolution:
    partition: Partition
    energy: float
    provenance: list = field(default_factory=list)  # (node, source, target) flips


def move_vectors(g, costs, p, epsilon=1e-6):
    """Move vectors for every ordered pair of clusters adjacent in ``E``.

    Sorted by magnitude, then by (source, target).
    """
    labels = p.labels
    cost = costs.cost
    per_pair = {}
    for v in range(g.n_nodes):
        nbr_e, _ = g.neighbors(v, lifted=False)
        own = labels[v]
        targets = sorted({int(b) for b in labels[nbr_e].tolist() if b != own})
        if not targets:
            continue
        nbr, eid = g.neighbors(v)
        sums = {}
        for w, c in zip(labels[nbr].tolist(), cost[eid].tolist()):
            sums[w] = sums.get(w, 0.0) + c
        base = sums.get(int(own), 0.0)
        for b in targets:
            per_pair.setdefault((int(own), b), []).append((v, base - sums.get(b, 0.0)))
    vectors = [MoveVector(a, b, entries, epsilon) for (a, b), entries in per_pair.items()]
    vectors.sort(key=lambda mv: (mv.magnitude, mv.source_cluster, mv.target_cluster))
    return vectors


def _apply(g, costs, p, flips):
    labels = p.labels.copy()
    for v, _, b in flips:
        labels[v] = b
    # a flip may disconnect its source cluster; split into components
    q = partition_from_labeling(g, labeling_from_partition(g, labels))
    return CandidateSolution(q, energy(g, costs, q), list(flips))


def generate_nbest(g, costs, p, n, epsilon=1e-6):
    """Up to ``n`` decompositions ordered by energy, the input partition included.

    Flip sets are formed from move entries with ``delta <= epsilon``, all
    evaluated against the unmodified input partition: one candidate per
    move vector flipping all of its eligible nodes, and one candidate per
    eligible single node. Duplicates are dropped and at most
    :data:`POOL_CAP` candidates are considered.
    """
    if n < 1:
        raise InputError("n must be at least 1")
    if epsilon < 0:
        raise InputError("epsilon must be non-negative")
    p = p if isinstance(p, Partition) else Partition(p)
    pool = [CandidateSolution(p, energy(g, costs, p), [])]
    seen = {p}

    def add(flips):
        cand = _apply(g, costs, p, flips)
        if cand.partition not in seen:
            seen.add(cand.partition)
            pool.append(cand)

    for mv in move_vectors(g, costs, p, epsilon):
        if len(pool) >= POOL_CAP:
            break
        flips = [(v, mv.source_cluster, mv.target_cluster) for v, _ in mv.flippable()]
        if len(flips) > 1:
            add(flips)
        for f in flips:
            if len(pool) >= POOL_CAP:
                break
            add([f])

    pool.sort(key=lambda c: c.energy)  # stable: input partition wins ties
    return pool[:n]


def best_of_n_score(candidates, gt, metric="f_measure", active=None):
    """Best score over the candidates against ground truth ``gt``.

    ``metric`` is one of ``f_measure``, ``ri`` or ``neg_vi``.
    """
    if not candidates:
        raise InputError("need at least one candidate")
    if metric not in ("f_measure", "ri", "neg_vi"):
        raise InputError(f"unsupported metric {metric!r}")
    parts = [c.partition if isinstance(c, CandidateSolution) else c for c in candidates]
    return max(score(q, gt, metric, active) for q in parts)
