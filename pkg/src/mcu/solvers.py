"""Solvers for minimum cost (lifted) multicut instances.

Three routines are provided:

``solve_gaec``
    Greedy additive edge contraction. Cheap, usually decent.
``solve_klj``
    Kernighan-Lin style local search with cluster joins and splits,
    started from any decomposition (GAEC by default).
``solve_exact``
    Exhaustive minimisation over all set partitions. Only for tiny graphs;
    used as the reference in tests.

Every solver returns a :class:`SolverResult` holding a partition whose
clusters are connected in the original graph.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import InputError, SizeError
from .graph import Partition, energy, is_decomposition, labeling_from_partition, partition_from_labeling

__all__ = [
    "SolverResult",
    "solve_gaec",
    "solve_klj",
    "solve_exact",
    "restricted_growth_strings",
    "MAX_EXACT_NODES",
]

log = logging.getLogger(__name__)

MAX_EXACT_NODES = 12
_TOL = 1e-9


@dataclass(frozen=True)
class SolverResult:
    partition: Partition
    objective_value: float
    solver_name: str
    iterations: int


def _costs(costs):
    return np.asarray(getattr(costs, "cost", costs), dtype=float)


# ---------------------------------------------------------------------------
# GAEC


def _contract(g, cost, labels):
    """Greedy contraction starting from the clusters in ``labels``.

    Cluster links carry ``[summed cost, touches E]``; each link list object is
    shared by both endpoints so an update is visible from either side.
    Returns the final node labels and the number of contractions.
    """
    n = g.n_nodes
    labels = np.asarray(labels, dtype=np.int64)
    n_clusters = int(labels.max()) + 1

    minnode = np.full(n_clusters, n, dtype=np.int64)
    np.minimum.at(minnode, labels, np.arange(n))
    minnode = minnode.tolist()

    lu, lv = labels[g.edges[:, 0]], labels[g.edges[:, 1]]
    cross = lu != lv
    a = np.minimum(lu[cross], lv[cross])
    b = np.maximum(lu[cross], lv[cross])
    key = a * n_clusters + b
    uniq, inv = np.unique(key, return_inverse=True)
    sums = np.zeros(len(uniq))
    np.add.at(sums, inv, cost[cross])
    touches = np.zeros(len(uniq), dtype=bool)
    is_e = np.flatnonzero(cross) < g.n_edges
    np.logical_or.at(touches, inv, is_e)

    adj = [dict() for _ in range(n_clusters)]
    heap = []
    for k, s, t in zip(uniq.tolist(), sums.tolist(), touches.tolist()):
        i, j = divmod(k, n_clusters)
        link = [s, t]
        adj[i][j] = link
        adj[j][i] = link
        if t and s > 0:
            heap.append((-s, *sorted((minnode[i], minnode[j])), i, j))
    heapq.heapify(heap)

    def push(link, i, j):
        if link[1] and link[0] > 0:
            heapq.heappush(heap, (-link[0], *sorted((minnode[i], minnode[j])), i, j))

    parent = list(range(n_clusters))
    alive = [True] * n_clusters
    iterations = 0
    while heap:
        negc, k1, k2, i, j = heapq.heappop(heap)
        if not (alive[i] and alive[j]):
            continue
        link = adj[i].get(j)
        if link is None or not link[1] or link[0] != -negc:
            continue
        if (k1, k2) != tuple(sorted((minnode[i], minnode[j]))):
            continue
        big, small = (i, j) if len(adj[i]) >= len(adj[j]) else (j, i)
        del adj[big][small]
        old_min = minnode[big]
        minnode[big] = min(minnode[big], minnode[small])
        for w, lk in adj[small].items():
            if w == big:
                continue
            del adj[w][small]
            ex = adj[big].get(w)
            if ex is None:
                adj[big][w] = lk
                adj[w][big] = lk
                push(lk, big, w)
            else:
                ex[0] += lk[0]
                ex[1] = ex[1] or lk[1]
                push(ex, big, w)
        if minnode[big] != old_min:
            # heap keys of untouched links are now outdated
            for w, lk in adj[big].items():
                push(lk, big, w)
        adj[small] = None
        alive[small] = False
        parent[small] = big
        iterations += 1

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    root = np.array([find(c) for c in range(n_clusters)], dtype=np.int64)
    return root[labels], iterations


def solve_gaec(g, costs, init=None):
    """Greedy additive edge contraction.

    Repeatedly merges the pair of clusters connected by at least one
    original edge whose summed cost over all edges (original and lifted)
    between them is largest and positive. Ties go to the pair with the
    lexicographically smallest (min node id) key. With ``init`` the
    contraction starts from that partition instead of singletons.
    """
    cost = _costs(costs)
    start = np.arange(g.n_nodes) if init is None else Partition(_labels(init)).labels
    labels, it = _contract(g, cost, start)
    p = Partition(labels)
    return SolverResult(p, energy(g, cost, p), "gaec", it)


def _labels(p):
    return p.labels if isinstance(p, Partition) else np.asarray(p)


# ---------------------------------------------------------------------------
# KLj


class _LocalSearch:
    """Mutable state for one Kernighan-Lin-with-joins run."""

    def __init__(self, g, cost, labels):
        self.g = g
        self.cost = cost
        self.labels = np.array(labels, dtype=np.int64)
        self.nbrs = []
        for v in range(g.n_nodes):
            w, eid = g.neighbors(v)
            self.nbrs.append(list(zip(w.tolist(), cost[eid].tolist(), (eid < g.n_edges).tolist())))
        self.value = energy(g, cost, self.labels)

    def adjacent_pairs(self):
        e = self.g.edges_E
        la, lb = self.labels[e[:, 0]], self.labels[e[:, 1]]
        cross = la != lb
        pairs = np.unique(np.stack([np.minimum(la, lb)[cross], np.maximum(la, lb)[cross]], axis=1), axis=0)
        return [tuple(x) for x in pairs.tolist()]

    def kl_sequence(self, a, b):
        """Best-prefix sequence of single node moves between clusters a and b.

        Moves are applied tentatively even when they increase the energy;
        the prefix with the lowest cumulative change is kept. Returns the
        committed change (<= 0).
        """
        labels = self.labels
        members = np.flatnonzero((labels == a) | (labels == b)).tolist()
        sa, sb, ea, eb = {}, {}, {}, {}
        for v in members:
            xa = xb = 0.0
            na = nb = 0
            for w, c, is_e in self.nbrs[v]:
                lw = labels[w]
                if lw == a:
                    xa += c
                    na += is_e
                elif lw == b:
                    xb += c
                    nb += is_e
            sa[v], sb[v], ea[v], eb[v] = xa, xb, na, nb

        moved = set()
        history = []
        total = 0.0
        best, best_k = 0.0, 0
        while True:
            pick, pick_d = -1, 0.0
            for v in members:
                if v in moved:
                    continue
                if labels[v] == a:
                    if not eb[v]:
                        continue
                    d = sa[v] - sb[v]
                else:
                    if not ea[v]:
                        continue
                    d = sb[v] - sa[v]
                if pick < 0 or d < pick_d:
                    pick, pick_d = v, d
            if pick < 0:
                break
            src = labels[pick]
            dst = b if src == a else a
            labels[pick] = dst
            moved.add(pick)
            history.append((pick, src))
            total += pick_d
            if total < best - _TOL:
                best, best_k = total, len(history)
            to_a = dst == a
            for w, c, is_e in self.nbrs[pick]:
                if w not in sa:
                    continue
                if to_a:
                    sa[w] += c
                    sb[w] -= c
                    ea[w] += is_e
                    eb[w] -= is_e
                else:
                    sb[w] += c
                    sa[w] -= c
                    eb[w] += is_e
                    ea[w] -= is_e
        for v, src in reversed(history[best_k:]):
            labels[v] = src
        return best

    def commit_if_better(self, labels):
        """Adopt ``labels`` (refined to connected clusters) if it lowers the energy."""
        labels = np.asarray(labels)
        comp = partition_from_labeling(self.g, labeling_from_partition(self.g, labels)).labels
        value = energy(self.g, self.cost, comp)
        if value >= self.value - _TOL:
            return False
        # keep existing cluster ids stable so pending pair lists stay valid
        _, first = np.unique(comp, return_index=True)
        fresh = int(max(labels.max(), self.labels.max())) + 1
        ids = np.empty(len(first), dtype=np.int64)
        seen = set()
        for c, v in enumerate(first.tolist()):
            orig = int(labels[v])
            if orig in seen:
                ids[c] = fresh
                fresh += 1
            else:
                ids[c] = orig
                seen.add(orig)
        self.labels = ids[comp]
        self.value = value
        return True

    def move_pass(self):
        improved = False
        for a, b in self.adjacent_pairs():
            before = self.labels.copy()
            if self.kl_sequence(a, b) < 0:
                trial = self.labels
                self.labels = before
                improved |= self.commit_if_better(trial)
            else:
                self.labels = before
        return improved

    def join_pass(self):
        labels, it = _contract(self.g, self.cost, Partition(self.labels).labels)
        return it > 0 and self.commit_if_better(labels)

    def split_pass(self):
        improved = False
        for nodes in Partition(self.labels).clusters():
            if len(nodes) < 2:
                continue
            sub, eids = self.g.subgraph(nodes)
            sub_labels, _ = _contract(sub, self.cost[eids], np.arange(len(nodes)))
            if sub_labels.max() == sub_labels.min():
                continue
            cut = labeling_from_partition(sub, sub_labels)
            if float(np.dot(self.cost[eids], cut)) < -_TOL:
                trial = self.labels.copy()
                trial[nodes] = sub_labels + self.labels.max() + 1
                improved |= self.commit_if_better(trial)
        return improved


def solve_klj(g, costs, init=None, max_passes=100):
    """Kernighan-Lin local search with joins.

    Each pass runs, in order: a Kernighan-Lin move sequence for every pair
    of clusters adjacent in ``E``; greedy joins of adjacent clusters with
    positive connecting cost; and a GAEC-based split attempt for every
    cluster. Changes are only kept when the energy decreases, so the
    result is never worse than ``init`` split into connected clusters. Stops after a pass without
    improvement.

    ``init`` defaults to the GAEC solution.
    """
    cost = _costs(costs)
    if init is None:
        init = solve_gaec(g, cost).partition
    labels = _labels(init)
    if len(labels) != g.n_nodes:
        raise InputError("initial partition does not match the graph")
    # a disconnected starting cluster is split into its components
    labels = partition_from_labeling(g, labeling_from_partition(g, Partition(labels))).labels
    search = _LocalSearch(g, cost, labels)
    passes = 0
    while passes < max_passes:
        passes += 1
        improved = search.move_pass()
        improved |= search.join_pass()
        improved |= search.split_pass()
        if not improved:
            break
    else:
        log.warning("klj stopped after %d passes without converging", max_passes)
    p = Partition(search.labels)
    return SolverResult(p, energy(g, cost, p), "klj", passes)


# ---------------------------------------------------------------------------
# exhaustive


def restricted_growth_strings(n):
    """Yield every set partition of ``range(n)`` as a restricted growth string.

    Strings come in lexicographic order, starting with all zeros.

    >>> [''.join(map(str, s)) for s in restricted_growth_strings(3)]
    ['000', '001', '010', '011', '012']
    """
    if n <= 0:
        return
    a = [0] * n
    b = [0] * n  # b[i] = 1 + max(a[:i])
    for i in range(1, n):
        b[i] = 1
    while True:
        yield tuple(a)
        j = n - 1
        while j > 0 and a[j] == b[j]:
            j -= 1
        if j == 0:
            return
        a[j] += 1
        m = b[j] + (a[j] == b[j])
        for k in range(j + 1, n):
            a[k] = 0
            b[k] = m


@lru_cache(maxsize=None)
def _rgs_table(n):
    """All restricted growth strings of length n as an int8 array, lexicographic."""
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)  # current max per row
    for _ in range(1, n):
        counts = top.astype(np.int64) + 2
        rep = np.repeat(np.arange(len(rows)), counts)
        starts = np.cumsum(counts) - counts
        digit = (np.arange(counts.sum()) - np.repeat(starts, counts)).astype(np.int8)
        rows = np.concatenate([rows[rep], digit[:, None]], axis=1)
        top = np.maximum(top[rep], digit)
    rows.setflags(write=False)
    return rows


def solve_exact(g, costs, chunk=1 << 18):
    """Globally optimal decomposition by enumerating all set partitions.

    Only partitions whose clusters are connected in ``G`` are considered,
    so every decomposition appears exactly once. Ties are resolved in
    favour of the partition enumerated first.
    """
    n = g.n_nodes
    if n > MAX_EXACT_NODES:
        raise SizeError(f"exact solver supports at most {MAX_EXACT_NODES} nodes, got {n}")
    cost = _costs(costs)
    table = _rgs_table(n)
    u, v = g.edges[:, 0], g.edges[:, 1]
    values = np.empty(len(table))
    for lo in range(0, len(table), chunk):
        block = table[lo:lo + chunk]
        values[lo:lo + chunk] = (block[:, u] != block[:, v]) @ cost
    for idx in np.argsort(values, kind="stable"):
        p = Partition(table[idx])
        if is_decomposition(g, p):
            return SolverResult(p, energy(g, cost, p), "exact", len(table))
    raise AssertionError("the all-singletons partition is always a decomposition")
