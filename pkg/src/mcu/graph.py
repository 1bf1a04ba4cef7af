"""Graphs, partitions and edge labelings for (lifted) multicut instances.

A :class:`LiftedGraph` holds the original edges ``E`` and the lifted edges
``F``. Edges are indexed densely: ``E`` occupies indices ``0..|E|-1`` and
``F`` follows. An edge labeling is a plain integer array over that index
(1 = cut, 0 = join). Decompositions are stored as :class:`Partition`
objects; labelings are derived from them.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import InputError

__all__ = [
    "LiftedGraph",
    "Partition",
    "labeling_from_partition",
    "partition_from_labeling",
    "is_feasible",
    "is_decomposition",
    "objective",
    "energy",
]


def _as_pairs(edges):
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InputError("edges must be a sequence of (u, v) pairs")
    return arr


def _csr(n, src, dst, eid):
    order = np.lexsort((dst, src))
    src, dst, eid = src[order], dst[order], eid[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst, eid


class LiftedGraph:
    """Original graph ``G=(V,E)`` plus lifted edges ``F``.

    Pairs are normalised to ``u < v``. Self loops, out-of-range ids and
    duplicate pairs (within or across ``E`` and ``F``) are rejected.

    Attributes
    ----------
    n_nodes : int
    edges : ndarray, shape (|E|+|F|, 2)
        All pairs, original edges first.
    n_edges, n_lifted : int
    """

    def __init__(self, n_nodes, edges=(), lifted=()):
        n_nodes = int(n_nodes)
        if n_nodes < 1:
            raise InputError("a graph needs at least one node")
        e = np.sort(_as_pairs(edges), axis=1)
        f = np.sort(_as_pairs(lifted), axis=1)
        allpairs = np.concatenate([e, f]) if len(f) else e
        if len(allpairs):
            if (allpairs[:, 0] == allpairs[:, 1]).any():
                raise InputError("self-loops are not allowed")
            if allpairs.min() < 0 or allpairs.max() >= n_nodes:
                raise InputError(f"node ids must lie in [0, {n_nodes})")
            keys = allpairs[:, 0] * n_nodes + allpairs[:, 1]
            if len(np.unique(keys)) != len(keys):
                raise InputError("duplicate edge pair (E and F must be disjoint)")

        self.n_nodes = n_nodes
        self.n_edges = len(e)
        self.n_lifted = len(f)
        self.edges = allpairs
        self.edges.setflags(write=False)

        m = len(allpairs)
        eid = np.arange(m, dtype=np.int64)
        u, v = allpairs[:, 0], allpairs[:, 1]
        # adjacency over E' = E u F
        self._adj = _csr(n_nodes, np.concatenate([u, v]), np.concatenate([v, u]),
                         np.concatenate([eid, eid]))
        # adjacency over E only
        ue, ve, ide = u[: self.n_edges], v[: self.n_edges], eid[: self.n_edges]
        self._adj_e = _csr(n_nodes, np.concatenate([ue, ve]), np.concatenate([ve, ue]),
                           np.concatenate([ide, ide]))
        self._index = None

    @property
    def n_total(self):
        """Number of edges in ``E u F``."""
        return len(self.edges)

    @property
    def edges_E(self):
        return self.edges[: self.n_edges]

    @property
    def edges_F(self):
        return self.edges[self.n_edges:]

    def neighbors(self, v, lifted=True):
        """Return ``(neighbor_ids, edge_ids)`` of node ``v``.

        With ``lifted=True`` the neighbourhood is taken over ``E u F``,
        otherwise over ``E`` only.
        """
        indptr, nbr, eid = self._adj if lifted else self._adj_e
        lo, hi = indptr[v], indptr[v + 1]
        return nbr[lo:hi], eid[lo:hi]

    def degree(self, v, lifted=True):
        indptr = (self._adj if lifted else self._adj_e)[0]
        return int(indptr[v + 1] - indptr[v])

    def edge_index(self, u, v):
        """Dense index of pair ``{u, v}``; ``KeyError`` if absent."""
        if self._index is None:
            self._index = {(int(a), int(b)): i for i, (a, b) in enumerate(self.edges)}
        if u > v:
            u, v = v, u
        return self._index[(u, v)]

    def directed(self, lifted=True):
        """Arrays ``(src, dst, edge_id)`` listing every edge in both directions."""
        m = self.n_total if lifted else self.n_edges
        u, v = self.edges[:m, 0], self.edges[:m, 1]
        eid = np.arange(m)
        return np.concatenate([u, v]), np.concatenate([v, u]), np.concatenate([eid, eid])

    def subgraph(self, nodes):
        """Induced sub-instance on ``nodes``.

        Returns ``(graph, edge_ids)`` where ``edge_ids`` maps each edge of the
        subgraph (original edges first) back to this graph's edge index.
        """
        nodes = np.asarray(nodes, dtype=np.int64)
        local = np.full(self.n_nodes, -1, dtype=np.int64)
        local[nodes] = np.arange(len(nodes))
        lu, lv = local[self.edges[:, 0]], local[self.edges[:, 1]]
        inside = (lu >= 0) & (lv >= 0)
        ids = np.flatnonzero(inside)
        in_e = ids[ids < self.n_edges]
        in_f = ids[ids >= self.n_edges]
        sub = LiftedGraph(len(nodes),
                          np.stack([lu[in_e], lv[in_e]], axis=1),
                          np.stack([lu[in_f], lv[in_f]], axis=1))
        return sub, np.concatenate([in_e, in_f])

    def __eq__(self, other):
        if not isinstance(other, LiftedGraph):
            return NotImplemented
        return (self.n_nodes == other.n_nodes and self.n_edges == other.n_edges
                and np.array_equal(self.edges, other.edges))

    def __repr__(self):
        return f"LiftedGraph(n_nodes={self.n_nodes}, |E|={self.n_edges}, |F|={self.n_lifted})"


def canonical_labels(labels):
    """Relabel cluster ids by order of first occurrence."""
    labels = np.asarray(labels)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse.reshape(-1)]


class Partition:
    """Node-to-cluster labeling, canonicalised by first occurrence.

    Two partitions compare equal iff they group the nodes identically,
    independent of the ids passed in.

    >>> Partition([5, 5, 2, 7]).labels
    array([0, 0, 1, 2])
    >>> Partition([1, 1, 0]) == Partition([0, 0, 3])
    True
    """

    __slots__ = ("labels", "n_clusters")

    def __init__(self, labels):
        labels = np.asarray(labels)
        if labels.ndim != 1 or len(labels) == 0:
            raise InputError("labels must be a non-empty 1-d array")
        self.labels = canonical_labels(labels)
        self.labels.setflags(write=False)
        self.n_clusters = int(self.labels.max()) + 1

    @classmethod
    def singletons(cls, n):
        return cls(np.arange(n))

    @classmethod
    def one_cluster(cls, n):
        return cls(np.zeros(n, dtype=np.int64))

    def __len__(self):
        return len(self.labels)

    def clusters(self):
        """List of node-id arrays, one per cluster, in cluster-id order."""
        order = np.argsort(self.labels, kind="stable")
        bounds = np.cumsum(np.bincount(self.labels, minlength=self.n_clusters))[:-1]
        return np.split(order, bounds)

    def relabel(self, v, cluster):
        """Copy of this partition with node ``v`` moved to ``cluster``.

        ``cluster`` may be ``n_clusters`` to open a new singleton cluster.
        """
        labels = self.labels.copy()
        labels[v] = cluster
        return Partition(labels)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash(self.labels.tobytes())

    def __repr__(self):
        return f"Partition({self.labels.tolist()})"


def _check_labeling(g, y):
    y = np.asarray(y)
    if y.shape != (g.n_total,):
        raise InputError(f"labeling has length {y.size}, expected {g.n_total}")
    return y


def labeling_from_partition(g, p):
    """Edge labeling induced by ``p``: cut iff endpoints lie in different clusters."""
    labels = p.labels if isinstance(p, Partition) else np.asarray(p)
    if len(labels) != g.n_nodes:
        raise InputError(f"partition covers {len(labels)} nodes, graph has {g.n_nodes}")
    return (labels[g.edges[:, 0]] != labels[g.edges[:, 1]]).astype(np.int8)


def partition_from_labeling(g, y):
    """Connected components of ``(V, {e in E : y_e = 0})``; lifted entries are ignored."""
    y = _check_labeling(g, y)
    joined = np.flatnonzero(y[: g.n_edges] == 0)
    u, v = g.edges[joined, 0], g.edges[joined, 1]
    adj = coo_matrix((np.ones(len(joined)), (u, v)), shape=(g.n_nodes, g.n_nodes))
    _, comp = connected_components(adj, directed=False)
    return Partition(comp)


def is_feasible(g, y):
    """Whether ``y`` is a (lifted) multicut of ``g``.

    Equivalent to the cycle, path and cut inequalities: the labeling must
    coincide with the one induced by the components of its joined original
    edges.
    """
    y = _check_labeling(g, y)
    return bool(np.array_equal(labeling_from_partition(g, partition_from_labeling(g, y)), y != 0))


def is_decomposition(g, p):
    """True if every cluster of ``p`` induces a connected subgraph of ``G``."""
    return partition_from_labeling(g, labeling_from_partition(g, p)) == (
        p if isinstance(p, Partition) else Partition(p))


def objective(costs, y):
    """Energy ``sum_e c'_e y_e`` of an edge labeling.

    ``costs`` is an :class:`~mcu.costs.InstanceCosts` or a plain cost array.
    """
    c = np.asarray(getattr(costs, "cost", costs), dtype=float)
    y = np.asarray(y)
    if c.shape != y.shape:
        raise InputError(f"cost vector has shape {c.shape}, labeling {y.shape}")
    if not np.all(np.isfinite(c)):
        raise InputError("costs must be finite")
    return float(np.dot(c, y))


def energy(g, costs, p):
    """Shortcut for ``objective(costs, labeling_from_partition(g, p))``."""
    return objective(costs, labeling_from_partition(g, p))
