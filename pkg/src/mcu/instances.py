"""Synthetic instance generators: planted partitions and lifted pixel grids."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .costs import build_instance
from .exceptions import InputError
from .graph import LiftedGraph
from .metrics import LabeledSubset

__all__ = [
    "PlantedConfig",
    "GridConfig",
    "generate_planted",
    "grid_from_edgemap",
    "lifted_offsets",
    "bresenham",
    "dense_agreement_instance",
    "analytic_lifted_count",
]

BASE_MARGIN = 0.4  # planted probabilities start at 0.5 -/+ this


@dataclass(frozen=True)
class PlantedConfig:
    """Planted-partition instance parameters.

    Each edge observes its ground-truth relation with cut probability
    ``0.5 -/+ (0.4 - u)``, ``u ~ U[0, flip_noise]``; with probability
    ``flip_noise`` the observation is inverted (an intra-cluster edge then
    looks like an inter-cluster one and vice versa). ``flip_noise = 0``
    gives exactly 0.1 / 0.9.
    """

    n_nodes: int = 200
    n_clusters: int = 5
    edge_density: float = 0.2
    flip_noise: float = 0.0
    seed: int = 0
    labeled_fraction: float = 1.0

    def __post_init__(self):
        if self.n_nodes < 1 or not 1 <= self.n_clusters <= self.n_nodes:
            raise InputError("need 1 <= n_clusters <= n_nodes")
        if not 0.0 < self.edge_density <= 1.0:
            raise InputError("edge_density must lie in (0, 1]")
        if not 0.0 <= self.flip_noise < 0.5:
            raise InputError("flip_noise must lie in [0, 0.5)")
        if not 0.0 < self.labeled_fraction <= 1.0:
            raise InputError("labeled_fraction must lie in (0, 1]")


def _random_tree(rng, nodes):
    """Random recursive tree on ``nodes``: each node attaches to an earlier one."""
    order = rng.permutation(nodes)
    if len(order) < 2:
        return []
    parents = order[(rng.random(len(order) - 1) * np.arange(1, len(order))).astype(np.int64)]
    return [(min(a, b), max(a, b)) for a, b in zip(parents.tolist(), order[1:].tolist())]


def generate_planted(cfg):
    """Sample ``(graph, costs, ground_truth)`` from a planted partition.

    Edges: Erdos-Renyi at ``edge_density`` plus a random spanning tree
    inside every ground-truth cluster and a random tree linking the
    clusters, so the graph is connected and every planted cluster is a
    valid decomposition component. Deterministic under ``cfg.seed``.
    """
    rng = np.random.default_rng(cfg.seed)
    n, k = cfg.n_nodes, cfg.n_clusters
    gt = rng.permutation(np.arange(n) % k)

    iu, ju = np.triu_indices(n, k=1)
    pick = rng.random(len(iu)) < cfg.edge_density
    pairs = set(zip(iu[pick].tolist(), ju[pick].tolist()))
    reps = []
    for c in range(k):
        members = np.flatnonzero(gt == c)
        reps.append(int(rng.choice(members)))
        pairs.update(_random_tree(rng, members))
    pairs.update(_random_tree(rng, np.array(reps)))
    edges = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)

    g = LiftedGraph(n, edges)
    inter = gt[edges[:, 0]] != gt[edges[:, 1]]
    noise = rng.uniform(0.0, cfg.flip_noise, len(edges)) if cfg.flip_noise > 0 else np.zeros(len(edges))
    flipped = rng.random(len(edges)) < cfg.flip_noise
    says_cut = inter ^ flipped
    p = 0.5 + np.where(says_cut, 1.0, -1.0) * (BASE_MARGIN - noise)
    costs = build_instance(g, p, 0.5)

    if cfg.labeled_fraction < 1.0:
        m = max(1, int(round(cfg.labeled_fraction * n)))
        nodes = np.sort(rng.choice(n, size=m, replace=False))
    else:
        nodes = np.arange(n)
    return g, costs, LabeledSubset(nodes, gt[nodes])


def dense_agreement_instance(seed, n_hubs=6, hub_degree=12, n_weak=12, p_weak=0.6):
    """Two-cluster instance mixing dense weak agreement with sparse strong conflict.

    Hub nodes have ``hub_degree`` edges whose probabilities all agree with
    the ground truth at ``p_weak`` (about a quarter of them cross to the
    other cluster). Low-degree "weak" nodes carry one confident joining edge
    and one confident edge that contradicts it. Returns
    ``(graph, costs, ground_truth, hubs)``; the ground truth is also the
    intended solution.
    """
    rng = np.random.default_rng(seed)
    n_core = 2 * hub_degree
    n = n_core + n_hubs + n_weak
    gt = np.zeros(n, dtype=np.int64)
    gt[n_core // 2:n_core] = 1
    hubs = np.arange(n_core, n_core + n_hubs)
    weak = np.arange(n_core + n_hubs, n)
    gt[hubs] = rng.integers(0, 2, n_hubs)
    gt[weak] = rng.integers(0, 2, n_weak)

    pairs, probs = [], []

    def add(u, v, p):
        pairs.append((min(u, v), max(u, v)))
        probs.append(p)

    # core clusters: paths with confident joins, one confident cut between them
    for c in (0, 1):
        members = np.flatnonzero(gt[:n_core] == c)
        for a, b in zip(members[:-1], members[1:]):
            add(int(a), int(b), 0.05)
    add(0, n_core // 2, 0.95)

    for h in hubs.tolist():
        own = np.flatnonzero(gt[:n_core] == gt[h])
        other = np.flatnonzero(gt[:n_core] != gt[h])
        n_cross = max(1, hub_degree // 4)
        for w in rng.choice(own, hub_degree - n_cross, replace=False).tolist():
            add(h, w, 1.0 - p_weak)
        for w in rng.choice(other, n_cross, replace=False).tolist():
            add(h, w, p_weak)

    for v in weak.tolist():
        own = np.flatnonzero(gt[:n_core] == gt[v])
        other = np.flatnonzero(gt[:n_core] != gt[v])
        add(v, int(rng.choice(own)), 0.15)
        add(v, int(rng.choice(other)), 0.3)

    g = LiftedGraph(n, pairs)
    costs = build_instance(g, probs, 0.5)
    return g, costs, LabeledSubset(np.arange(n), gt), hubs


@dataclass(frozen=True)
class GridConfig:
    width: int
    height: int
    tau: float = 20.0
    connectivity: int = 4

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InputError("grid dimensions must be positive")
        if self.tau < 0:
            raise InputError("tau must be non-negative")
        if self.connectivity != 4:
            raise InputError("only 4-connectivity is supported")


@lru_cache(maxsize=None)
def lifted_offsets(tau):
    """Half-plane pixel offsets ``(dx, dy)`` with ``1 < |(dx, dy)| <= tau``."""
    r = int(math.floor(tau))
    out = []
    for dy in range(0, r + 1):
        for dx in range(-r, r + 1):
            if dy == 0 and dx <= 0:
                continue
            d2 = dx * dx + dy * dy
            if 1 < d2 <= tau * tau:
                out.append((dx, dy))
    return tuple(out)


@lru_cache(maxsize=None)
def bresenham(dx, dy):
    """Integer pixel offsets on the Bresenham line from (0, 0) to (dx, dy), endpoints included."""
    x0 = y0 = 0
    sx = 1 if dx > 0 else -1
    sy = 1 if dy > 0 else -1
    ax, ay = abs(dx), -abs(dy)
    err = ax + ay
    pts = []
    while True:
        pts.append((x0, y0))
        if x0 == dx and y0 == dy:
            return tuple(pts)
        e2 = 2 * err
        if e2 >= ay:
            err += ay
            x0 += sx
        if e2 <= ax:
            err += ax
            y0 += sy


def grid_from_edgemap(cfg, edge_map, beta=0.5):
    """Lifted multicut instance on the pixel grid of an edge-strength image.

    ``edge_map`` has shape ``(height, width)`` with values in [0, 1]. Node
    ``y * width + x`` is pixel ``(x, y)``. Original edges join 4-neighbours
    with cut probability ``max`` of the two pixel strengths. Lifted edges
    join pixels at distance in ``(1, tau]`` with cut probability
    ``1 - prod(1 - strength)`` along the Bresenham line between them.
    """
    em = np.asarray(edge_map, dtype=float)
    if em.shape != (cfg.height, cfg.width):
        raise InputError(f"edge map has shape {em.shape}, expected {(cfg.height, cfg.width)}")
    if np.isnan(em).any() or em.min() < 0 or em.max() > 1:
        raise InputError("edge map values must lie in [0, 1]")
    h, w = em.shape
    ids = np.arange(h * w).reshape(h, w)

    e_pairs, e_prob = [], []
    for dx, dy in ((1, 0), (0, 1)):
        a = ids[: h - dy, : w - dx].ravel()
        b = ids[dy:, dx:].ravel()
        e_pairs.append(np.stack([a, b], axis=1))
        e_prob.append(np.maximum(em[: h - dy, : w - dx], em[dy:, dx:]).ravel())

    keep = np.log1p(-np.minimum(em, 1.0 - 1e-12))
    f_pairs, f_prob = [], []
    for dx, dy in lifted_offsets(cfg.tau):
        if abs(dx) >= w or dy >= h:
            continue
        x0, x1 = max(0, -dx), w - max(0, dx)
        y1 = h - dy
        a = ids[:y1, x0:x1]
        b = ids[dy:, x0 + dx:x1 + dx]
        acc = np.zeros(a.shape)
        for ox, oy in bresenham(dx, dy):
            acc += keep[oy:oy + y1, x0 + ox:x1 + ox]
        f_pairs.append(np.stack([a.ravel(), b.ravel()], axis=1))
        f_prob.append(-np.expm1(acc).ravel())

    def cat(parts, dtype, shape):
        return np.concatenate(parts).astype(dtype) if parts else np.zeros(shape, dtype=dtype)

    E = cat(e_pairs, np.int64, (0, 2))
    F = cat(f_pairs, np.int64, (0, 2))
    g = LiftedGraph(h * w, E, F)
    probs = np.concatenate([cat(e_prob, float, 0), cat(f_prob, float, 0)])
    return g, build_instance(g, probs, beta)


def analytic_lifted_count(width, height, tau):
    """Number of pixel pairs at Euclidean distance in ``(1, tau]``."""
    return sum(max(width - abs(dx), 0) * max(height - dy, 0) for dx, dy in lifted_offsets(tau))
