"""Text file formats for instances, partitions, reports and edge maps.

Instance files are line oriented::

    # comment
    nodes 4
    beta 0.5
    edge 0 1 0.25
    lifted 0 3 0.8

Node ids are 0-based and every pair must satisfy ``u < v``. Partition and
ground-truth files hold one ``<node_id> <label>`` line per node.
"""
from __future__ import annotations

import math
import os

import numpy as np

from .costs import build_instance
from .exceptions import InputError, ParseError
from .graph import LiftedGraph, Partition
from .metrics import LabeledSubset
from .uncertainty import UncertaintyReport

__all__ = [
    "read_instance",
    "write_instance",
    "read_partition",
    "write_partition",
    "read_ground_truth",
    "write_ground_truth",
    "read_report",
    "write_report",
    "read_pgm",
    "write_pgm",
]


def _fmt(x):
    return format(float(x), ".17g")


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for no, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield no, line.split()


def _int(tok, no, what):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", no) from None


def _float(tok, no, what):
    try:
        x = float(tok)
    except ValueError:
        raise ParseError(f"{what} must be a number, got {tok!r}", no) from None
    if math.isnan(x):
        raise ParseError(f"{what} is NaN", no)
    return x


def read_instance(path):
    """Parse an instance file into ``(LiftedGraph, InstanceCosts)``."""
    n = None
    beta = 0.5
    edges, lifted, pe, pf = [], [], [], []
    seen = {}
    for no, tok in _lines(path):
        kind = tok[0]
        if kind == "nodes":
            if len(tok) != 2:
                raise ParseError("expected 'nodes <n>'", no)
            if n is not None:
                raise ParseError("repeated 'nodes' header", no)
            n = _int(tok[1], no, "node count")
            if n < 1:
                raise ParseError("node count must be positive", no)
        elif kind == "beta":
            if len(tok) != 2:
                raise ParseError("expected 'beta <b>'", no)
            beta = _float(tok[1], no, "beta")
            if not 0.0 < beta < 1.0:
                raise ParseError("beta must lie in (0, 1)", no)
        elif kind in ("edge", "lifted"):
            if len(tok) != 4:
                raise ParseError(f"expected '{kind} <u> <v> <p_cut>'", no)
            u, v = _int(tok[1], no, "node id"), _int(tok[2], no, "node id")
            p = _float(tok[3], no, "probability")
            if not u < v:
                raise ParseError(f"pair ({u}, {v}) must satisfy u < v", no)
            if u < 0:
                raise ParseError("node ids must be non-negative", no)
            if not 0.0 <= p <= 1.0:
                raise ParseError(f"probability {p} outside [0, 1]", no)
            if (u, v) in seen:
                raise ParseError(f"duplicate pair ({u}, {v}), first given on line {seen[(u, v)]}", no)
            seen[(u, v)] = no
            (edges if kind == "edge" else lifted).append((u, v))
            (pe if kind == "edge" else pf).append(p)
        else:
            raise ParseError(f"unknown record {kind!r}", no)
    if n is None:
        raise ParseError("missing 'nodes <n>' header")
    for (u, v), no in seen.items():
        if v >= n:
            raise ParseError(f"node id {v} out of range for {n} nodes", no)
    g = LiftedGraph(n, edges, lifted)
    return g, build_instance(g, pe + pf, beta)


def write_instance(path, g, costs, comment=None):
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            for line in str(comment).splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"nodes {g.n_nodes}\n")
        fh.write(f"beta {_fmt(costs.beta)}\n")
        for i, (u, v) in enumerate(g.edges.tolist()):
            kind = "edge" if i < g.n_edges else "lifted"
            fh.write(f"{kind} {u} {v} {_fmt(costs.cut_prob[i])}\n")


def _read_labels(path):
    nodes, labels = [], []
    for no, tok in _lines(path):
        if len(tok) != 2:
            raise ParseError("expected '<node_id> <label>'", no)
        v, lab = _int(tok[0], no, "node id"), _int(tok[1], no, "label")
        if v < 0:
            raise ParseError("node ids must be non-negative", no)
        nodes.append(v)
        labels.append(lab)
    if not nodes:
        raise ParseError("no labels found")
    return np.array(nodes, dtype=np.int64), np.array(labels, dtype=np.int64)


def read_partition(path, n_nodes=None):
    """Partition file covering nodes ``0..n-1`` exactly once (any line order)."""
    nodes, labels = _read_labels(path)
    n = len(nodes) if n_nodes is None else n_nodes
    if len(nodes) != n or not np.array_equal(np.sort(nodes), np.arange(n)):
        raise InputError(f"partition file must list each of the {n} nodes exactly once")
    out = np.empty(n, dtype=np.int64)
    out[nodes] = labels
    return Partition(out)


def write_partition(path, p):
    with open(path, "w", encoding="utf-8") as fh:
        for v, lab in enumerate(p.labels.tolist()):
            fh.write(f"{v} {lab}\n")


def read_ground_truth(path, n_nodes=None):
    nodes, labels = _read_labels(path)
    if n_nodes is not None and nodes.max() >= n_nodes:
        raise InputError(f"ground truth references node {nodes.max()} outside [0, {n_nodes})")
    order = np.argsort(nodes, kind="stable")
    return LabeledSubset(nodes[order], labels[order])


def write_ground_truth(path, gt):
    with open(path, "w", encoding="utf-8") as fh:
        for v, lab in zip(gt.nodes.tolist(), gt.gt_labels.tolist()):
            fh.write(f"{v} {lab}\n")


def write_report(path, report):
    """One ``node_id gamma confidence uncertainty best_target`` line per node."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# method {report.method}\n")
        fh.write("# node_id gamma confidence uncertainty best_target\n")
        for v in range(len(report)):
            t = int(report.best_target[v])
            fh.write(f"{v} {_fmt(report.gamma[v])} {_fmt(report.confidence[v])} "
                     f"{_fmt(report.uncertainty[v])} {t if t >= 0 else 'none'}\n")


def read_report(path):
    method = "calibrated"
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().split()
    if first[:2] == ["#", "method"] and len(first) == 3:
        method = first[2]
    rows = []
    for no, tok in _lines(path):
        if len(tok) != 5:
            raise ParseError("expected 'node_id gamma confidence uncertainty best_target'", no)
        t = -1 if tok[4] == "none" else _int(tok[4], no, "best_target")
        gamma = float(tok[1])  # 'nan' marks the likelihood method
        rows.append((_int(tok[0], no, "node id"), gamma, _float(tok[2], no, "confidence"),
                     _float(tok[3], no, "uncertainty"), t))
    rows.sort()
    if [r[0] for r in rows] != list(range(len(rows))):
        raise InputError("report must cover nodes 0..n-1 exactly once")
    cols = list(zip(*rows))
    return UncertaintyReport(method, np.array(cols[1], dtype=float), np.array(cols[2], dtype=float),
                             np.array(cols[3], dtype=float), np.array(cols[4], dtype=np.int64))


def _pgm_tokens(data):
    pos = 0
    tokens = []
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos + 1  # exactly one whitespace byte precedes the raster


def read_pgm(path):
    """Binary PGM (P5, maxval 255) as a float array in [0, 1]."""
    with open(path, "rb") as fh:
        data = fh.read()
    (magic, w, h, maxval), offset = _pgm_tokens(data)
    if magic != b"P5":
        raise ParseError(f"not a binary PGM (magic {magic!r})")
    w, h, maxval = int(w), int(h), int(maxval)
    if maxval != 255:
        raise ParseError(f"only maxval 255 is supported, got {maxval}")
    raster = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=offset)
    return raster.reshape(h, w).astype(float) / 255.0


def write_pgm(path, image):
    """Write values in [0, 1] as an 8-bit binary PGM."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise InputError("image must be 2-d")
    raster = np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(raster.tobytes())


def ensure_parent(path):
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
