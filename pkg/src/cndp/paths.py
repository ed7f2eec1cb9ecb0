"""Shortest paths over an instance with per-edge non-negative weights."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import Instance


@dataclass(frozen=True, eq=False)
class WeightedView:
    """An instance seen through edge weights; ``inf`` marks an unusable edge."""
    inst: Instance
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.inst.m,):
            raise ValueError(f"expected {self.inst.m} weights, got shape {w.shape}")
        if np.any(np.isnan(w)) or np.any(w < 0):
            raise ValueError("weights must be non-negative")
        object.__setattr__(self, "weights", w)


def distances_from(view, source):
    inst = view.inst
    ptr, adj = inst.out_csr
    return kernels.dijkstra(inst.n, ptr, adj, inst.head, view.weights, inst.node(source))


def shortest_path(view: WeightedView, source, sink):
    """Minimum-weight directed path as (edge-index list, weight); ([], inf) if unreachable."""
    inst = view.inst
    s, t = inst.node(source), inst.node(sink)
    dist, pred = distances_from(view, source)
    if not math.isfinite(dist[t]):
        return [], math.inf
    path = []
    node = t
    while node != s:
        e = int(pred[node])
        path.append(e)
        node = int(inst.tail[e])
    path.reverse()
    return path, float(dist[t])


def shortest_path_tree(view: WeightedView, sink):
    """Reverse shortest-path tree into ``sink``.

    Returns (on_tree mask over edges, distance-to-sink per node, next edge per
    node or -1).
    """
    inst = view.inst
    ptr, adj = inst.in_csr
    dist, nxt = kernels.dijkstra(inst.n, ptr, adj, inst.tail, view.weights, inst.node(sink))
    on_tree = np.zeros(inst.m, dtype=bool)
    on_tree[nxt[nxt >= 0]] = True
    return on_tree, dist, nxt


def tree_path(inst, nxt, source, sink):
    """Edge list from ``source`` to ``sink`` following a tree's next-edge pointers."""
    node, t = inst.node(source), inst.node(sink)
    path = []
    while node != t:
        e = int(nxt[node])
        if e < 0:
            return None
        path.append(e)
        node = int(inst.head[e])
    return path
