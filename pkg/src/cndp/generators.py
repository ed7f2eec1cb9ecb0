"""Seeded random instances for property tests and the ``oracle --random`` command."""
from __future__ import annotations

import numpy as np

from .latency import LatencyFunction
from .model import Commodity, Edge, Instance


def random_latency(rng, degree):
    coeffs = [float(rng.uniform(0, 2)) if rng.random() < 0.5 else 0.0 for _ in range(degree)]
    coeffs.append(float(rng.uniform(0.2, 2.0)))
    return LatencyFunction.polynomial(coeffs)


def random_instance(seed, n_nodes=6, n_edges=14, n_commodities=3, degree=1,
                    single_sink=False, constant_share=0.0, budget=None):
    """Random connected instance; every commodity gets a backbone path first.

    Edges beyond the backbones are drawn uniformly (parallel edges allowed,
    no self-loops). ``constant_share`` is the chance that an extra edge gets
    a constant latency.
    """
    rng = np.random.default_rng(seed)
    nodes = [f"n{i}" for i in range(n_nodes)]
    pairs, comms = [], []
    sink = int(rng.integers(n_nodes))
    for k in range(n_commodities):
        t = sink if single_sink else int(rng.integers(n_nodes))
        s = int(rng.choice([i for i in range(n_nodes) if i != t]))
        comms.append(Commodity(f"k{k}", nodes[s], nodes[t], float(rng.uniform(0.5, 2.0))))
        inner = [int(i) for i in rng.permutation([i for i in range(n_nodes) if i not in (s, t)])]
        hops = [s] + inner[: int(rng.integers(0, min(2, len(inner)) + 1))] + [t]
        pairs += list(zip(hops[:-1], hops[1:]))
    while len(pairs) < n_edges:
        a, b = (int(x) for x in rng.integers(n_nodes, size=2))
        if a != b:
            pairs.append((a, b))
    edges = []
    width = len(str(len(pairs)))
    for i, (a, b) in enumerate(pairs):
        if i >= n_commodities and rng.random() < constant_share:
            lat, price = LatencyFunction.constant(float(rng.uniform(0.5, 4.0))), 0.0
        else:
            lat, price = random_latency(rng, degree), float(rng.uniform(0.2, 3.0))
        edges.append(Edge(f"e{i:0{width}d}", nodes[a], nodes[b], lat, price))
    return Instance(nodes, edges, comms, budget)
