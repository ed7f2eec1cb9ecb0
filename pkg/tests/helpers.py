"""Instance builders and slow reference implementations shared by the tests."""
import itertools
import math

import numpy as np

from cndp.gadgets import CnfFormula
from cndp.latency import LatencyFunction
from cndp.model import Commodity, Edge, Instance


def poly(*coeffs):
    return LatencyFunction.polynomial(coeffs)


def one_edge(coeffs=(0.0, 1.0), price=1.0, demand=1.0, budget=None):
    return Instance(["s", "t"], [Edge("e", "s", "t", poly(*coeffs), price)],
                    [Commodity("k", "s", "t", demand)], budget)


def parallel(specs, demand=1.0, budget=None):
    """Parallel s-t edges, one per (coeffs, price) spec."""
    edges = [Edge(f"e{i}", "s", "t", poly(*c), p) for i, (c, p) in enumerate(specs)]
    return Instance(["s", "t"], edges, [Commodity("k", "s", "t", demand)], budget)


def bisect(f, lo, hi, iters=200):
    """Root of an increasing f on [lo, hi] by plain bisection."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ref_u(f, price):
    hi = 1.0
    while hi * hi * f.derivative(hi) < price:
        hi *= 2
    return bisect(lambda u: u * u * f.derivative(u) - price, 0.0, hi)


def bellman_ford(inst, weights, source):
    dist = [math.inf] * inst.n
    dist[inst.node(source)] = 0.0
    for _ in range(inst.n):
        for e in range(inst.m):
            a, b = inst.tail[e], inst.head[e]
            if dist[a] + weights[e] < dist[b]:
                dist[b] = dist[a] + weights[e]
    return dist


def brute_sat(formula):
    """First satisfying assignment found by enumeration, or None."""
    for bits in itertools.product((False, True), repeat=formula.num_vars):
        a = {i + 1: b for i, b in enumerate(bits)}
        if formula.satisfied_by(a) is None:
            return a
    return None


def random_formula(rng, nu, kappa):
    clauses = []
    for _ in range(kappa):
        vs = rng.choice(np.arange(1, nu + 1), size=3, replace=False)
        clauses.append(tuple(int(v) * (1 if rng.random() < 0.5 else -1) for v in vs))
    return CnfFormula(nu, tuple(clauses))


def random_satisfiable(rng, max_vars=8, max_clauses=12):
    while True:
        nu = int(rng.integers(3, max_vars + 1))
        kappa = int(rng.integers(1, max_clauses + 1))
        f = random_formula(rng, nu, kappa)
        a = brute_sat(f)
        if a is not None:
            return f, a
