"""Exhaustive capacity grid search, an independent check for tiny instances."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import TooLarge
from .model import CapacityVector, FlowAssignment, Instance
from .relaxation import solve_relaxation

MAX_STRICT = 4


@dataclass
class OracleResult:
    flow: FlowAssignment
    caps: CapacityVector
    cost: float
    evaluated: int
    z_max: float


def oracle(inst: Instance, resolution=128, tol_gap=1e-10, max_iters=10_000) -> OracleResult:
    """Best equilibrium design over a capacity grid.

    Each strict edge ranges over ``resolution + 1`` evenly spaced values in
    [0, z_max] with z_max twice the largest relaxed capacity. The cost is an
    upper bound on the optimum that tightens as the grid is refined.
    """
    strict = np.flatnonzero(inst.strict)
    if len(strict) > MAX_STRICT:
        raise TooLarge(f"oracle handles at most {MAX_STRICT} load-dependent edges, got {len(strict)}")
    if resolution < 16:
        raise ValueError("grid resolution must be at least 16")
    relaxed = solve_relaxation(inst)
    z_max = 2.0 * float(relaxed.caps.z.max()) if len(strict) else 0.0
    axis = z_max * np.arange(resolution + 1) / resolution
    ptr, adj = inst.out_csr
    best, evaluated = None, 0
    z = np.zeros(inst.m)
    for combo in itertools.product(axis, repeat=len(strict)):
        z[strict] = combo
        flows, gap, _, _, status, _ = kernels.frank_wolfe(
            inst.n, ptr, adj, inst.tail, inst.head, inst.coef, inst.strict, z,
            inst.sources, inst.sinks, inst.demands, tol_gap, max_iters)
        if status == kernels.FW_NO_PATH:
            continue
        evaluated += 1
        v = flows.sum(axis=0)
        usable = ~inst.strict | (z > 0)
        t = kernels.edge_latency(inst.coef, inst.strict, usable, v, z, False)
        used = v > 0
        cost = float(np.dot(t[used], v[used])) + float(np.dot(inst.prices, z))
        if math.isfinite(cost) and (best is None or cost < best[0]):
            best = (cost, flows, z.copy())
    if best is None:
        raise TooLarge("no grid point admits a finite routing")
    cost, flows, zb = best
    return OracleResult(FlowAssignment(flows), CapacityVector(zb), cost, evaluated, z_max)
