"""Wardrop equilibria for fixed capacities and their verification."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import FlowInfeasible, MaxItersExceeded, NoFinitePath
from .model import CapacityVector, FlowAssignment, Instance, validate_flow

log = logging.getLogger(__name__)

TOL_GAP = 1e-8
MAX_ITERS = 100_000


@dataclass
class WardropResult:
    flow: FlowAssignment
    gap: float
    iterations: int
    potentials: np.ndarray   # Beckmann potential at the start of every pass


def equilibrate(inst: Instance, caps: CapacityVector, tol_gap=TOL_GAP, max_iters=MAX_ITERS):
    """Minimize the Beckmann potential over feasible flows for capacities ``caps``.

    Strict edges without capacity are dropped from the routable graph. Raises
    NoFinitePath if a commodity loses all its paths that way, and
    MaxItersExceeded (carrying the last iterate) if the relative gap does not
    reach ``tol_gap``.
    """
    if not tol_gap > 0:
        raise ValueError("tol_gap must be positive")
    ptr, adj = inst.out_csr
    flows, gap, iters, hist, status, info = kernels.frank_wolfe(
        inst.n, ptr, adj, inst.tail, inst.head, inst.coef, inst.strict,
        np.asarray(caps.z, dtype=float), inst.sources, inst.sinks, inst.demands,
        float(tol_gap), int(max_iters))
    if status == kernels.FW_NO_PATH:
        raise NoFinitePath(inst.commodities[info].id)
    result = WardropResult(FlowAssignment(flows), float(gap), int(iters), hist.copy())
    if status != kernels.FW_CONVERGED:
        raise MaxItersExceeded(result.flow, result.gap, result.iterations)
    log.debug("equilibrium: %d passes, relative gap %.3e", iters, gap)
    return result


def solve_wardrop(inst, caps, tol_gap=TOL_GAP, max_iters=MAX_ITERS) -> FlowAssignment:
    return equilibrate(inst, caps, tol_gap, max_iters).flow


def _gap(inst, caps, flow, marginal):
    bad = validate_flow(inst, flow)
    if bad:
        raise FlowInfeasible(bad)
    z = np.asarray(caps.z, dtype=float)
    v = flow.aggregate
    usable = ~inst.strict | (z > 0)
    if np.any(v[~usable] > 0):
        return math.inf
    t = kernels.edge_latency(inst.coef, inst.strict, usable, v, z, marginal)
    used = v > 0
    total = float(np.dot(t[used], v[used]))
    ptr, adj = inst.out_csr
    lower = 0.0
    for k in range(len(inst.commodities)):
        dist, _ = kernels.dijkstra(inst.n, ptr, adj, inst.head, t, inst.sources[k])
        lower += inst.demands[k] * dist[inst.sinks[k]]
    return float(max(total - lower, 0.0) / max(1.0, total))


def verify_wardrop(inst: Instance, caps: CapacityVector, flow: FlowAssignment) -> float:
    """Relative variational-inequality gap; 0 exactly at a Wardrop equilibrium."""
    return _gap(inst, caps, flow, marginal=False)


def marginal_equilibrium_check(inst: Instance, caps: CapacityVector, flow: FlowAssignment) -> float:
    """The same gap under marginal costs S + xS' (zero iff system-optimal for ``caps``)."""
    return _gap(inst, caps, flow, marginal=True)


def beckmann(inst, caps, flow):
    z = np.asarray(caps.z, dtype=float)
    usable = ~inst.strict | (z > 0)
    v = flow.aggregate
    if np.any(v[~usable] > 0):
        return math.inf
    return kernels.beckmann_potential(inst.coef, inst.strict, usable, v, z)
