"""Relaxed network design: capacity choice without the equilibrium constraint.

Once capacities may be bought per unit of flow, each strict edge settles at
the load ratio u_e solving u**2 S'(u) = price, so a unit of flow on it costs
``S(u_e) + price / u_e`` in total. The relaxed problem then reduces to one
shortest-path query per commodity.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .equilibrium import verify_wardrop
from .errors import NoFinitePath, NumericalFailure, SlackWarning, WrongShape
from .latency import TOL_ROOT
from .model import CapacityVector, FlowAssignment, Instance, routing_cost
from .paths import WeightedView, shortest_path, shortest_path_tree, tree_path

log = logging.getLogger(__name__)


@dataclass
class Relaxed:
    flow: FlowAssignment
    caps: CapacityVector
    cost: float
    routing_cost: float
    capacity_cost: float
    u: np.ndarray            # per-edge optimal load ratio (0 for constant edges)
    weights: np.ndarray      # per-unit total cost of each edge
    paths: list = field(default_factory=list)
    gap: float = 0.0

    def __iter__(self):
        return iter((self.flow, self.caps, self.cost))

    @property
    def p(self):
        """Share of the relaxed cost spent on routing."""
        return min(1.0, self.routing_cost / self.cost) if self.cost > 0 else 1.0


def unit_weights(inst: Instance, scale=1.0, tol=TOL_ROOT):
    """Per-edge (u, w) for capacity prices scaled by ``scale``."""
    prices = inst.prices * scale
    u = kernels.solve_u_rows(inst.coef, inst.strict, prices, tol)
    if np.any(~np.isfinite(u)):
        bad = [inst.edges[e].id for e in np.flatnonzero(~np.isfinite(u))]
        raise NumericalFailure(f"u^2 S'(u) = price unsolved on edges {bad}")
    w = inst.coef[:, 0].copy()
    s = inst.strict
    w[s] = kernels.poly_rows(inst.coef[s], u[s]) + prices[s] / u[s]
    return u, w


def _assemble(inst, paths, u):
    vk = np.zeros((len(inst.commodities), inst.m))
    for k, path in enumerate(paths):
        vk[k, path] = inst.demands[k]
    v = vk.sum(axis=0)
    z = np.zeros(inst.m)
    s = inst.strict
    z[s] = v[s] / u[s]
    return FlowAssignment(vk), CapacityVector(z)


def _split(inst, v, u):
    s = inst.strict
    rc = float(np.dot(kernels.poly_rows(inst.coef[s], u[s]), v[s])) + float(np.dot(inst.coef[~s, 0], v[~s]))
    cc = float(np.dot(inst.prices[s], v[s] / u[s]))
    return rc, cc


def solve_relaxation(inst: Instance, tol=TOL_ROOT) -> Relaxed:
    u, w = unit_weights(inst, tol=tol)
    view = WeightedView(inst, w)
    paths = []
    cost = 0.0
    for com in inst.commodities:
        path, dist = shortest_path(view, com.source, com.sink)
        if not math.isfinite(dist):
            raise NoFinitePath(com.id)
        paths.append(path)
        cost += com.demand * dist
    flow, caps = _assemble(inst, paths, u)
    rc, cc = _split(inst, flow.aggregate, u)
    return Relaxed(flow, caps, cost, rc, cc, u, w, paths)


def solve_single_sink(inst: Instance, tol=TOL_ROOT) -> Relaxed:
    """Exact design for instances whose commodities share one sink.

    Demands are aggregated down a shortest-path tree into the sink, so every
    commodity keeps a single capacitated path and the relaxed optimum is met
    in equilibrium. Constant-latency edges off the tree stay usable and can
    break that; the returned ``gap`` reports it.
    """
    sinks = {com.sink for com in inst.commodities}
    if len(sinks) != 1:
        raise WrongShape(f"single-sink solver needs one sink, instance has {len(sinks)}")
    (sink,) = sinks
    u, w = unit_weights(inst, tol=tol)
    _, dist, nxt = shortest_path_tree(WeightedView(inst, w), sink)
    paths = []
    cost = 0.0
    for com in inst.commodities:
        path = tree_path(inst, nxt, com.source, sink)
        if path is None:
            raise NoFinitePath(com.id)
        paths.append(path)
        cost += com.demand * float(dist[inst.node(com.source)])
    flow, caps = _assemble(inst, paths, u)
    rc, cc = _split(inst, flow.aggregate, u)
    out = Relaxed(flow, caps, cost, rc, cc, u, w, paths)
    out.gap = verify_wardrop(inst, caps, flow)
    if out.gap > 1e-6:
        log.warning("single-sink design is not an equilibrium (gap %.3e); "
                    "constant-latency detours undercut the tree", out.gap)
    return out


# ---------------------------------------------------------------- budgets

@dataclass
class BudgetRelaxed:
    flow: FlowAssignment
    caps: CapacityVector
    routing_cost: float
    spent: float
    rho: float
    slack: bool = False
    lower_bound: float = 0.0     # best Lagrangian dual value seen

    def __iter__(self):
        return iter((self.flow, self.caps, self.routing_cost))


RHO_GRID = np.logspace(-6, 6, 61)
RHO_BISECT = 80
TOL_BUDGET = 1e-6
RHO_LIMITS = (1e-30, 1e30)     # how far the grid may be widened


@dataclass
class _Point:
    rho: float
    paths: tuple
    flow: FlowAssignment
    spent: float
    value: float                 # sum of demand times shortest distance


def _lagrange(inst, rho, tol):
    """Minimizer of the Lagrangian with capacity prices scaled by ``rho``."""
    u, w = unit_weights(inst, scale=rho, tol=tol)
    view = WeightedView(inst, w)
    paths, value = [], 0.0
    for com in inst.commodities:
        path, dist = shortest_path(view, com.source, com.sink)
        if not math.isfinite(dist):
            raise NoFinitePath(com.id)
        paths.append(tuple(path))
        value += com.demand * dist
    flow, caps = _assemble(inst, paths, u)
    return _Point(float(rho), tuple(paths), flow, float(np.dot(inst.prices, caps.z)), value)


def _caps_for_budget(inst, v, budget, tol):
    """Cheapest-routing capacities for a fixed aggregate flow and a spend of ``budget``."""
    s = inst.strict & (v > 0)
    if not np.any(s):
        # nothing to spend on: the budget stays unused
        return np.zeros(inst.m), math.inf, True
    coef, prices, vs = inst.coef[s], inst.prices[s], v[s]

    def spend(rho):
        delta = kernels.solve_u_rows(coef, np.ones(len(vs), dtype=bool), prices * rho, tol)
        return float(np.dot(prices, vs / delta)), delta

    lo, hi = 1.0, 1.0
    while spend(lo)[0] < budget and lo > 1e-300:
        lo *= 1e-3
    while spend(hi)[0] > budget and hi < 1e300:
        hi *= 1e3
    slack = not (spend(lo)[0] >= budget >= spend(hi)[0])
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if spend(mid)[0] >= budget:
            lo = mid
        else:
            hi = mid
        if hi / lo - 1 < 1e-14:
            break
    spent, delta = spend(hi)
    z = np.zeros(inst.m)
    z[s] = vs / delta * (budget / spent)
    return z, hi, slack


def _mix(inst, a, b, budget, tol):
    """Convex combination of two Lagrangian minimizers spending exactly ``budget``.

    Both routings are optimal at the multiplier where the spend jumps across
    the budget, and so is every mixture of them; the one with spend B
    solves the budgeted problem.
    """
    rho = math.sqrt(a.rho * b.rho)
    u, _ = unit_weights(inst, scale=rho, tol=tol)
    s = inst.strict

    def spend(flow):
        return float(np.dot(inst.prices[s], flow.aggregate[s] / u[s]))

    sa, sb = spend(a.flow), spend(b.flow)
    theta = 1.0 if sa == sb else min(1.0, max(0.0, (budget - sb) / (sa - sb)))
    return FlowAssignment(theta * a.flow.per_commodity + (1 - theta) * b.flow.per_commodity)


def solve_budgeted_relaxation(inst: Instance, budget=None, tol=TOL_ROOT) -> BudgetRelaxed:
    """Minimize routing cost over flows and capacities with total spend <= budget.

    The Lagrangian subproblem (capacity prices scaled by rho) is a shortest
    path problem. A log grid over rho, widened if needed, brackets the
    budget; bisection narrows the bracket and the two bracketing routings
    are mixed to spend exactly B. Every routing met on the way is also
    tried with its own budget-exhausting capacities, and the cheapest wins.
    ``lower_bound`` is the best dual value sum(d * dist) - rho * B.
    """
    budget = inst.budget if budget is None else float(budget)
    if budget is None or not budget > 0:
        raise ValueError("a positive budget is required")
    points = [_lagrange(inst, rho, tol) for rho in RHO_GRID]
    while points[0].spent < budget and points[0].rho > RHO_LIMITS[0]:
        points.insert(0, _lagrange(inst, points[0].rho * 1e-3, tol))
    while points[-1].spent > budget and points[-1].rho < RHO_LIMITS[1]:
        points.append(_lagrange(inst, points[-1].rho * 1e3, tol))
    above = [i for i, pt in enumerate(points) if pt.spent >= budget]
    flows = {pt.paths: pt.flow for pt in points}
    if above and above[-1] + 1 < len(points):
        a, b = points[above[-1]], points[above[-1] + 1]
        for _ in range(RHO_BISECT):
            mid = _lagrange(inst, math.sqrt(a.rho * b.rho), tol)
            points.append(mid)
            flows.setdefault(mid.paths, mid.flow)
            if mid.spent >= budget:
                a = mid
            else:
                b = mid
        flows["mix"] = _mix(inst, a, b, budget, tol)
    lower = max(pt.value - pt.rho * budget for pt in points)

    best = None
    for flow in flows.values():
        z, rho, slack = _caps_for_budget(inst, flow.aggregate, budget, tol)
        caps = CapacityVector(z)
        rc = routing_cost(inst, flow, caps, check=False)
        if best is None or rc < best.routing_cost:
            best = BudgetRelaxed(flow, caps, rc, float(np.dot(inst.prices, z)), rho, slack, lower)
    best.slack = best.slack or best.spent < budget * (1 - TOL_BUDGET)
    if best.slack:
        warnings.warn(f"budget {budget} could not be matched exactly (spent {best.spent:.6g})",
                      SlackWarning, stacklevel=2)
    return best
