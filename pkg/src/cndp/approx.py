"""Approximation algorithms for network design with certificates.

All algorithms start from the relaxed optimum (v*, z*), whose cost is a
lower bound on any design, and then shrink capacities until the flow they
induce is an equilibrium:

* ``bring_to_equilibrium`` shrinks each edge so that v* itself becomes an
  equilibrium,
* ``scale_uniformly`` shrinks all edges by one factor and re-equilibrates,
* ``best_of_two`` picks between them by the routing share p of the relaxed
  cost.

Each returns a :class:`Solution` whose certificate compares the realized cost
with the relaxation and with the guarantee of the function class.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .equilibrium import TOL_GAP, MAX_ITERS, solve_wardrop, verify_wardrop
from .errors import InstanceError
from .latency import TOL_ROOT, FunctionClass, bte_bound, infer_class, solve_gamma, su_bound
from .model import (CapacityVector, Certificate, Instance, Solution, capacity_cost, routing_cost)
from .relaxation import Relaxed, solve_budgeted_relaxation, solve_relaxation

log = logging.getLogger(__name__)

LOW_P = 0.01
MODES = ("bte", "su", "best2", "budgeted")


@dataclass(frozen=True)
class ApproxParams:
    function_class: FunctionClass | None = None
    tol_gap: float = TOL_GAP
    tol_root: float = TOL_ROOT
    mode: str = "best2"
    dispatch_only: bool = False
    max_iters: int = MAX_ITERS

    def __post_init__(self):
        if self.mode not in MODES:
            raise InstanceError(f"mode must be one of {MODES}, got {self.mode!r}")


def resolve_class(inst: Instance, cls: FunctionClass | None) -> FunctionClass:
    """The class used for certificates: given explicitly or inferred from degrees."""
    if cls is None:
        return infer_class(e.latency for e in inst.edges)
    bad = [e.id for e in inst.edges if not cls.admits(e.latency)]
    if bad:
        raise InstanceError(f"class {cls} does not cover latencies on edges {bad[:5]}")
    return cls


def _certificate(inst, algorithm, cls, relaxed, flow, caps, guarantee, bound_p, **extra):
    rc = routing_cost(inst, flow, caps)
    cc = capacity_cost(inst, caps)
    total = rc + cc
    ratio = total / relaxed.cost if relaxed.cost > 0 else 1.0
    p = relaxed.p
    if p < LOW_P:
        extra["low_p"] = True
    return Certificate(
        algorithm=algorithm, function_class=str(cls), relaxation_cost=relaxed.cost,
        routing_cost=rc, capacity_cost=cc, total=total, ratio=ratio, guarantee=guarantee,
        bound_p=bound_p, p=p, equilibrium_gap=verify_wardrop(inst, caps, flow),
        mu=cls.mu, gamma=cls.gamma, extra=extra)


def bring_to_equilibrium(inst: Instance, cls=None, relaxed: Relaxed | None = None,
                         tol_root=TOL_ROOT) -> Solution:
    cls = resolve_class(inst, cls)
    relaxed = relaxed or solve_relaxation(inst, tol_root)
    v = relaxed.flow.aggregate
    zstar = relaxed.caps.z
    z = zstar.copy()
    for e, edge in enumerate(inst.edges):
        if edge.latency.strict and zstar[e] > 0:
            z[e] = solve_gamma(edge.latency, v[e] / zstar[e], tol_root) * zstar[e]
    caps = CapacityVector(z)
    return Solution(relaxed.flow, caps, _certificate(
        inst, "bte", cls, relaxed, relaxed.flow, caps,
        guarantee=cls.guarantee_single, bound_p=bte_bound(cls.gamma, relaxed.p)))


def scale_factor(mu, p):
    """Uniform capacity factor for a relaxed routing share p < 1."""
    return mu + math.sqrt(mu * p / (1 - p))


def scale_uniformly(inst: Instance, cls=None, relaxed: Relaxed | None = None,
                    tol_gap=TOL_GAP, tol_root=TOL_ROOT, max_iters=MAX_ITERS) -> Solution:
    cls = resolve_class(inst, cls)
    relaxed = relaxed or solve_relaxation(inst, tol_root)
    p = relaxed.p
    if p >= 1 - 1e-12:
        # nothing to shrink: the relaxed routing is free of capacity cost
        lam = 1.0
        flow, caps = relaxed.flow, relaxed.caps
    else:
        lam = scale_factor(cls.mu, p)
        caps = CapacityVector(lam * relaxed.caps.z)
        flow = solve_wardrop(inst, caps, tol_gap, max_iters)
    return Solution(flow, caps, _certificate(
        inst, "su", cls, relaxed, flow, caps,
        guarantee=cls.guarantee_single, bound_p=su_bound(cls.mu, p), **{"lambda": lam}))


def best_of_two(inst: Instance, cls=None, dispatch_only=False, tol_gap=TOL_GAP,
                tol_root=TOL_ROOT, max_iters=MAX_ITERS) -> Solution:
    """Run the algorithm suited to the relaxed routing share (or both, keeping the cheaper)."""
    cls = resolve_class(inst, cls)
    relaxed = solve_relaxation(inst, tol_root)
    p, p_star = relaxed.p, cls.p_star
    dispatched = "su" if p <= p_star else "bte"

    def run(name):
        if name == "su":
            return scale_uniformly(inst, cls, relaxed, tol_gap, tol_root, max_iters)
        return bring_to_equilibrium(inst, cls, relaxed, tol_root)

    if dispatch_only:
        runs = {dispatched: run(dispatched)}
    else:
        runs = {name: run(name) for name in ("bte", "su")}
    chosen = min(runs, key=lambda name: (runs[name].certificate.total, name != dispatched))
    sol = runs[chosen]
    cert = sol.certificate
    extra = dict(cert.extra)
    extra.update(p_star=p_star, dispatched=dispatched, chosen=chosen,
                 **{f"ratio_{name}": r.certificate.ratio for name, r in runs.items()})
    best = Certificate(
        algorithm="best2", function_class=cert.function_class, relaxation_cost=cert.relaxation_cost,
        routing_cost=cert.routing_cost, capacity_cost=cert.capacity_cost, total=cert.total,
        ratio=cert.ratio, guarantee=cls.guarantee_best2,
        bound_p=min(bte_bound(cls.gamma, p), su_bound(cls.mu, p)), p=p,
        equilibrium_gap=cert.equilibrium_gap, mu=cls.mu, gamma=cls.gamma, extra=extra)
    return Solution(sol.flow, sol.caps, best)


def solve_budgeted(inst: Instance, budget=None, cls=None, tol_gap=TOL_GAP,
                   tol_root=TOL_ROOT, max_iters=MAX_ITERS) -> Solution:
    """Play the equilibrium on the capacities of the budgeted relaxation."""
    cls = resolve_class(inst, cls)
    br = solve_budgeted_relaxation(inst, budget, tol_root)
    flow = solve_wardrop(inst, br.caps, tol_gap, max_iters)
    rc = routing_cost(inst, flow, br.caps)
    cc = capacity_cost(inst, br.caps)
    ratio = rc / br.routing_cost if br.routing_cost > 0 else 1.0
    budget = inst.budget if budget is None else float(budget)
    cert = Certificate(
        algorithm="budgeted", function_class=str(cls), relaxation_cost=br.routing_cost,
        routing_cost=rc, capacity_cost=cc, total=rc + cc, ratio=ratio,
        guarantee=cls.guarantee_budget, bound_p=cls.guarantee_budget, p=1.0,
        equilibrium_gap=verify_wardrop(inst, br.caps, flow), mu=cls.mu, gamma=cls.gamma,
        extra={"budget": budget, "spent": br.spent, "rho": br.rho, "slack": br.slack,
               "dual_bound": br.lower_bound})
    return Solution(flow, br.caps, cert)


def solve(inst: Instance, params: ApproxParams = ApproxParams()) -> Solution:
    kw = dict(tol_gap=params.tol_gap, tol_root=params.tol_root, max_iters=params.max_iters)
    cls = params.function_class
    if params.mode == "bte":
        return bring_to_equilibrium(inst, cls, tol_root=params.tol_root)
    if params.mode == "su":
        return scale_uniformly(inst, cls, **kw)
    if params.mode == "budgeted":
        return solve_budgeted(inst, cls=cls, **kw)
    return best_of_two(inst, cls, params.dispatch_only, **kw)

