"""Command-line front end: ``cndp <command> [options]``.

Every command reads JSON files and writes one JSON document to --out or to
standard output. Exit status is 0 on success, 1 on a domain error (bad
instance, infeasible flow, solver failure) and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from pathlib import Path

from . import approx, gadgets
from .equilibrium import MAX_ITERS, TOL_GAP, equilibrate, marginal_equilibrium_check, verify_wardrop
from .errors import CNDPError, InstanceError
from .generators import random_instance
from .latency import FunctionClass
from .model import (CapacityVector, FlowAssignment, Solution, capacity_cost, dumps, load_json,
                    read_instance, routing_cost, validate_flow)
from .oracle import oracle
from .relaxation import solve_budgeted_relaxation, solve_relaxation, solve_single_sink

log = logging.getLogger("cndp")

LOG_LEVELS = {"error": logging.ERROR, "warning": logging.WARNING, "info": logging.INFO,
              "debug": logging.DEBUG}


def function_class(text):
    try:
        return FunctionClass.parse(text)
    except (InstanceError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def positive(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return x


def build_parser():
    p = argparse.ArgumentParser(prog="cndp", description="Continuous network design toolkit.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def command(name, help, instance=True):
        c = sub.add_parser(name, help=help)
        if instance:
            c.add_argument("--instance", required=True, help="instance JSON file")
        c.add_argument("--out", help="write the result here instead of stdout")
        return c

    c = command("solve", "approximate design with a certificate")
    c.add_argument("--algorithm", choices=approx.MODES, default="best2")
    c.add_argument("--dispatch-only", action="store_true",
                   help="best2: run only the algorithm picked by the threshold")
    c.add_argument("--class", dest="cls", type=function_class, help="poly:<deg>, concave or convex")
    c.add_argument("--budget", type=positive, help="budgeted: overrides the instance budget")
    c.add_argument("--tol", type=positive, default=TOL_GAP, help="equilibrium relative gap")
    c.add_argument("--max-iters", type=int, default=MAX_ITERS)

    command("relax", "relaxed optimum (lower bound)")
    command("single-sink", "exact design when all commodities share a sink")

    c = command("budget-relax", "relaxation under a capacity budget")
    c.add_argument("--budget", type=positive, help="defaults to the instance budget")

    c = command("equilibrium", "Wardrop equilibrium for given capacities")
    c.add_argument("--caps", required=True, help="capacities JSON (solution or edge -> value)")
    c.add_argument("--tol", type=positive, default=TOL_GAP)
    c.add_argument("--max-iters", type=int, default=MAX_ITERS)

    c = command("verify", "cost and equilibrium gap of a design")
    c.add_argument("--caps", required=True)
    c.add_argument("--flow", required=True, help="flows JSON (solution or commodity -> edge -> value)")

    c = sub.add_parser("gadget", help="compile a 3-CNF formula into an instance")
    c.add_argument("--cnf", required=True, help="DIMACS file")
    c.add_argument("--epsilon", type=float, default=gadgets.EPSILON)
    c.add_argument("--out", dest="instance_out",
                   help="write the instance here; stdout then gets a summary")
    c.add_argument("--witness", help="assignment JSON; also build and check the witness design")
    c.set_defaults(out=None)

    c = command("constants", "class constants and guarantees", instance=False)
    c.add_argument("--class", dest="cls", type=function_class, required=True)

    c = command("oracle", "grid search over capacities (at most 4 strict edges)", instance=False)
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance")
    src.add_argument("--random", action="store_true", help="use a seeded random instance")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--resolution", type=int, default=128)
    return p


def _section(obj, key):
    return obj[key] if isinstance(obj, dict) and key in obj else obj


def read_caps(inst, path):
    obj = _section(load_json(path), "capacities")
    if not isinstance(obj, dict):
        raise InstanceError(f"{path}: expected an object of edge capacities")
    return CapacityVector.from_json(inst, obj)


def read_flow(inst, path):
    obj = _section(load_json(path), "flows")
    if not isinstance(obj, dict):
        raise InstanceError(f"{path}: expected an object of commodity flows")
    return FlowAssignment.from_json(inst, obj)


def read_assignment(path):
    obj = load_json(path)
    if isinstance(obj, list):
        return {i + 1: bool(b) for i, b in enumerate(obj)}
    if isinstance(obj, dict):
        try:
            return {int(k): bool(v) for k, v in obj.items()}
        except ValueError:
            raise InstanceError(f"{path}: variable keys must be integers") from None
    raise InstanceError(f"{path}: expected a list or an object of truth values")


def cmd_solve(args):
    inst = read_instance(args.instance)
    kw = dict(tol_gap=args.tol, max_iters=args.max_iters)
    if args.algorithm == "budgeted":
        sol = approx.solve_budgeted(inst, args.budget, args.cls, **kw)
    else:
        params = approx.ApproxParams(function_class=args.cls, mode=args.algorithm,
                                     dispatch_only=args.dispatch_only, **kw)
        sol = approx.solve(inst, params)
    return sol.to_json(inst)


def _relaxed_json(inst, r, **extra):
    out = Solution(r.flow, r.caps).to_json(inst)
    out["relaxation"] = {"cost": r.cost, "routing_cost": r.routing_cost,
                         "capacity_cost": r.capacity_cost, "p": r.p, **extra}
    return out


def cmd_relax(args):
    inst = read_instance(args.instance)
    return _relaxed_json(inst, solve_relaxation(inst))


def cmd_single_sink(args):
    inst = read_instance(args.instance)
    r = solve_single_sink(inst)
    return _relaxed_json(inst, r, equilibrium_gap=r.gap)


def cmd_budget_relax(args):
    inst = read_instance(args.instance)
    r = solve_budgeted_relaxation(inst, args.budget)
    out = Solution(r.flow, r.caps).to_json(inst)
    out["relaxation"] = {"routing_cost": r.routing_cost, "spent": r.spent,
                         "budget": args.budget if args.budget else inst.budget,
                         "rho": r.rho, "slack": r.slack, "dual_bound": r.lower_bound}
    return out


def cmd_equilibrium(args):
    inst = read_instance(args.instance)
    caps = read_caps(inst, args.caps)
    res = equilibrate(inst, caps, args.tol, args.max_iters)
    out = Solution(res.flow, caps).to_json(inst)
    rc = routing_cost(inst, res.flow, caps)
    cc = capacity_cost(inst, caps)
    out["equilibrium"] = {"gap": res.gap, "iterations": res.iterations, "routing_cost": rc,
                          "capacity_cost": cc, "total": rc + cc}
    return out


def cmd_verify(args):
    inst = read_instance(args.instance)
    caps = read_caps(inst, args.caps)
    flow = read_flow(inst, args.flow)
    bad = validate_flow(inst, flow)
    if bad:
        return {"feasible": False, "violations": bad}
    rc = routing_cost(inst, flow, caps, check=False)
    cc = capacity_cost(inst, caps)
    return {"feasible": True, "violations": [], "routing_cost": rc, "capacity_cost": cc,
            "total": rc + cc, "equilibrium_gap": verify_wardrop(inst, caps, flow),
            "marginal_gap": marginal_equilibrium_check(inst, caps, flow)}


def cmd_gadget(args):
    try:
        text = Path(args.cnf).read_text()
    except OSError as exc:
        raise InstanceError(f"cannot read {args.cnf}: {exc.strerror}") from None
    formula = gadgets.parse_dimacs(text)
    g = gadgets.compile(formula, args.epsilon)
    out = {"variables": formula.num_vars, "clauses": len(formula.clauses), "epsilon": g.epsilon,
           "edges": g.instance.m, "optimum": g.optimum}
    if args.witness:
        flow, caps = gadgets.witness(g, read_assignment(args.witness))
        out["witness"] = Solution(flow, caps).to_json(g.instance)
        out["report"] = gadgets.verify_witness(g, flow, caps).to_json()
    if args.instance_out:
        _write(g.instance.to_json(), args.instance_out)
    else:
        out["instance"] = g.instance.to_json()
    return out


def cmd_constants(args):
    c = args.cls
    return {"class": str(c), "mu": c.mu, "gamma": c.gamma, "guarantee_single": c.guarantee_single,
            "guarantee_best2": c.guarantee_best2, "p_star": c.p_star,
            "guarantee_budget": c.guarantee_budget}


def cmd_oracle(args):
    inst = random_instance(args.seed, n_nodes=3, n_edges=3, n_commodities=1) if args.random \
        else read_instance(args.instance)
    res = oracle(inst, args.resolution)
    out = Solution(res.flow, res.caps).to_json(inst)
    out["oracle"] = {"cost": res.cost, "resolution": args.resolution, "z_max": res.z_max,
                     "evaluated": res.evaluated, "relaxation_cost": solve_relaxation(inst).cost}
    if args.random:
        out["instance"] = inst.to_json()
    return out


COMMANDS = {
    "solve": cmd_solve, "relax": cmd_relax, "single-sink": cmd_single_sink,
    "budget-relax": cmd_budget_relax, "equilibrium": cmd_equilibrium, "verify": cmd_verify,
    "gadget": cmd_gadget, "constants": cmd_constants, "oracle": cmd_oracle,
}


def _write(obj, path):
    text = dumps(obj) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _setup_logging():
    level = os.environ.get("CNDP_LOG", "warning").lower()
    logging.basicConfig(level=LOG_LEVELS.get(level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _setup_logging()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            result = COMMANDS[args.command](args)
        _write(result, args.out)
    except CNDPError as exc:
        print(f"cndp {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"cndp {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())
