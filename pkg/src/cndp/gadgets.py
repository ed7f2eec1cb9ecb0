"""3-CNF formulas compiled into network design instances.

Every variable x_i gets a commodity with two parallel chains of literal
edges, one edge per clause for the positive literal and one for the
negative. Every clause k gets a commodity that either takes its clause edge
(latency 4 + x) or threads through the three literal edges of clause k.
Zero-latency connectors stitch the chains together. A satisfying assignment
yields a design whose cost equals the relaxed optimum 2*kappa*nu +
(4 + eps)*kappa.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .equilibrium import verify_wardrop
from .errors import InstanceError, UnsatisfiedClause
from .latency import LatencyFunction
from .model import (CapacityVector, Commodity, Edge, FlowAssignment, Instance, capacity_cost,
                    routing_cost, validate_flow)

EPSILON = 0.1
LITERAL = LatencyFunction.polynomial((0.0, 1.0))
CLAUSE = LatencyFunction.polynomial((4.0, 1.0))
CONNECTOR = LatencyFunction.constant(0.0)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple

    def __post_init__(self):
        clauses = tuple(tuple(int(a) for a in c) for c in self.clauses)
        if self.num_vars < 1:
            raise InstanceError("formula needs at least one variable")
        if not clauses:
            raise InstanceError("formula has no clauses")
        for k, c in enumerate(clauses):
            if len(c) != 3:
                raise InstanceError(f"clause {k + 1} has {len(c)} literals, expected 3")
            if any(a == 0 or abs(a) > self.num_vars for a in c):
                raise InstanceError(f"clause {k + 1} has a literal outside 1..{self.num_vars}")
            if len(set(c)) != 3:
                raise InstanceError(f"clause {k + 1} repeats a literal")
        object.__setattr__(self, "clauses", clauses)

    def satisfied_by(self, assignment):
        """Index of the first clause left false, or None."""
        for k, c in enumerate(self.clauses):
            if not any(assignment[abs(a)] == (a > 0) for a in c):
                return k
        return None


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses = []
    current = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InstanceError(f"line {lineno}: bad header {line!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise InstanceError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise InstanceError(f"line {lineno}: not an integer: {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if header is None:
        raise InstanceError("missing 'p cnf' header")
    if current:
        raise InstanceError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise InstanceError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], tuple(clauses))


def to_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    lines += [" ".join(str(a) for a in c) + " 0" for c in formula.clauses]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class GadgetInstance:
    instance: Instance
    epsilon: float
    formula: CnfFormula
    literal_edges: dict = field(default_factory=dict)   # (literal, clause index) -> edge index
    clause_edges: tuple = ()                            # clause index -> edge index
    chains: dict = field(default_factory=dict)          # literal -> edge indices s_x..t_x

    @property
    def optimum(self):
        """Cost of the design built from any satisfying assignment."""
        kappa, nu = len(self.formula.clauses), self.formula.num_vars
        return 2 * kappa * nu + (4 + self.epsilon) * kappa


def compile(formula: CnfFormula, epsilon: float = EPSILON) -> GadgetInstance:
    if not 0 < epsilon < 0.125:
        raise InstanceError(f"epsilon must lie in (0, 1/8), got {epsilon}")
    nu, kappa = formula.num_vars, len(formula.clauses)
    nodes, edges, comms = [], [], []
    literal_edges = {}
    clause_edges = []
    chains = {}

    def connect(a, b):
        edges.append(Edge(f"conn[{len(edges)}]", a, b, CONNECTOR, 0.0))

    def lit_nodes(lit, k):
        return f"x{abs(lit)}{'+' if lit > 0 else '-'}.{k + 1}a", f"x{abs(lit)}{'+' if lit > 0 else '-'}.{k + 1}b"

    for i in range(1, nu + 1):
        s, t = f"s_x{i}", f"t_x{i}"
        nodes += [s, t]
        for lit in (i, -i):
            prev = s
            start = len(edges)
            for k in range(kappa):
                a, b = lit_nodes(lit, k)
                nodes += [a, b]
                connect(prev, a)
                literal_edges[(lit, k)] = len(edges)
                edges.append(Edge(f"lit[{lit:+d},{k + 1}]", a, b, LITERAL, 1.0))
                prev = b
            connect(prev, t)
            chains[lit] = list(range(start, len(edges)))
        comms.append(Commodity(f"var[{i}]", s, t, 1.0))

    for k, clause in enumerate(formula.clauses):
        s, t = f"s_c{k + 1}", f"t_c{k + 1}"
        nodes += [s, t]
        clause_edges.append(len(edges))
        edges.append(Edge(f"clause[{k + 1}]", s, t, CLAUSE, (epsilon / 2) ** 2))
        prev = s
        for lit in sorted(clause, key=lambda a: (abs(a), a < 0)):
            a, b = lit_nodes(lit, k)
            connect(prev, a)
            prev = b
        connect(prev, t)
        comms.append(Commodity(f"clause[{k + 1}]", s, t, 1.0))

    inst = Instance(nodes, edges, comms)
    return GadgetInstance(inst, float(epsilon), formula, literal_edges, tuple(clause_edges), chains)


def witness(gadget: GadgetInstance, assignment):
    """Design and flow built from a satisfying assignment.

    ``assignment`` maps variable index (1-based) to bool, or is a sequence
    of bools for variables 1..nu. Raises UnsatisfiedClause otherwise.
    """
    formula = gadget.formula
    if not hasattr(assignment, "keys"):
        assignment = {i + 1: bool(b) for i, b in enumerate(assignment)}
    missing = [i for i in range(1, formula.num_vars + 1) if i not in assignment]
    if missing:
        raise InstanceError(f"assignment misses variables {missing}")
    k = formula.satisfied_by(assignment)
    if k is not None:
        raise UnsatisfiedClause(k, formula.clauses[k])
    inst = gadget.instance
    z = np.zeros(inst.m)
    vk = np.zeros((len(inst.commodities), inst.m))
    for i in range(1, formula.num_vars + 1):
        # capacity goes on the chain of the literal that is false
        path = gadget.chains[-i if assignment[i] else i]
        for e in path:
            if inst.edges[e].latency.strict:
                z[e] = 1.0
        vk[inst.commodity_index[f"var[{i}]"], path] = 1.0
    for k, e in enumerate(gadget.clause_edges):
        z[e] = 2.0 / gadget.epsilon
        vk[inst.commodity_index[f"clause[{k + 1}]"], e] = 1.0
    return FlowAssignment(vk), CapacityVector(z)


@dataclass
class WitnessReport:
    total: float
    expected: float
    cost_error: float
    gap: float
    cost_ok: bool
    gap_ok: bool
    violations: list
    unsat_lower_bound: float

    @property
    def passed(self):
        return self.cost_ok and self.gap_ok and not self.violations

    def to_json(self):
        return {"total": self.total, "expected": self.expected, "cost_error": self.cost_error,
                "gap": self.gap, "cost_ok": self.cost_ok, "gap_ok": self.gap_ok,
                "violations": self.violations, "passed": self.passed,
                "unsat_lower_bound": self.unsat_lower_bound}


def verify_witness(gadget: GadgetInstance, flow: FlowAssignment, caps: CapacityVector,
                   tol_cost=1e-9, tol_gap=1e-6) -> WitnessReport:
    inst = gadget.instance
    expected = gadget.optimum
    violations = validate_flow(inst, flow)
    if violations:
        total, gap = float("inf"), float("inf")
    else:
        total = routing_cost(inst, flow, caps, check=False) + capacity_cost(inst, caps)
        gap = verify_wardrop(inst, caps, flow)
    err = abs(total - expected)
    return WitnessReport(total, expected, err, gap, bool(err <= tol_cost * expected),
                         bool(gap <= tol_gap), violations, expected + 0.125)
