"""Continuous network design: relaxation, approximation algorithms and certificates."""
from ._accel import backend
from .approx import (ApproxParams, best_of_two, bring_to_equilibrium, scale_uniformly, solve,
                     solve_budgeted)
from .equilibrium import (beckmann, equilibrate, marginal_equilibrium_check, solve_wardrop,
                          verify_wardrop)
from .errors import (BadNode, CNDPError, FlowInfeasible, InfiniteLatency, InstanceError,
                     MaxItersExceeded, NoFinitePath, NotStrictlyIncreasing, NumericalFailure,
                     SlackWarning, TooLarge, UnsatisfiedClause, WrongShape)
from .latency import FunctionClass, LatencyFunction, solve_gamma, solve_u
from .model import (CapacityVector, Certificate, Commodity, Edge, FlowAssignment, Instance,
                    Solution, capacity_cost, read_instance, routing_cost, total_cost)
from .oracle import oracle
from .relaxation import solve_budgeted_relaxation, solve_relaxation, solve_single_sink

__version__ = "0.1.0"
