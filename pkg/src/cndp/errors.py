"""Exception hierarchy. Every domain failure derives from CNDPError."""


class CNDPError(Exception):
    pass


class InstanceError(CNDPError, ValueError):
    """Malformed instance, formula, or JSON document."""


class NotStrictlyIncreasing(CNDPError):
    pass


class NumericalFailure(CNDPError):
    pass


class InfiniteLatency(CNDPError):
    pass


class FlowInfeasible(CNDPError):
    def __init__(self, violations):
        self.violations = list(violations)
        head = "; ".join(str(v) for v in self.violations[:3])
        super().__init__(f"flow violates conservation: {head}")


class BadNode(CNDPError, KeyError):
    def __str__(self):
        return f"unknown node {self.args[0]!r}"


class NoFinitePath(CNDPError):
    def __init__(self, commodity):
        self.commodity = commodity
        super().__init__(f"commodity {commodity!r} has no finite-latency path")


class MaxItersExceeded(CNDPError):
    def __init__(self, flow, gap, iterations):
        self.flow = flow
        self.gap = gap
        self.iterations = iterations
        super().__init__(f"no equilibrium within {iterations} iterations (relative gap {gap:.3e})")


class WrongShape(CNDPError):
    pass


class UnsatisfiedClause(CNDPError):
    def __init__(self, index, clause):
        self.index = index
        self.clause = clause
        super().__init__(f"clause {index + 1} {clause} is not satisfied")


class TooLarge(CNDPError):
    pass


class SlackWarning(UserWarning):
    """Budget could not be matched; the returned solution is a best effort."""
