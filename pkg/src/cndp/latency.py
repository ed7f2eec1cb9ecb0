"""Capacity-normalized latency functions and the class constants mu, gamma.

A latency is a polynomial ``S(x) = sum_j a_j x**j`` with non-negative
coefficients, evaluated at the load ratio ``x = v / z``, or a constant that
ignores load and capacity. Polynomials of degree >= 1 are *strict*: S and
x**2 S'(x) are strictly increasing and unbounded, which is what the root
queries below rely on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InfiniteLatency, InstanceError, NotStrictlyIncreasing, NumericalFailure

TOL_ROOT = 1e-10


def _real(value, what):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise InstanceError(f"{what}: not a number: {value!r}") from None
    if not math.isfinite(x):
        raise InstanceError(f"{what}: not finite: {value!r}")
    return x


@dataclass(frozen=True)
class LatencyFunction:
    kind: str
    coeffs: tuple

    def __post_init__(self):
        if self.kind not in ("polynomial", "constant"):
            raise InstanceError(f"unknown latency kind {self.kind!r}")
        coeffs = tuple(_real(a, "latency coefficient") for a in self.coeffs)
        if not coeffs:
            raise InstanceError("latency needs at least one coefficient")
        if self.kind == "constant" and len(coeffs) != 1:
            raise InstanceError("constant latency takes exactly one value")
        if any(a < 0 for a in coeffs):
            raise InstanceError(f"negative latency coefficient in {coeffs}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def polynomial(cls, coeffs):
        return cls("polynomial", tuple(coeffs))

    @classmethod
    def constant(cls, value):
        return cls("constant", (value,))

    @property
    def degree(self):
        if self.kind == "constant":
            return 0
        nz = [j for j, a in enumerate(self.coeffs) if a > 0]
        return nz[-1] if nz else 0

    @property
    def strict(self):
        return self.kind == "polynomial" and self.degree >= 1

    @property
    def array(self):
        """Coefficients as a float array (trailing zeros dropped)."""
        return np.array(self.coeffs[: self.degree + 1], dtype=float)

    def __call__(self, x):
        return evaluate(self, x)

    def derivative(self, x):
        if self.kind == "constant":
            return 0.0
        return kernels.dpoly(self.array, float(x))

    def to_json(self):
        if self.kind == "constant":
            return {"type": "constant", "value": self.coeffs[0]}
        return {"type": "polynomial", "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "type" not in obj:
            raise InstanceError(f"latency must be an object with a 'type': {obj!r}")
        if obj["type"] == "constant":
            if "value" not in obj:
                raise InstanceError("constant latency needs 'value'")
            return cls.constant(obj["value"])
        if obj["type"] == "polynomial":
            coeffs = obj.get("coeffs")
            if not isinstance(coeffs, list):
                raise InstanceError("polynomial latency needs a 'coeffs' list")
            return cls.polynomial(coeffs)
        raise InstanceError(f"unknown latency type {obj['type']!r}")

    def __str__(self):
        if self.kind == "constant":
            return f"{self.coeffs[0]:g}"
        terms = [f"{a:g}" + (f"x^{j}" if j > 1 else "x" if j == 1 else "")
                 for j, a in enumerate(self.coeffs) if a > 0]
        return " + ".join(terms) or "0"


def _check_x(x):
    x = float(x)
    if x < 0 or math.isnan(x):
        raise ValueError(f"latency argument must be non-negative, got {x}")
    return x


def evaluate(f: LatencyFunction, x: float) -> float:
    x = _check_x(x)
    if f.kind == "constant":
        return f.coeffs[0]
    return kernels.poly(f.array, x)


def marginal(f: LatencyFunction, x: float) -> float:
    """Marginal cost (x S(x))' = S(x) + x S'(x)."""
    x = _check_x(x)
    return evaluate(f, x) + x * f.derivative(x)


def _require_strict(f):
    if not f.strict:
        raise NotStrictlyIncreasing(f"latency {f} is constant; no unique root")


def solve_u(f: LatencyFunction, price: float, tol: float = TOL_ROOT) -> float:
    """The load ratio u > 0 at which u**2 S'(u) equals the capacity price."""
    _require_strict(f)
    if not price > 0:
        raise ValueError(f"price must be positive, got {price}")
    u = kernels.solve_u_scalar(f.array, float(price), tol)
    if not math.isfinite(u):
        raise NumericalFailure(f"u^2 S'(u) = {price} not solved for {f}")
    return u


def solve_gamma(f: LatencyFunction, delta: float, tol: float = TOL_ROOT) -> float:
    """Shrink factor gamma in (0, 1] with S(delta/gamma) = S(delta) + delta S'(delta).

    Returns 1 for ``delta == 0`` (unused edge, capacity left alone).
    """
    _require_strict(f)
    delta = _check_x(delta)
    if delta == 0.0:
        return 1.0
    y = kernels.solve_y_scalar(f.array, delta, tol)
    if not (math.isfinite(y) and y >= delta):
        raise NumericalFailure(f"no gamma in (0, 1] for {f} at delta={delta}")
    return delta / y


def beckmann_term(f: LatencyFunction, v: float, z: float) -> float:
    v = _check_x(v)
    if v == 0.0:
        return 0.0
    if f.kind == "constant":
        return f.coeffs[0] * v
    if not z > 0:
        raise InfiniteLatency(f"flow {v} on zero capacity")
    return kernels.beckmann_edge(f.array, True, v, float(z))


# ---------------------------------------------------------------- classes

@dataclass(frozen=True)
class FunctionClass:
    tag: str                 # "poly", "concave" or "convex"
    degree: int | None = None

    def __post_init__(self):
        if self.tag == "poly":
            if not isinstance(self.degree, int) or self.degree < 1:
                raise InstanceError(f"polynomial class needs a degree >= 1, got {self.degree!r}")
        elif self.tag in ("concave", "convex"):
            if self.degree is not None:
                raise InstanceError(f"class {self.tag} takes no degree")
        else:
            raise InstanceError(f"unknown function class {self.tag!r}")

    @classmethod
    def parse(cls, text):
        text = text.strip().lower()
        if text.startswith("poly:"):
            try:
                return cls("poly", int(text[5:]))
            except ValueError:
                raise InstanceError(f"bad polynomial degree in {text!r}") from None
        if text in ("concave", "convex"):
            return cls(text)
        raise InstanceError(f"class must be poly:<degree>, concave or convex; got {text!r}")

    def __str__(self):
        return f"poly:{self.degree}" if self.tag == "poly" else self.tag

    @property
    def mu(self):
        return mu_of_class(self)

    @property
    def gamma(self):
        return gamma_of_class(self)

    @property
    def p_star(self):
        """Dispatch threshold on the relaxation's routing share."""
        g, m = self.gamma, self.mu
        return (g - m + 1) ** 2 / ((g - m + 1) ** 2 + 4 * m)

    @property
    def guarantee_single(self):
        return 1.0 + self.mu

    @property
    def guarantee_best2(self):
        g, m = self.gamma, self.mu
        return (g + m + 1) ** 2 / ((g + m + 1) ** 2 - 4 * m * g)

    @property
    def guarantee_budget(self):
        return math.inf if self.mu >= 1 else 1.0 / (1.0 - self.mu)

    def admits(self, f: LatencyFunction):
        if self.tag == "convex":
            return True
        limit = 1 if self.tag == "concave" else self.degree
        return f.degree <= limit


def mu_of_class(c: FunctionClass) -> float:
    if c.tag == "poly":
        d = c.degree
        return d / (d + 1) * (1.0 / (d + 1)) ** (1.0 / d)
    return 0.25 if c.tag == "concave" else 1.0


def gamma_of_class(c: FunctionClass) -> float:
    if c.tag == "poly":
        d = c.degree
        return (1.0 / (d + 1)) ** (1.0 / d)
    return 0.5 if c.tag == "concave" else 1.0


def infer_class(latencies) -> FunctionClass:
    """Tightest polynomial class covering the given latencies (degree >= 1)."""
    return FunctionClass("poly", max([1] + [f.degree for f in latencies]))


def su_bound(mu, p):
    """Routing-share-dependent guarantee of uniform scaling."""
    return (math.sqrt(p) + math.sqrt(mu * max(0.0, 1 - p))) ** 2


def bte_bound(gamma, p):
    """Routing-share-dependent guarantee of per-edge shrinking."""
    return 1 + gamma * (1 - p)
