"""Instances, flows, capacities, costs, and their JSON forms."""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import BadNode, FlowInfeasible, InstanceError
from .latency import LatencyFunction


@dataclass(frozen=True)
class Edge:
    id: str
    tail: object
    head: object
    latency: LatencyFunction
    price: float


@dataclass(frozen=True)
class Commodity:
    id: str
    source: object
    sink: object
    demand: float


@dataclass(frozen=True, eq=False)
class Instance:
    nodes: tuple
    edges: tuple
    commodities: tuple
    budget: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "commodities", tuple(self.commodities))
        if len(set(self.nodes)) != len(self.nodes):
            raise InstanceError("duplicate node ids")
        known = set(self.nodes)
        seen = set()
        for e in self.edges:
            if e.id in seen:
                raise InstanceError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            for end in (e.tail, e.head):
                if end not in known:
                    raise InstanceError(f"edge {e.id!r} references unknown node {end!r}")
            if e.tail == e.head:
                raise InstanceError(f"edge {e.id!r} is a self-loop")
            if not (math.isfinite(e.price) and e.price >= 0):
                raise InstanceError(f"edge {e.id!r} has invalid price {e.price!r}")
            if e.latency.strict and e.price <= 0:
                raise InstanceError(f"edge {e.id!r}: load-dependent edges need a positive price")
        if not self.commodities:
            raise InstanceError("instance has no commodities")
        ids = set()
        for k in self.commodities:
            if k.id in ids:
                raise InstanceError(f"duplicate commodity id {k.id!r}")
            ids.add(k.id)
            for end in (k.source, k.sink):
                if end not in known:
                    raise InstanceError(f"commodity {k.id!r} references unknown node {end!r}")
            if k.source == k.sink:
                raise InstanceError(f"commodity {k.id!r} has identical source and sink")
            if not (math.isfinite(k.demand) and k.demand > 0):
                raise InstanceError(f"commodity {k.id!r} needs a positive demand")
            if not self._reachable(k.source, k.sink):
                raise InstanceError(f"commodity {k.id!r}: no directed path {k.source!r} -> {k.sink!r}")
        if self.budget is not None and not (math.isfinite(self.budget) and self.budget > 0):
            raise InstanceError(f"budget must be positive, got {self.budget!r}")

    def _reachable(self, s, t):
        idx = self.node_index
        ptr, adj = self.out_csr
        seen = {idx[s]}
        queue = deque([idx[s]])
        while queue:
            i = queue.popleft()
            for e in adj[ptr[i]:ptr[i + 1]]:
                j = self.head[e]
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        return idx[t] in seen

    # ---- array views (built once) ----------------------------------------
    @cached_property
    def node_index(self):
        return {v: i for i, v in enumerate(self.nodes)}

    @cached_property
    def edge_index(self):
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def commodity_index(self):
        return {k.id: i for i, k in enumerate(self.commodities)}

    def node(self, v):
        try:
            return self.node_index[v]
        except KeyError:
            raise BadNode(v) from None

    @property
    def n(self):
        return len(self.nodes)

    @property
    def m(self):
        return len(self.edges)

    @cached_property
    def tail(self):
        return np.array([self.node_index[e.tail] for e in self.edges], dtype=np.int64)

    @cached_property
    def head(self):
        return np.array([self.node_index[e.head] for e in self.edges], dtype=np.int64)

    @cached_property
    def coef(self):
        deg = max([0] + [e.latency.degree for e in self.edges])
        out = np.zeros((self.m, deg + 1))
        for i, e in enumerate(self.edges):
            a = e.latency.array
            out[i, : a.shape[0]] = a
        return out

    @cached_property
    def strict(self):
        return np.array([e.latency.strict for e in self.edges], dtype=np.bool_)

    @cached_property
    def prices(self):
        return np.array([e.price for e in self.edges], dtype=float)

    @cached_property
    def sources(self):
        return np.array([self.node_index[k.source] for k in self.commodities], dtype=np.int64)

    @cached_property
    def sinks(self):
        return np.array([self.node_index[k.sink] for k in self.commodities], dtype=np.int64)

    @cached_property
    def demands(self):
        return np.array([k.demand for k in self.commodities], dtype=float)

    def _csr(self, ends):
        order = np.lexsort((np.arange(self.m), ends))
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(ptr, ends + 1, 1)
        return np.cumsum(ptr), order.astype(np.int64)

    @cached_property
    def out_csr(self):
        return self._csr(self.tail)

    @cached_property
    def in_csr(self):
        return self._csr(self.head)

    @property
    def max_degree(self):
        return max([0] + [e.latency.degree for e in self.edges])

    # ---- JSON --------------------------------------------------------------
    def to_json(self):
        out = {
            "nodes": list(self.nodes),
            "edges": [{"id": e.id, "tail": e.tail, "head": e.head,
                       "latency": e.latency.to_json(), "price": e.price} for e in self.edges],
            "commodities": [{"id": k.id, "source": k.source, "sink": k.sink, "demand": k.demand}
                            for k in self.commodities],
        }
        if self.budget is not None:
            out["budget"] = self.budget
        return out

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise InstanceError("instance JSON must be an object")
        for key in ("nodes", "edges", "commodities"):
            if not isinstance(obj.get(key), list):
                raise InstanceError(f"instance JSON needs a '{key}' list")
        edges = []
        for i, e in enumerate(obj["edges"]):
            try:
                edges.append(Edge(str(e.get("id", f"e{i}")), e["tail"], e["head"],
                                  LatencyFunction.from_json(e["latency"]), _num(e["price"], "price")))
            except KeyError as exc:
                raise InstanceError(f"edge #{i} misses field {exc}") from None
        comms = []
        for i, k in enumerate(obj["commodities"]):
            try:
                comms.append(Commodity(str(k.get("id", f"k{i}")), k["source"], k["sink"],
                                       _num(k["demand"], "demand")))
            except KeyError as exc:
                raise InstanceError(f"commodity #{i} misses field {exc}") from None
        budget = obj.get("budget")
        return cls(obj["nodes"], edges, comms, None if budget is None else _num(budget, "budget"))


def _num(x, what):
    try:
        return float(x)
    except (TypeError, ValueError):
        raise InstanceError(f"{what} is not a number: {x!r}") from None


# ---------------------------------------------------------------- solutions

@dataclass(frozen=True, eq=False)
class FlowAssignment:
    """Per-commodity edge flows, shape (K, m). The aggregate is derived."""
    per_commodity: np.ndarray

    @property
    def aggregate(self):
        return self.per_commodity.sum(axis=0)

    @classmethod
    def zeros(cls, inst):
        return cls(np.zeros((len(inst.commodities), inst.m)))

    def to_json(self, inst):
        out = {}
        for k in sorted(range(len(inst.commodities)), key=lambda i: inst.commodities[i].id):
            row = self.per_commodity[k]
            out[inst.commodities[k].id] = {
                inst.edges[e].id: float(row[e])
                for e in sorted(range(inst.m), key=lambda i: inst.edges[i].id) if row[e] != 0.0}
        return out

    @classmethod
    def from_json(cls, inst, obj):
        arr = np.zeros((len(inst.commodities), inst.m))
        for kid, row in obj.items():
            if kid not in inst.commodity_index:
                raise InstanceError(f"flow for unknown commodity {kid!r}")
            for eid, val in row.items():
                if eid not in inst.edge_index:
                    raise InstanceError(f"flow on unknown edge {eid!r}")
                arr[inst.commodity_index[kid], inst.edge_index[eid]] = _num(val, "flow")
        return cls(arr)


@dataclass(frozen=True, eq=False)
class CapacityVector:
    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if np.any(~np.isfinite(z)) or np.any(z < 0):
            raise InstanceError("capacities must be finite and non-negative")
        object.__setattr__(self, "z", z)

    @classmethod
    def zeros(cls, inst):
        return cls(np.zeros(inst.m))

    def to_json(self, inst):
        return {inst.edges[e].id: float(self.z[e])
                for e in sorted(range(inst.m), key=lambda i: inst.edges[i].id)}

    @classmethod
    def from_json(cls, inst, obj):
        z = np.zeros(inst.m)
        for eid, val in obj.items():
            if eid not in inst.edge_index:
                raise InstanceError(f"capacity on unknown edge {eid!r}")
            z[inst.edge_index[eid]] = _num(val, "capacity")
        return cls(z)


@dataclass
class Certificate:
    algorithm: str
    function_class: str
    relaxation_cost: float
    routing_cost: float
    capacity_cost: float
    total: float
    ratio: float
    guarantee: float
    bound_p: float
    p: float
    equilibrium_gap: float
    mu: float
    gamma: float
    extra: dict = field(default_factory=dict)

    def to_json(self):
        out = {k: getattr(self, k) for k in (
            "algorithm", "function_class", "relaxation_cost", "routing_cost", "capacity_cost",
            "total", "ratio", "guarantee", "bound_p", "p", "equilibrium_gap", "mu", "gamma")}
        out.update(self.extra)
        return out


@dataclass
class Solution:
    flow: FlowAssignment
    caps: CapacityVector
    certificate: Certificate | None = None

    def __iter__(self):
        return iter((self.flow, self.caps, self.certificate))

    def to_json(self, inst):
        out = {"capacities": self.caps.to_json(inst), "flows": self.flow.to_json(inst)}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out

    @classmethod
    def from_json(cls, inst, obj):
        flow = FlowAssignment.from_json(inst, obj.get("flows", {}))
        caps = CapacityVector.from_json(inst, obj.get("capacities", {}))
        return cls(flow, caps)


# ---------------------------------------------------------------- costs

def flow_tolerance(demand):
    return 1e-8 * max(1.0, demand)


def validate_flow(inst: Instance, flow: FlowAssignment):
    """Conservation violations as human-readable strings (empty list if feasible)."""
    vk = np.asarray(flow.per_commodity)
    if vk.shape != (len(inst.commodities), inst.m):
        return [f"flow has shape {vk.shape}, expected {(len(inst.commodities), inst.m)}"]
    out = []
    for k, com in enumerate(inst.commodities):
        tol = flow_tolerance(com.demand)
        neg = np.flatnonzero(vk[k] < -tol)
        for e in neg:
            out.append(f"commodity {com.id}: negative flow {vk[k, e]:.6g} on edge {inst.edges[e].id}")
        net = np.zeros(inst.n)
        np.add.at(net, inst.tail, vk[k])
        np.subtract.at(net, inst.head, vk[k])
        want = np.zeros(inst.n)
        want[inst.node_index[com.source]] = com.demand
        want[inst.node_index[com.sink]] = -com.demand
        for i in np.flatnonzero(np.abs(net - want) > tol):
            out.append(f"commodity {com.id}: node {inst.nodes[i]!r} has net outflow "
                       f"{net[i]:.17g}, expected {want[i]:.17g}")
    return out


def edge_loads(inst, v, z):
    """Per-edge latency S(v/z); inf for loaded strict edges without capacity."""
    t = np.empty(inst.m)
    for e, edge in enumerate(inst.edges):
        if not edge.latency.strict:
            t[e] = edge.latency.coeffs[0]
        elif z[e] > 0:
            t[e] = edge.latency(max(v[e], 0.0) / z[e])
        else:
            t[e] = math.inf if v[e] > 0 else edge.latency(0.0)
    return t


def routing_cost(inst: Instance, flow: FlowAssignment, caps: CapacityVector, check=True) -> float:
    if check:
        bad = validate_flow(inst, flow)
        if bad:
            raise FlowInfeasible(bad)
    v = flow.aggregate
    t = edge_loads(inst, v, caps.z)
    used = v > 0
    if np.any(np.isinf(t[used])):
        return math.inf
    return float(np.dot(t[used], v[used]))


def capacity_cost(inst: Instance, caps: CapacityVector) -> float:
    return float(np.dot(inst.prices, caps.z))


def total_cost(inst, flow, caps, check=True):
    return routing_cost(inst, flow, caps, check) + capacity_cost(inst, caps)


# ---------------------------------------------------------------- JSON text

def _fmt(x):
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    return json.dumps(x)


def dumps(obj, indent=2, _level=0):
    """JSON text with every real printed to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_fmt(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    return _fmt(obj)


def loads(text, source="<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        line = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise InstanceError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line}\n"
                            f"    {' ' * (exc.colno - 1)}^") from None


def load_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, str(path))


def read_instance(path):
    return Instance.from_json(load_json(path))
