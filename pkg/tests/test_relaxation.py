import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cndp.equilibrium import verify_wardrop
from cndp.errors import SlackWarning, WrongShape
from cndp.generators import random_instance
from cndp.latency import LatencyFunction
from cndp.model import Commodity, Edge, Instance, total_cost
from cndp.relaxation import solve_budgeted_relaxation, solve_relaxation, solve_single_sink
from helpers import bellman_ford, one_edge, parallel, poly, ref_u


def test_single_edge():
    r = solve_relaxation(one_edge())
    assert r.u[0] == pytest.approx(1.0, rel=1e-12)
    assert r.weights[0] == pytest.approx(2.0, rel=1e-12)
    assert r.caps.z[0] == pytest.approx(1.0, rel=1e-12)
    assert r.cost == pytest.approx(2.0, rel=1e-12)
    assert r.p == pytest.approx(0.5, rel=1e-12)
    flow, caps, cost = r
    assert cost == r.cost


def test_parallel_cheaper_edge_wins():
    r = solve_relaxation(parallel([((0, 1), 1.0), ((0, 2), 2.0)]))
    assert list(r.weights) == pytest.approx([2.0, 4.0])
    assert list(r.flow.aggregate) == [1.0, 0.0]
    assert r.cost == pytest.approx(2.0)


def test_shared_edge_into_sink():
    p = poly(0, 1)
    edges = [Edge("a", "a", "m", LatencyFunction.constant(0.0), 0.0),
             Edge("b", "b", "m", LatencyFunction.constant(0.0), 0.0),
             Edge("shared", "m", "t", p, 1.0)]
    comms = [Commodity("k1", "a", "t", 1.0), Commodity("k2", "b", "t", 1.0)]
    inst = Instance(["a", "b", "m", "t"], edges, comms)
    r = solve_single_sink(inst)
    assert r.caps.z[2] == pytest.approx(2.0)
    assert r.cost == pytest.approx(4.0)
    assert r.gap <= 1e-12


def test_star_closed_form():
    edges = [Edge(f"e{i}", f"v{i}", "t", poly(0, i + 1), float(i + 1)) for i in range(4)]
    comms = [Commodity(f"k{i}", f"v{i}", "t", 1.0) for i in range(4)]
    inst = Instance([f"v{i}" for i in range(4)] + ["t"], edges, comms)
    r = solve_single_sink(inst)
    # a u^2 = a  ->  u = 1, w = a + a
    assert r.cost == pytest.approx(sum(2 * (i + 1) for i in range(4)))
    assert r.caps.z == pytest.approx([1.0] * 4)


def test_single_sink_shape_check():
    inst = random_instance(1, n_commodities=3)
    if len({c.sink for c in inst.commodities}) > 1:
        with pytest.raises(WrongShape):
            solve_single_sink(inst)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from([1, 2, 3]))
def test_relaxation_against_reference(seed, degree):
    inst = random_instance(seed, n_nodes=6, n_edges=12, n_commodities=3, degree=degree,
                           constant_share=0.2)
    r = solve_relaxation(inst)
    w = []
    for e in inst.edges:
        if e.latency.strict:
            u = ref_u(e.latency, e.price)
            w.append(e.latency(u) + e.price / u)
        else:
            w.append(e.latency.coeffs[0])
    expect = sum(c.demand * bellman_ford(inst, w, c.source)[inst.node(c.sink)] for c in inst.commodities)
    assert r.cost == pytest.approx(expect, rel=1e-9)
    # the split and the reported cost agree, and per-edge optimality holds
    assert r.routing_cost + r.capacity_cost == pytest.approx(r.cost, rel=1e-12)
    assert total_cost(inst, r.flow, r.caps) == pytest.approx(r.cost, rel=1e-12)
    v, z = r.flow.aggregate, r.caps.z
    for e, edge in enumerate(inst.edges):
        if edge.latency.strict and v[e] > 0:
            x = v[e] / z[e]
            assert x * x * edge.latency.derivative(x) == pytest.approx(edge.price, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_single_sink_matches_relaxation(seed):
    inst = random_instance(seed, n_nodes=6, n_edges=12, n_commodities=3, single_sink=True)
    r, s = solve_relaxation(inst), solve_single_sink(inst)
    assert s.cost == pytest.approx(r.cost, rel=1e-9)
    assert total_cost(inst, s.flow, s.caps) == pytest.approx(r.cost, rel=1e-9)
    assert verify_wardrop(inst, s.caps, s.flow) <= 1e-8


def test_budget_single_edge():
    for budget, z, rc in ((1.0, 1.0, 1.0), (2.0, 2.0, 0.5)):
        b = solve_budgeted_relaxation(one_edge(), budget)
        assert b.caps.z[0] == pytest.approx(z, rel=1e-9)
        assert b.routing_cost == pytest.approx(rc, rel=1e-9)
        assert b.spent <= budget * (1 + 1e-6)


def test_budget_symmetric_commodities():
    p = poly(0, 1)
    edges = [Edge("e1", "a", "b", p, 1.0), Edge("e2", "c", "d", p, 1.0)]
    comms = [Commodity("k1", "a", "b", 1.0), Commodity("k2", "c", "d", 1.0)]
    inst = Instance(["a", "b", "c", "d"], edges, comms, budget=2.0)
    b = solve_budgeted_relaxation(inst)
    assert b.caps.z == pytest.approx([1.0, 1.0], rel=1e-9)


def test_budget_needs_value():
    with pytest.raises(ValueError):
        solve_budgeted_relaxation(one_edge())


def test_budget_slack_warning():
    # a free constant route exists; no strict capacity is ever worth buying
    edges = [Edge("c", "s", "t", LatencyFunction.constant(0.0), 0.0), Edge("x", "s", "t", poly(1, 1), 1.0)]
    inst = Instance(["s", "t"], edges, [Commodity("k", "s", "t", 1.0)])
    with pytest.warns(SlackWarning):
        b = solve_budgeted_relaxation(inst, 1.0)
    assert b.routing_cost == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_budget_sweep_monotone(seed):
    inst = random_instance(500 + seed, n_nodes=5, n_edges=10, n_commodities=2)
    base = solve_relaxation(inst).capacity_cost
    costs = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SlackWarning)
        for f in (0.25, 0.5, 1.0, 2.0, 4.0):
            b = solve_budgeted_relaxation(inst, f * base)
            assert b.spent <= f * base * (1 + 1e-6)
            costs.append(b.routing_cost)
    assert all(b <= a * (1 + 1e-9) for a, b in zip(costs, costs[1:]))


def test_budget_mixes_routings():
    # half the flow on the strict edge: cost 1/4 + 1/2, below both pure routings
    edges = [Edge("c", "s", "t", LatencyFunction.constant(1.0), 0.0), Edge("x", "s", "t", poly(0, 1), 1.0)]
    inst = Instance(["s", "t"], edges, [Commodity("k", "s", "t", 1.0)])
    b = solve_budgeted_relaxation(inst, 1.0)
    assert b.flow.aggregate == pytest.approx([0.5, 0.5], rel=1e-9)
    assert b.caps.z == pytest.approx([0.0, 1.0], rel=1e-9)
    assert b.routing_cost == pytest.approx(0.75, rel=1e-9)
    assert b.lower_bound == pytest.approx(0.75, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.floats(0.05, 3.0))
def test_budget_meets_dual_bound(seed, scale):
    inst = random_instance(seed, n_nodes=6, n_edges=12, n_commodities=3, degree=1 + seed % 3,
                           constant_share=0.3)
    budget = scale * max(solve_relaxation(inst).capacity_cost, 0.1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SlackWarning)
        b = solve_budgeted_relaxation(inst, budget)
    assert b.spent <= budget * (1 + 1e-6)
    assert b.lower_bound <= b.routing_cost * (1 + 1e-12) + 1e-12
    assert b.routing_cost - b.lower_bound <= 1e-6 * max(1.0, b.routing_cost)
