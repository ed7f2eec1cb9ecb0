import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cndp.equilibrium import (beckmann, equilibrate, marginal_equilibrium_check, solve_wardrop,
                              verify_wardrop)
from cndp.errors import FlowInfeasible, MaxItersExceeded, NoFinitePath
from cndp.generators import random_instance
from cndp.latency import LatencyFunction
from cndp.model import CapacityVector, Commodity, Edge, FlowAssignment, Instance, edge_loads
from helpers import bellman_ford, parallel, poly


def test_symmetric_split():
    inst = parallel([((0, 1), 1.0), ((0, 1), 1.0)])
    v = solve_wardrop(inst, CapacityVector([1.0, 1.0])).aggregate
    assert v == pytest.approx([0.5, 0.5], abs=1e-6)


def test_split_proportional_to_capacity():
    inst = parallel([((0, 1), 1.0), ((0, 1), 1.0)])
    v = solve_wardrop(inst, CapacityVector([1.0, 3.0])).aggregate
    assert v == pytest.approx([0.25, 0.75], abs=1e-6)


def test_affine_split():
    # 1 + v1 = 2 (1 - v1)
    inst = parallel([((1, 1), 1.0), ((0, 2), 1.0)])
    v = solve_wardrop(inst, CapacityVector([1.0, 1.0]), tol_gap=1e-12).aggregate
    assert v == pytest.approx([1 / 3, 2 / 3], abs=1e-8)


def test_zero_capacity_edge_is_closed():
    inst = parallel([((0, 1), 1.0), ((0, 1), 1.0)])
    v = solve_wardrop(inst, CapacityVector([0.0, 2.0])).aggregate
    assert v == pytest.approx([0.0, 1.0])
    with pytest.raises(NoFinitePath):
        solve_wardrop(inst, CapacityVector([0.0, 0.0]))


def test_max_iters_carries_iterate():
    inst = parallel([((0, 1), 1.0), ((0, 1), 1.0), ((0, 0, 3), 1.0)])
    with pytest.raises(MaxItersExceeded) as err:
        equilibrate(inst, CapacityVector([1.0, 2.0, 3.0]), tol_gap=1e-14, max_iters=1)
    assert err.value.flow.per_commodity.shape == (1, 3)


def test_pigou_marginal_check():
    edges = [Edge("c", "s", "t", LatencyFunction.constant(1.0), 0.0),
             Edge("x", "s", "t", poly(0, 1), 1.0)]
    inst = Instance(["s", "t"], edges, [Commodity("k", "s", "t", 1.0)])
    caps = CapacityVector([0.0, 1.0])
    eq = solve_wardrop(inst, caps)
    assert eq.aggregate == pytest.approx([0.0, 1.0], abs=1e-8)
    so = FlowAssignment(np.array([[0.5, 0.5]]))
    assert marginal_equilibrium_check(inst, caps, so) == pytest.approx(0.0, abs=1e-12)
    assert verify_wardrop(inst, caps, so) > 0.1
    assert beckmann(inst, caps, eq) < beckmann(inst, caps, so)


def test_verify_rejects_infeasible():
    inst = parallel([((0, 1), 1.0)])
    with pytest.raises(FlowInfeasible):
        verify_wardrop(inst, CapacityVector([1.0]), FlowAssignment(np.array([[0.5]])))


def independent_gap(inst, caps, flow):
    v = flow.aggregate
    t = edge_loads(inst, v, caps.z)
    total = float(np.dot(t, v))
    lower = sum(c.demand * bellman_ford(inst, t, c.source)[inst.node(c.sink)] for c in inst.commodities)
    return (total - lower) / max(1.0, total)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from([1, 2, 4]))
def test_random_equilibria(seed, degree):
    inst = random_instance(seed, n_nodes=6, n_edges=14, n_commodities=3, degree=degree,
                           constant_share=0.2)
    z = np.random.default_rng(seed).uniform(0.2, 3.0, inst.m)
    res = equilibrate(inst, CapacityVector(z))
    assert res.gap <= 1e-8
    assert independent_gap(inst, CapacityVector(z), res.flow) <= 1e-8 * 1.01
    pot = res.potentials
    assert np.all(np.diff(pot) <= 1e-12 * np.maximum(1.0, np.abs(pot[:-1])))
