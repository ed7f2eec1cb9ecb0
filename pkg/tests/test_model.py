import math

import numpy as np
import pytest

from cndp.errors import BadNode, FlowInfeasible, InstanceError
from cndp.latency import LatencyFunction
from cndp.model import (CapacityVector, Commodity, Edge, FlowAssignment, Instance, Solution,
                        capacity_cost, dumps, loads, routing_cost, total_cost, validate_flow)
from helpers import one_edge, parallel, poly


def make(edges, comms=None, nodes=("a", "b", "c")):
    comms = comms or [Commodity("k", "a", "b", 1.0)]
    return Instance(list(nodes), edges, comms)


@pytest.mark.parametrize("edges, comms, msg", [
    ([Edge("e", "a", "a", poly(0, 1), 1.0)], None, "self-loop"),
    ([Edge("e", "a", "b", poly(0, 1), 1.0), Edge("e", "b", "a", poly(0, 1), 1.0)], None, "duplicate"),
    ([Edge("e", "a", "z", poly(0, 1), 1.0)], None, "unknown node"),
    ([Edge("e", "a", "b", poly(0, 1), 0.0)], None, "positive price"),
    ([Edge("e", "a", "b", poly(0, 1), 1.0)], [Commodity("k", "b", "a", 1.0)], "no directed path"),
    ([Edge("e", "a", "b", poly(0, 1), 1.0)], [Commodity("k", "a", "a", 1.0)], "identical"),
    ([Edge("e", "a", "b", poly(0, 1), 1.0)], [Commodity("k", "a", "b", 0.0)], "positive demand"),
])
def test_invalid_instances(edges, comms, msg):
    with pytest.raises(InstanceError, match=msg):
        make(edges, comms)


def test_constant_edge_may_be_free():
    inst = make([Edge("c", "a", "b", LatencyFunction.constant(0.0), 0.0)])
    assert not inst.strict[0]


def test_bad_node_lookup():
    with pytest.raises(BadNode):
        one_edge().node("nowhere")


def test_instance_json_round_trip():
    inst = parallel([((1, 2), 3.0), ((0, 0, 1), 0.5)], demand=2.0, budget=4.0)
    back = Instance.from_json(loads(dumps(inst.to_json())))
    assert back.to_json() == inst.to_json()
    assert back.budget == 4.0
    assert np.array_equal(back.coef, inst.coef)


def test_costs_single_edge():
    inst = one_edge()
    flow = FlowAssignment(np.array([[1.0]]))
    caps = CapacityVector([0.5])
    assert routing_cost(inst, flow, caps) == 2.0
    assert capacity_cost(inst, caps) == 0.5
    assert total_cost(inst, flow, caps) == 2.5
    assert routing_cost(inst, flow, CapacityVector([0.0])) == math.inf


def test_flow_validation():
    inst = parallel([((0, 1), 1.0), ((0, 1), 1.0)])
    good = FlowAssignment(np.array([[0.3, 0.7]]))
    assert validate_flow(inst, good) == []
    bad = FlowAssignment(np.array([[0.3, 0.6]]))
    assert validate_flow(inst, bad)
    with pytest.raises(FlowInfeasible):
        routing_cost(inst, bad, CapacityVector([1.0, 1.0]))
    assert validate_flow(inst, FlowAssignment(np.zeros((2, 2))))


def test_capacity_vector_rejects_negative():
    with pytest.raises(InstanceError):
        CapacityVector([-1.0])
    with pytest.raises(InstanceError):
        CapacityVector([math.nan])


def test_solution_json_sorted_and_round_trip():
    inst = parallel([((0, 1), 1.0), ((0, 2), 2.0)])
    sol = Solution(FlowAssignment(np.array([[0.25, 0.75]])), CapacityVector([1.0, 3.0]))
    obj = sol.to_json(inst)
    assert list(obj["capacities"]) == ["e0", "e1"]
    back = Solution.from_json(inst, loads(dumps(obj)))
    assert np.array_equal(back.flow.per_commodity, sol.flow.per_commodity)
    assert np.array_equal(back.caps.z, sol.caps.z)


def test_dumps_seventeen_digits():
    text = dumps({"x": 1 / 3, "inf": math.inf, "flag": True, "n": 3})
    assert "0.33333333333333331" in text
    assert '"inf"' in text and "true" in text and '"n": 3' in text


def test_loads_reports_position():
    with pytest.raises(InstanceError) as err:
        loads('{\n  "nodes": [1,\n}', "bad.json")
    msg = str(err.value)
    assert msg.startswith("bad.json:3:1") and "^" in msg
