import numpy as np
import pytest

from cndp.approx import best_of_two
from cndp.errors import TooLarge
from cndp.generators import random_instance
from cndp.oracle import oracle
from cndp.relaxation import solve_relaxation
from helpers import one_edge, parallel


def test_single_edge_converges_to_two():
    res = oracle(one_edge(), 512)
    assert res.cost == pytest.approx(2.0, abs=1e-3)
    assert res.caps.z[0] == pytest.approx(1.0, abs=1e-2)


def test_symmetric_parallel():
    res = oracle(parallel([((0, 1), 1.0), ((0, 1), 1.0)]), 64)
    # any split z1 + z2 = 1 is optimal; the cost is that of one edge
    assert res.cost == pytest.approx(2.0, abs=1e-2)
    assert res.caps.z.sum() == pytest.approx(1.0, abs=0.05)


def test_pigou_style_pair():
    inst = parallel([((0, 1), 1.0), ((0, 2), 2.0)])
    res = oracle(inst, 128)
    assert res.cost == pytest.approx(solve_relaxation(inst).cost, abs=1e-2)


def test_limits():
    with pytest.raises(TooLarge):
        oracle(parallel([((0, 1), 1.0)] * 5), 16)
    with pytest.raises(ValueError):
        oracle(one_edge(), 8)


@pytest.mark.parametrize("seed", range(6))
def test_dominance(seed):
    inst = random_instance(seed, n_nodes=3, n_edges=3, n_commodities=1)
    res = oracle(inst, 32)
    lower = solve_relaxation(inst).cost
    best = best_of_two(inst).certificate
    assert res.cost >= lower - 1e-9
    assert best.total <= best.guarantee * lower + 1e-9
    assert best.total <= best.guarantee * res.cost + 1e-9
