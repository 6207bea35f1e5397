import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minereduce.model import (Instance, Node, Route, Solution, StructureError, VehicleType, check_feasibility,
                              route_cost, route_load, solution_cost)
from oracles import cost_oracle, worked_instance, random_instance


def tiny(n_dist=None, fleet=None, lengths=None):
    d = np.array(n_dist if n_dist is not None else [[0, 5], [5, 0]], dtype=float)
    size = len(d)
    lengths = lengths or [0.0] * size
    nodes = [Node(0)] + [Node(i, 7.0, lengths[i]) for i in range(1, size)]
    return Instance("tiny", nodes, d, fleet or [VehicleType(8, 10, 2)])


def test_single_customer_route_cost():
    assert route_cost(tiny(), Route(0, [1])) == 30.0


def test_zero_unit_cost_is_fixed_only():
    inst = tiny(fleet=[VehicleType(8, 13, 0)])
    assert route_cost(inst, Route(0, [1])) == 13.0


def test_length_term_of_cluster_route():
    # cluster entered at cost 3, left at cost 1, internal length 4
    inst = tiny([[0, 3], [1, 0]], fleet=[VehicleType(10, 0, 1)], lengths=[0.0, 4.0])
    assert route_cost(inst, Route(0, [1])) == 8.0


def test_solution_cost_additive():
    a = route_cost(tiny([[0, 3], [1, 0]], [VehicleType(10, 0, 1)], [0.0, 4.0]), Route(0, [1]))
    b = route_cost(tiny(), Route(0, [1]))
    assert a + b == 38.0
    assert solution_cost(tiny(), Solution([])) == 0.0


def test_route_load():
    inst, ix = worked_instance()
    assert route_load(inst, Route(0, [ix["d"], ix["e"], ix["f"]])) == 8
    assert route_load(tiny(), Route(0, [1])) == 7


def test_feasibility_boundaries():
    inst = tiny(fleet=[VehicleType(7, 0, 1)])
    assert check_feasibility(inst, Solution([Route(0, [1])])) == []
    inst = tiny(fleet=[VehicleType(6, 0, 1)])
    assert [v.kind for v in check_feasibility(inst, Solution([Route(0, [1])]))] == ["capacity"]


def test_fleet_violation():
    rng = np.random.default_rng(0)
    inst = random_instance(rng, 3, m=1, counts=[2], cap_scale=4)
    sol = Solution([Route(0, [1]), Route(0, [2]), Route(0, [3])])
    kinds = [v.kind for v in check_feasibility(inst, sol)]
    assert kinds == ["fleet"]


def test_coverage_violations():
    rng = np.random.default_rng(1)
    inst = random_instance(rng, 3, m=1, cap_scale=4)
    rep = check_feasibility(inst, Solution([Route(0, [1, 1])]))
    assert {(v.kind, v.subject) for v in rep} == {("coverage", 1), ("coverage", 2), ("coverage", 3)}


def test_structural_errors():
    inst = tiny()
    with pytest.raises(StructureError):
        route_cost(inst, Route(3, [1]))
    with pytest.raises(StructureError):
        route_cost(inst, Route(0, [2]))
    with pytest.raises(ValueError):
        VehicleType(0, 1, 1)
    with pytest.raises(ValueError):
        Node(0, demand=1)
    with pytest.raises(ValueError):
        Instance("bad", [Node(0), Node(1)], [[0, 1], [1, 1]], [VehicleType(1, 0, 1)])


def test_infeasible_fleet_detected():
    rng = np.random.default_rng(2)
    inst = random_instance(rng, 6, m=1, counts=[1], cap_scale=0.3)
    assert inst.infeasibility() is not None


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 12), asym=st.booleans(), lengths=st.booleans())
def test_solution_cost_matches_oracle(seed, n, asym, lengths):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, m=3, asym=asym, lengths=lengths)
    perm = list(rng.permutation(np.arange(1, n + 1)))
    cuts = sorted(rng.choice(np.arange(1, n), size=min(2, n - 1), replace=False)) if n > 1 else []
    parts = np.split(np.array(perm), cuts)
    routes = [(int(rng.integers(0, 3)), [int(c) for c in p]) for p in parts if len(p)]
    sol = Solution.build(inst, routes)
    assert sol.cost == pytest.approx(cost_oracle(inst, routes), rel=1e-12)
    assert sol.cost == sum(route_cost(inst, r) for r in sol.routes)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 10))
def test_zero_lengths_reduce_to_classical_cost(seed, n):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, m=2, asym=True)
    cust = [int(c) for c in rng.permutation(np.arange(1, n + 1))]
    v = inst.fleet[1]
    path = [0] + cust + [0]
    classical = v.fixed_cost + sum(inst.dist[a, b] * v.unit_cost for a, b in zip(path[:-1], path[1:]))
    assert route_cost(inst, Route(1, cust)) == pytest.approx(classical, rel=1e-12)


def test_asymmetry_honored():
    rng = np.random.default_rng(3)
    inst = random_instance(rng, 5, m=1, asym=True)
    fwd = route_cost(inst, Route(0, [1, 2, 3, 4, 5]))
    bwd = route_cost(inst, Route(0, [5, 4, 3, 2, 1]))
    assert fwd != pytest.approx(bwd, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_feasibility_report_order_insensitive(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, 8, m=2, counts=[1, 2], cap_scale=0.4)
    routes = []
    cust = [int(c) for c in rng.permutation(np.arange(1, 9))]
    while cust:
        k = int(rng.integers(1, 4))
        routes.append(Route(int(rng.integers(0, 2)), cust[:k]))
        cust = cust[k:]
    a = set(check_feasibility(inst, Solution(routes)))
    b = set(check_feasibility(inst, Solution(routes[::-1])))
    assert a == b
