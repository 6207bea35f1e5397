import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minereduce import _kernel as K
from minereduce.localsearch import MOVES, IlsParams, ils, pack, perturb, rvnd_descent, unpack
from minereduce.construct import generate_initial_solution
from minereduce.model import Instance, Node, Solution, VehicleType, check_feasibility, solution_cost
from oracles import brute_force_optimum, neighbor_costs, random_instance

BLOCKS = {K.SHIFT1: (1, 0), K.SHIFT2: (2, 0), K.SWAP11: (1, 1), K.SWAP21: (2, 1), K.SWAP22: (2, 2)}


def random_move(rng, st_):
    """Draw a structurally valid ``(move, ra, i, rb, j)`` or ``None``."""
    mv = int(rng.integers(0, 12))
    nr = st_.nr[0]
    ra, rb = int(rng.integers(0, nr)), int(rng.integers(0, nr))
    ka, kb = st_.rlen[ra], st_.rlen[rb]
    if mv in BLOCKS:
        a, b = BLOCKS[mv]
        if ra == rb or ka < a or kb < b:
            return None
        i = int(rng.integers(1, ka - a + 2))
        j = int(rng.integers(1, (kb - b + 1 if b else kb + 1) + 1))
    elif mv == K.CROSS:
        if ra == rb:
            return None
        i, j = int(rng.integers(0, ka + 1)), int(rng.integers(0, kb + 1))
    elif mv in (K.TWO_OPT, K.EXCHANGE):
        if ka < 2:
            return None
        i, j = sorted(int(x) for x in rng.choice(np.arange(1, ka + 1), 2, replace=False))
        rb = ra
    elif mv == K.VEHICLE:
        i = j = 0
        rb = ra
    else:
        ln = mv - K.OR_OPT1 + 1
        if ka < ln:
            return None
        i, j = int(rng.integers(1, ka - ln + 2)), int(rng.integers(1, ka + 2))
        if i <= j <= i + ln:
            return None
        rb = ra
    return mv, ra, i, rb, j


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 100_000), finite=st.booleans())
def test_incremental_delta_matches_recompute(seed, finite):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(6, 25))
    inst = random_instance(rng, n, m=3, counts=[n, 3, 2] if finite else None, asym=True, lengths=True)
    sol = generate_initial_solution(inst, rng)
    kin, st_ = pack(inst, sol)
    checked = 0
    for _ in range(400):
        mv = random_move(rng, st_)
        if mv is None:
            continue
        d, x, y = K.eval_move(kin, st_, *mv)
        if not np.isfinite(d):
            continue
        before = solution_cost(inst, unpack(inst, st_))
        K.apply_move(kin, st_, *mv, x, y)
        after = unpack(inst, st_)
        assert after.cost - before == pytest.approx(d, rel=1e-9, abs=1e-7)
        assert check_feasibility(inst, after) == []
        checked += 1
    assert checked > 0


@pytest.mark.parametrize("seed", range(6))
def test_descent_reaches_local_optimum_of_every_neighborhood(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, 7, m=2, counts=[2, 2] if seed % 2 else None, asym=seed >= 3, lengths=seed >= 3,
                           cap_scale=0.8)
    sol = generate_initial_solution(inst, rng)
    out = rvnd_descent(inst, sol, rng)
    assert out.cost <= sol.cost + 1e-9
    assert check_feasibility(inst, out) == []
    routes = [(r.vehicle, r.customers) for r in out.routes]
    best_neighbor = min(neighbor_costs(inst, routes))
    assert best_neighbor >= out.cost - 1e-6


def test_fixed_point_returns_unchanged():
    rng = np.random.default_rng(11)
    inst = random_instance(rng, 10, m=2)
    opt = rvnd_descent(inst, generate_initial_solution(inst, rng), rng)
    again = rvnd_descent(inst, opt, np.random.default_rng(0))
    assert again.cost == opt.cost
    assert [r.customers for r in again.routes] == [r.customers for r in opt.routes]


def test_swap_between_two_routes_improves():
    # customers 1,2 sit near x=0; 3,4 near x=10; the start mixes them
    xy = [(5, -5), (0, 0), (0, 1), (10, 0), (10, 1)]
    d = np.hypot(*(np.array(xy)[:, None, :] - np.array(xy)[None, :, :]).transpose(2, 0, 1))
    nodes = [Node(0)] + [Node(i, 1.0) for i in range(1, 5)]
    inst = Instance("swap", nodes, d, [VehicleType(2, 0, 1, 2)])
    start = Solution.build(inst, [(0, [1, 3]), (0, [2, 4])])
    out = rvnd_descent(inst, start, np.random.default_rng(0))
    assert out.cost < start.cost - 1e-6
    assert min(neighbor_costs(inst, [(r.vehicle, r.customers) for r in out.routes])) >= out.cost - 1e-6


def test_two_opt_respects_direction():
    # reversing the middle three customers would use expensive backward arcs
    n = 5
    d = np.full((n + 1, n + 1), 50.0)
    for a in range(n + 1):
        d[a, (a + 1) % (n + 1)] = 1.0
    np.fill_diagonal(d, 0.0)
    nodes = [Node(0)] + [Node(i, 1.0) for i in range(1, n + 1)]
    inst = Instance("dir", nodes, d, [VehicleType(10, 0, 1)])
    start = Solution.build(inst, [(0, [1, 2, 3, 4, 5])])
    out = rvnd_descent(inst, start, np.random.default_rng(0), IlsParams(moves=frozenset({"2opt"})))
    assert out.routes[0].customers == [1, 2, 3, 4, 5]
    rev = Solution.build(inst, [(0, [1, 4, 3, 2, 5])])
    assert rev.cost > start.cost


def test_perturb_deterministic_and_feasible():
    inst = random_instance(np.random.default_rng(2), 15, m=2)
    sol = rvnd_descent(inst, generate_initial_solution(inst, np.random.default_rng(0)), np.random.default_rng(0))
    a = perturb(inst, sol, np.random.default_rng(5))
    b = perturb(inst, sol, np.random.default_rng(5))
    assert [r.customers for r in a.routes] == [r.customers for r in b.routes]
    assert check_feasibility(inst, a) == []


def test_perturb_changes_two_route_solution():
    inst = random_instance(np.random.default_rng(3), 6, m=1, cap_scale=2)
    sol = Solution.build(inst, [(0, [1, 2, 3]), (0, [4, 5, 6])])
    assert check_feasibility(inst, sol) == []
    changed = 0
    for s in range(20):
        out = perturb(inst, sol, np.random.default_rng(s))
        assert check_feasibility(inst, out) == []
        changed += [r.customers for r in out.routes] != [r.customers for r in sol.routes]
    assert changed >= 15


def test_perturb_tight_capacity_falls_back_to_intra_route():
    nodes = [Node(0)] + [Node(i, 5.0) for i in range(1, 7)]
    rng = np.random.default_rng(4)
    d = rng.uniform(1, 20, (7, 7))
    np.fill_diagonal(d, 0)
    inst = Instance("tight", nodes, d, [VehicleType(15, 0, 1, 2)])
    sol = Solution.build(inst, [(0, [1, 2, 3]), (0, [4, 5, 6])])
    for s in range(20):
        out = perturb(inst, sol, np.random.default_rng(s))
        assert check_feasibility(inst, out) == []
        assert sorted(sorted(r.customers) for r in out.routes) == [[1, 2, 3], [4, 5, 6]]


def test_max_iter_ils_formula():
    assert IlsParams(beta=5).max_iter_ils(100, 10) == 150
    assert IlsParams(beta=0).max_iter_ils(1, 4) == 1
    with pytest.raises(ValueError):
        IlsParams(beta=-1)
    with pytest.raises(ValueError):
        IlsParams(moves=frozenset({"nope"}))
    assert set(MOVES) >= {"shift1", "2opt", "vehicle"}


def test_ils_beta_zero_single_customer():
    inst = Instance("one", [Node(0), Node(1, 1)], [[0, 3], [4, 0]], [VehicleType(5, 1, 1), VehicleType(5, 0.5, 1)])
    start = Solution.build(inst, [(0, [1])])
    out = ils(inst, start, IlsParams(beta=0), np.random.default_rng(0))
    assert out.cost <= start.cost and out.cost == pytest.approx(7.5)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_ils_monotone_and_feasible(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 30))
    inst = random_instance(rng, n, m=3, counts=[n, 2, 2], asym=bool(seed % 2), lengths=bool(seed % 3 == 0))
    start = generate_initial_solution(inst, rng)
    out = ils(inst, start, IlsParams(beta=2), rng)
    assert out.cost <= start.cost
    assert check_feasibility(inst, out) == []
    assert out.cost == pytest.approx(solution_cost(inst, out), rel=1e-9)


def test_ils_matches_permutation_optimum_on_five_customers():
    rng = np.random.default_rng(2024)
    xy = rng.uniform(0, 100, (6, 2))
    d = np.hypot(*(xy[:, None, :] - xy[None, :, :]).transpose(2, 0, 1))
    nodes = [Node(0)] + [Node(i, 1.0) for i in range(1, 6)]
    inst = Instance("tsp5", nodes, d, [VehicleType(1e9, 0, 1)])
    opt = brute_force_optimum(inst)
    hits = 0
    for seed in range(20):
        start = generate_initial_solution(inst, np.random.default_rng(seed))
        out = ils(inst, start, IlsParams(), np.random.default_rng(seed))
        hits += abs(out.cost - opt) <= 1e-6
    assert hits >= 18
