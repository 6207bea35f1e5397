import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from minereduce.bench import cli
from minereduce.bench.experiment import run_experiment, time_to_target, ttt_run
from minereduce.bench.io import ParseError, convert_vrplib, format_instance, parse_fleet, parse_instance
from minereduce.bench.stats import (RunStats, apd, count_wins, emit_csv, format_iteration_log, format_table,
                                    paired_t_test, parse_csv, ttt_table)
from minereduce.reduction import reduce_instance
from minereduce.solver import IterationRecord, SolverParams
from oracles import random_instance

MINIMAL = """NAME one
N 1 M 1
VEHICLES
10 5 1.5 -1
NODES
0 0 0 0
1 3 4 2
"""


def test_minimal_file():
    inst = parse_instance(MINIMAL)
    assert inst.n == 1 and inst.m == 1 and inst.name == "one"
    assert inst.fleet[0].count == -1 and inst.fleet[0].unit_cost == 1.5
    assert inst.dist[0, 1] == 5.0 and inst.dist[1, 0] == 5.0


def test_matrix_section_verbatim():
    text = MINIMAL.replace("1 3 4 2", "1 nan nan 2") + "MATRIX\n0 7.25\n3 0\n"
    inst = parse_instance(text)
    assert inst.dist.tolist() == [[0, 7.25], [3, 0]]


def test_euclidean_spot_check():
    text = """NAME tri
N 3 M 1
VEHICLES
100 0 1 2
NODES
0 0 0 0
1 1 1 1
2 -2 5 1
3 6 -1 1
"""
    inst = parse_instance(text)
    assert inst.dist[1, 2] == pytest.approx(5.0, abs=1e-12)  # 3-4-5
    assert inst.dist[2, 3] == pytest.approx(10.0, abs=1e-12)  # 8-6-10
    assert inst.dist[0, 3] == pytest.approx(math.sqrt(37), abs=1e-12)


@pytest.mark.parametrize("text, line", [
    ("NAME x\nN 1 M\n", 2),
    (MINIMAL.replace("1 3 4 2", "2 3 4 2"), 7),
    (MINIMAL.replace("1 3 4 2", "1 3 4 -2"), 7),
    (MINIMAL + "MATRIX\n0 1 2\n", 9),
    (MINIMAL.replace("10 5 1.5 -1", "10 5 abc -1"), 4),
    (MINIMAL.replace("1 3 4 2\n", ""), 6),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_instance(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_round_trip_with_reduced_lengths():
    inst = random_instance(np.random.default_rng(0), 9, m=2, counts=[-1, 3], asym=True)
    red, _ = reduce_instance(inst, [((1, 2, 3), 0)])
    for obj in (inst, red):
        back = parse_instance(format_instance(obj))
        assert np.array_equal(back.dist, obj.dist)
        assert back.lengths.tolist() == obj.lengths.tolist()
        assert [nd.demand for nd in back.nodes] == [nd.demand for nd in obj.nodes]
        assert back.fleet == obj.fleet


def test_euclidean_file_written_without_matrix():
    inst = parse_instance(MINIMAL)
    assert "MATRIX" not in format_instance(inst)


VRPLIB = """NAME : toy
TYPE : CVRP
DIMENSION : 4
EDGE_WEIGHT_TYPE : EUC_2D
CAPACITY : 10
NODE_COORD_SECTION
1 0 0
2 3 4
3 0 2
4 6 8
DEMAND_SECTION
1 3
2 0
3 4
4 5
DEPOT_SECTION
2
-1
EOF
"""


def test_convert_vrplib_moves_depot_first():
    fleet = parse_fleet("# cap fixed unit count\n10 20 1 -1\n15 30 1.2 2\n")
    inst = convert_vrplib(VRPLIB, fleet)
    assert inst.n == 3 and inst.m == 2
    assert [nd.demand for nd in inst.nodes] == [0, 3, 4, 5]
    assert inst.dist[0, 1] == 5.0  # old node 2 (3,4) to old node 1 (0,0)
    assert inst.fleet[1].count == 2
    assert parse_instance(format_instance(inst)).dist.tolist() == inst.dist.tolist()


def test_fleet_errors():
    with pytest.raises(ParseError):
        parse_fleet("10 2 1\n")
    with pytest.raises(ParseError):
        parse_fleet("\n")


# ------------------------------------------------------------------ stats


def test_runstats_aggregates():
    rs = RunStats.from_runs("i", "a", [(1, 10.0, 2.0), (2, 7.0, 4.0), (3, 13.0, 3.0)])
    assert rs.best_cost == 7.0 and rs.avg_cost == 10.0 and rs.avg_time == 3.0
    with pytest.raises(ValueError):
        RunStats.from_runs("i", "a", [])


@given(st.lists(st.tuples(st.integers(0, 999), st.floats(1, 1e6), st.floats(0, 1e3)), min_size=1, max_size=30))
def test_runstats_matches_recompute(runs):
    rs = RunStats.from_runs("i", "a", runs)
    assert rs.best_cost == min(c for _, c, _ in runs)
    assert rs.avg_cost == sum(c for _, c, _ in runs) / len(runs)
    assert rs.avg_time == sum(t for _, _, t in runs) / len(runs)
    assert parse_csv(emit_csv([rs])) == [rs]


def test_apd_examples():
    assert apd([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert apd([100.0], [50.0]) == -50.0
    assert apd([200.0, 100.0], [210.0, 90.0]) == pytest.approx((5.0 - 10.0) / 2)
    for bad in (([], []), ([1.0], [1.0, 2.0]), ([0.0], [1.0])):
        with pytest.raises(ValueError):
            apd(*bad)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_apd_against_numpy(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 40))
    b, c = rng.uniform(1, 1e4, k), rng.uniform(1, 1e4, k)
    assert apd(b.tolist(), c.tolist()) == pytest.approx(float(np.mean((c - b) / b * 100)), rel=1e-9, abs=1e-9)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_t_test_against_scipy(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(100, 5, 20)
    b = a - rng.normal(0.5, 2, 20)
    got = paired_t_test(a.tolist(), b.tolist())
    ref = sps.ttest_rel(a, b, alternative="greater")
    assert got.t == pytest.approx(ref.statistic, rel=1e-9)
    assert got.significant == (ref.pvalue < 0.05)
    assert not got.degenerate


def test_t_test_degenerate():
    same = paired_t_test([3.0, 4.0, 5.0], [3.0, 4.0, 5.0])
    assert same.degenerate and not same.significant and math.isnan(same.t)
    ones = paired_t_test([2.0, 3.0, 4.0, 5.0], [1.0, 2.0, 3.0, 4.0])
    assert ones.degenerate and ones.significant and ones.t == math.inf
    neg = paired_t_test([1.0, 2.0], [2.0, 3.0])
    assert neg.degenerate and not neg.significant
    with pytest.raises(ValueError):
        paired_t_test([1.0], [2.0])


def test_count_wins_shares_ties():
    rows = [RunStats("x", "a", 5, 6, 1), RunStats("x", "b", 5, 7, 1), RunStats("y", "a", 9, 9, 1),
            RunStats("y", "b", 8, 8, 1)]
    assert count_wins(rows) == {"a": 1, "b": 2}
    assert count_wins(rows, "avg_cost") == {"a": 1, "b": 1}


def test_table_two_decimals():
    out = format_table([RunStats("x", "a", 1.005e3, 1234.5678, 0.1)])
    assert "1234.57" in out and "0.10" in out


def test_iteration_log_full_precision():
    recs = [IterationRecord(1, 10.123456789, 9.5, 0.25, 1 / 3, True)]
    line = format_iteration_log(4, recs).splitlines()[1].split("\t")
    assert line[0] == "4" and float(line[2]) == 10.123456789 and float(line[5]) == 1 / 3 and line[6] == "1"


@given(st.lists(st.floats(0, 1e4), max_size=40), st.integers(0, 20))
def test_ttt_table_properties(times, extra):
    n = len(times) + extra
    if n == 0:
        return
    ts, ps = ttt_table(times, n)
    assert ts == sorted(times)
    assert all(0 < p < 1 for p in ps)
    assert all(a < b for a, b in zip(ps, ps[1:]))
    assert ps == [(i - 0.5) / n for i in range(1, len(ts) + 1)]


def test_time_to_target():
    recs = [IterationRecord(k, 10 - k, 10 - k, 0.5, 1.0) for k in range(1, 5)]
    assert time_to_target(recs, 8.0) == 3.0
    assert time_to_target(recs, 1.0) is None


# ------------------------------------------------------------- experiment


@pytest.fixture(scope="module")
def small():
    return random_instance(np.random.default_rng(9), 12, m=2)


def test_experiment_reproducible(small):
    p = SolverParams(algorithm="minereduce", max_iter=6, seed=3, delta=1)
    a = run_experiment(small, p, 3)
    b = run_experiment(small, p, 3)
    assert a.costs == b.costs and [s for s, _, _ in a.per_run] == [3, 4, 5]
    one = run_experiment(small, p, 1)
    assert one.best_cost == one.avg_cost


def test_ttt_extremes(small):
    easy = ttt_run(small, SolverParams(algorithm="msils", max_iter=3), 1e12, 4)
    assert len(easy.times) == 4 and not easy.censored
    assert all(a < b for a, b in zip(easy.probabilities, easy.probabilities[1:]))
    hard = ttt_run(small, SolverParams(algorithm="msils", max_iter=2), 1e-3, 3)
    assert hard.times == [] and hard.censored == [0, 1, 2]
    assert hard.table() == "time\tprobability\n"


# -------------------------------------------------------------------- CLI


def test_cli_run_compare_convert(tmp_path, capsys, small):
    path = tmp_path / "inst.txt"
    path.write_text(format_instance(small))
    outs = {}
    for algo in ("msils", "minereduce"):
        outs[algo] = tmp_path / f"{algo}.csv"
        code = cli.main(["--instance", str(path), "--algorithm", algo, "--runs", "2", "--max-iter", "4",
                         "--out", str(outs[algo]), "--log-iters", str(tmp_path / f"{algo}.tsv"), "--delta", "1"])
        assert code == 0
        (row,) = parse_csv(outs[algo].read_text())
        assert row.algorithm == algo and len(row.per_run) == 2
        log = (tmp_path / f"{algo}.tsv").read_text().splitlines()
        assert log[0].startswith("seed\titer") and len(log) == 1 + 2 * 4
    capsys.readouterr()
    assert cli.main(["compare", str(outs["msils"]), str(outs["minereduce"])]) == 0
    text = capsys.readouterr().out
    assert "wins by best_cost" in text and "minereduce vs msils: APD cost" in text

    (tmp_path / "toy.vrp").write_text(VRPLIB)
    (tmp_path / "fleet.txt").write_text("10 20 1 -1\n")
    assert cli.main(["convert", str(tmp_path / "toy.vrp"), str(tmp_path / "fleet.txt"), "-o",
                     str(tmp_path / "toy.txt")]) == 0
    assert parse_instance((tmp_path / "toy.txt").read_text()).n == 3


def test_cli_ttt_mode(tmp_path, small):
    path = tmp_path / "inst.txt"
    path.write_text(format_instance(small))
    out = tmp_path / "ttt.tsv"
    assert cli.main(["--instance", str(path), "--algorithm", "msils", "--runs", "3", "--max-iter", "2",
                     "--target", "1e12", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 4


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("NAME x\nN one M 1\n")
    assert cli.main(["--instance", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert cli.main(["--instance", str(tmp_path / "missing.txt")]) == 2
