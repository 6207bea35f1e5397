"""Multi-seed experiments and time-to-target runs."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Optional

from ..model import COST_EPS, Instance
from ..solver import IterationRecord, SolverParams, run
from .stats import RunStats, TttResult, ttt_table

RunCallback = Callable[[int, float, list[IterationRecord]], None]


def _one(instance: Instance, params: SolverParams):
    t0 = time.perf_counter()
    best, records = run(instance, params)
    return params.seed, best.cost, time.perf_counter() - t0, records


def _runs(instance: Instance, params_list: list[SolverParams], workers: int):
    if workers <= 1:
        return [_one(instance, p) for p in params_list]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(_one, [instance] * len(params_list), params_list))


def run_experiment(instance: Instance, params: SolverParams, num_runs: int,
                   on_run: Optional[RunCallback] = None, workers: int = 1) -> RunStats:
    """Run the solver with seeds ``params.seed + k`` for ``k < num_runs`` and aggregate."""
    if num_runs < 1:
        raise ValueError("num_runs must be at least 1")
    plist = [params.with_(seed=params.seed + k) for k in range(num_runs)]
    per_run = []
    for seed, cost, secs, records in _runs(instance, plist, workers):
        per_run.append((seed, cost, secs))
        if on_run is not None:
            on_run(seed, cost, records)
    return RunStats.from_runs(instance.name, params.algorithm.value, per_run)


def time_to_target(records: list[IterationRecord], target_cost: float) -> Optional[float]:
    """Solver time until the best cost first reached ``target_cost``, or ``None``."""
    elapsed = 0.0
    for r in records:
        elapsed += r.gen_time + r.ls_time
        if r.ls_cost <= target_cost + COST_EPS:
            return elapsed
    return None


def ttt_run(instance: Instance, params: SolverParams, target_cost: float, num_runs: int,
            workers: int = 1) -> TttResult:
    if not target_cost > 0:
        raise ValueError("target_cost must be positive")
    if num_runs < 1:
        raise ValueError("num_runs must be at least 1")
    plist = [params.with_(seed=params.seed + k, target_cost=target_cost) for k in range(num_runs)]
    times, censored = [], []
    for seed, _, _, records in _runs(instance, plist, workers):
        t = time_to_target(records, target_cost)
        if t is None:
            censored.append(seed)
        else:
            times.append(t)
    ts, ps = ttt_table(times, num_runs)
    return TttResult(ts, ps, censored, num_runs)
