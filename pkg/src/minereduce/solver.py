"""Multi-start ILS and its two pattern-mining hybrids."""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .construct import ConstructionError, generate_initial_solution, seed_solution_from_pattern
from .localsearch import MOVES, IlsParams, ils
from .mining import EliteSet, PatternList, is_stable, mine_maximal_frequent, select_patterns, update_elite_set
from .model import COST_EPS, Instance, Solution
from .reduction import REDUCED_SEARCH, minereduce_generation

log = logging.getLogger(__name__)


class Algorithm(str, enum.Enum):
    MS_ILS = "msils"
    MDM_MS_ILS = "mdm"
    MINEREDUCE = "minereduce"

    @property
    def mines(self) -> bool:
        return self is not Algorithm.MS_ILS


# elite size, max patterns, min support, stability window
TUNED_DEFAULTS = {
    Algorithm.MS_ILS: (10, 6, 0.2, 3),
    Algorithm.MINEREDUCE: (10, 6, 0.2, 3),
    Algorithm.MDM_MS_ILS: (10, 9, 0.7, 3),
}


class InfeasibleInstanceError(ValueError):
    pass


@dataclass(frozen=True)
class SolverParams:
    algorithm: Algorithm = Algorithm.MINEREDUCE
    max_iter: int = 100
    beta: int = 5
    elite_size: Optional[int] = None
    max_patterns: Optional[int] = None
    min_sup: Optional[float] = None
    delta: Optional[int] = None
    seed: int = 0
    reduced_search: str = "ils"
    moves: frozenset = field(default_factory=lambda: frozenset(MOVES))
    target_cost: Optional[float] = None  # stop as soon as the best cost reaches it

    def __post_init__(self):
        algo = Algorithm(self.algorithm)
        object.__setattr__(self, "algorithm", algo)
        for name, default in zip(("elite_size", "max_patterns", "min_sup", "delta"), TUNED_DEFAULTS[algo]):
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.elite_size < 1 or self.max_patterns < 1 or self.delta < 0:
            raise ValueError("elite_size and max_patterns must be positive, delta nonnegative")
        if not 0 < self.min_sup <= 1:
            raise ValueError("min_sup must lie in (0, 1]")
        if self.reduced_search not in REDUCED_SEARCH:
            raise ValueError(f"reduced_search must be one of {REDUCED_SEARCH}")
        IlsParams(self.beta, frozenset(self.moves))

    @property
    def ils_params(self) -> IlsParams:
        return IlsParams(self.beta, frozenset(self.moves))

    def with_(self, **kw) -> "SolverParams":
        return replace(self, **kw)


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    gen_cost: float
    ls_cost: float
    gen_time: float
    ls_time: float
    mined_this_iter: bool = False
    pattern_id: Optional[int] = None


def best_cost_trace(records) -> list[float]:
    out = []
    best = float("inf")
    for r in records:
        best = min(best, r.ls_cost)
        out.append(best)
    return out


def _generate(instance, params: SolverParams, patterns: PatternList, rng):
    """Return ``(solution, pattern index or None)``."""
    if not patterns:
        return generate_initial_solution(instance, rng), None
    pid = patterns.cursor
    pattern = patterns.next()
    try:
        if params.algorithm is Algorithm.MINEREDUCE:
            sol = minereduce_generation(instance, pattern, params.ils_params, rng, params.reduced_search)
        else:
            sol = seed_solution_from_pattern(instance, pattern.segments, rng)
    except ConstructionError as exc:
        log.debug("pattern %d unusable (%s); plain construction instead", pid, exc)
        return generate_initial_solution(instance, rng), None
    return sol, pid


def run(instance: Instance, params: SolverParams,
        progress: Optional[Callable[[IterationRecord], None]] = None) -> tuple[Solution, list[IterationRecord]]:
    why = instance.infeasibility()
    if why:
        raise InfeasibleInstanceError(f"{instance.name}: {why}")
    rng = np.random.default_rng(params.seed)
    mining = params.algorithm.mines
    elite = EliteSet(params.elite_size)
    patterns = PatternList()
    best: Optional[Solution] = None
    records: list[IterationRecord] = []
    for it in range(1, params.max_iter + 1):
        mined = False
        if mining and len(elite) >= 2 and is_stable(elite, params.delta, it):
            itemsets = mine_maximal_frequent(elite.transactions(), params.min_sup)
            elite.mark_mined()
            selected = select_patterns(itemsets, params.max_patterns)
            patterns = PatternList([p for p in selected if p.segments])
            mined = True
            log.debug("iter %d: mined %d itemsets, %d usable patterns", it, len(itemsets), len(patterns))

        t0 = time.perf_counter()
        start, pid = _generate(instance, params, patterns, rng)
        t1 = time.perf_counter()
        sol = ils(instance, start, params.ils_params, rng)
        t2 = time.perf_counter()

        if mining:
            update_elite_set(elite, sol, it)
        if best is None or sol.cost < best.cost:
            best = sol.copy()
        rec = IterationRecord(it, start.cost, sol.cost, t1 - t0, t2 - t1, mined, pid)
        records.append(rec)
        if progress is not None:
            progress(rec)
        if params.target_cost is not None and best.cost <= params.target_cost + COST_EPS:
            break
    return best, records
