"""Run aggregation, comparison statistics and CSV/TSV emission."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from scipy import stats as _sps


@dataclass
class RunStats:
    instance: str
    algorithm: str
    best_cost: float
    avg_cost: float
    avg_time: float
    per_run: list[tuple[int, float, float]] = field(default_factory=list)  # (seed, cost, seconds)

    @classmethod
    def from_runs(cls, instance: str, algorithm: str, per_run: Sequence[tuple[int, float, float]]) -> "RunStats":
        if not per_run:
            raise ValueError("need at least one run")
        runs = [(int(s), float(c), float(t)) for s, c, t in per_run]
        costs = [c for _, c, _ in runs]
        times = [t for _, _, t in runs]
        return cls(instance, algorithm, min(costs), sum(costs) / len(costs), sum(times) / len(times), runs)

    @property
    def costs(self) -> list[float]:
        return [c for _, c, _ in self.per_run]


def apd(baseline_avgs: Sequence[float], candidate_avgs: Sequence[float]) -> float:
    """Average percentage difference of the candidate values relative to the baseline."""
    if len(baseline_avgs) != len(candidate_avgs) or not baseline_avgs:
        raise ValueError("apd needs two nonempty lists of equal length")
    if any(b <= 0 for b in baseline_avgs):
        raise ValueError("baseline values must be positive")
    diffs = [100.0 * (c - b) / b for b, c in zip(baseline_avgs, candidate_avgs)]
    return sum(diffs) / len(diffs)


class TTest(NamedTuple):
    t: float
    significant: bool
    degenerate: bool = False


def paired_t_test(a: Sequence[float], b: Sequence[float], alpha: float = 0.05) -> TTest:
    """One-tailed paired t-test of ``mean(a - b) > 0``."""
    if len(a) != len(b) or len(a) < 2:
        raise ValueError("paired_t_test needs two samples of equal length >= 2")
    d = [x - y for x, y in zip(a, b)]
    n = len(d)
    mean = sum(d) / n
    var = sum((x - mean) ** 2 for x in d) / (n - 1)
    if var == 0.0:
        if mean == 0.0:
            return TTest(math.nan, False, True)
        return TTest(math.copysign(math.inf, mean), mean > 0, True)
    t = mean / math.sqrt(var / n)
    return TTest(t, bool(t > _sps.t.ppf(1.0 - alpha, n - 1)))


def count_wins(rows: Iterable[RunStats], key: str = "best_cost") -> dict[str, int]:
    """Per algorithm, the number of instances on which it reaches the lowest ``key`` (ties shared)."""
    by_inst: dict[str, list[RunStats]] = {}
    algos = set()
    for r in rows:
        by_inst.setdefault(r.instance, []).append(r)
        algos.add(r.algorithm)
    wins = dict.fromkeys(sorted(algos), 0)
    for group in by_inst.values():
        low = min(getattr(r, key) for r in group)
        for r in group:
            if getattr(r, key) <= low + 1e-6:
                wins[r.algorithm] += 1
    return wins


# ------------------------------------------------------------------ CSV

CSV_FIELDS = ("instance", "algorithm", "runs", "best_cost", "avg_cost", "avg_time", "per_run")


def _enc_runs(runs) -> str:
    return ";".join(f"{s}:{c!r}:{t!r}" for s, c, t in runs)


def _dec_runs(text: str) -> list[tuple[int, float, float]]:
    out = []
    for chunk in filter(None, text.split(";")):
        s, c, t = chunk.split(":")
        out.append((int(s), float(c), float(t)))
    return out


def emit_csv(rows: Iterable[RunStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([r.instance, r.algorithm, len(r.per_run), repr(r.best_cost), repr(r.avg_cost),
                    repr(r.avg_time), _enc_runs(r.per_run)])
    return buf.getvalue()


def parse_csv(text: str) -> list[RunStats]:
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        out.append(RunStats(rec["instance"], rec["algorithm"], float(rec["best_cost"]),
                            float(rec["avg_cost"]), float(rec["avg_time"]), _dec_runs(rec["per_run"])))
    return out


def format_table(rows: Iterable[RunStats]) -> str:
    lines = ["instance\talgorithm\tbest\tavg\ttime"]
    for r in rows:
        lines.append(f"{r.instance}\t{r.algorithm}\t{r.best_cost:.2f}\t{r.avg_cost:.2f}\t{r.avg_time:.2f}")
    return "\n".join(lines) + "\n"


ITER_FIELDS = ("seed", "iter", "gen_cost", "ls_cost", "gen_time", "ls_time", "mined")


def format_iteration_log(seed: int, records, header: bool = True) -> str:
    lines = ["\t".join(ITER_FIELDS)] if header else []
    for r in records:
        lines.append(f"{seed}\t{r.iter}\t{r.gen_cost!r}\t{r.ls_cost!r}\t{r.gen_time!r}\t{r.ls_time!r}\t"
                     f"{int(r.mined_this_iter)}")
    return "\n".join(lines) + ("\n" if lines else "")


# ------------------------------------------------------------------ TTT


@dataclass
class TttResult:
    times: list[float]  # sorted times of the runs that reached the target
    probabilities: list[float]
    censored: list[int]  # seeds that never reached the target
    num_runs: int

    def table(self) -> str:
        lines = ["time\tprobability"]
        lines.extend(f"{t!r}\t{p!r}" for t, p in zip(self.times, self.probabilities))
        return "\n".join(lines) + "\n"


def ttt_table(times: Sequence[float], num_runs: int) -> tuple[list[float], list[float]]:
    """Sorted times with plotting positions ``(i - 0.5) / num_runs``."""
    if num_runs < len(times):
        raise ValueError("more times than runs")
    ts = sorted(times)
    return ts, [(i - 0.5) / num_runs for i in range(1, len(ts) + 1)]
