"""Command line entry point.

    minereduce-bench --instance FILE [options]     run an experiment (or a TTT study with --target)
    minereduce-bench compare A.csv [B.csv ...]     wins, APD and t-tests between result files
    minereduce-bench convert VRPLIB FLEET -o OUT   convert a VRPLIB file plus a fleet description
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from ..construct import ConstructionError
from ..solver import Algorithm, InfeasibleInstanceError, SolverParams
from .experiment import run_experiment, ttt_run
from .io import ParseError, convert_vrplib, format_instance, load_instance, parse_fleet
from .stats import apd, count_wins, emit_csv, format_iteration_log, format_table, paired_t_test, parse_csv


def _run_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minereduce-bench", description="Run HFVRP solver experiments.")
    p.add_argument("--instance", required=True, type=Path)
    p.add_argument("--algorithm", choices=[a.value for a in Algorithm], default=Algorithm.MINEREDUCE.value)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed", type=int, default=1, help="seed of the first run; run k uses seed+k")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--beta", type=int, default=5)
    p.add_argument("--elite-size", type=int)
    p.add_argument("--max-patterns", type=int)
    p.add_argument("--min-sup", type=float)
    p.add_argument("--delta", type=int)
    p.add_argument("--reduced-search", choices=["ils", "descent"], default="ils")
    p.add_argument("--target", type=float, help="time-to-target mode: stop each run at this cost")
    p.add_argument("--log-iters", type=Path, help="write per-iteration TSV logs here")
    p.add_argument("--out", type=Path, help="result file (CSV, or TSV in TTT mode); default stdout")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _emit(text: str, out: Optional[Path]):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def cmd_run(argv: Sequence[str]) -> int:
    args = _run_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    instance = load_instance(args.instance)
    params = SolverParams(algorithm=Algorithm(args.algorithm), max_iter=args.max_iter, beta=args.beta,
                          elite_size=args.elite_size, max_patterns=args.max_patterns, min_sup=args.min_sup,
                          delta=args.delta, seed=args.seed, reduced_search=args.reduced_search)
    if args.target is not None:
        res = ttt_run(instance, params, args.target, args.runs, workers=args.workers)
        _emit(res.table(), args.out)
        if res.censored:
            print(f"{len(res.censored)} of {res.num_runs} runs did not reach {args.target}: "
                  f"seeds {res.censored}", file=sys.stderr)
        return 0

    logs = []

    def on_run(seed, cost, records):
        logs.append(format_iteration_log(seed, records, header=not logs))
        print(f"seed {seed}: {cost:.2f}", file=sys.stderr)

    stats = run_experiment(instance, params, args.runs, on_run=on_run, workers=args.workers)
    if args.log_iters is not None:
        args.log_iters.write_text("".join(logs))
    _emit(emit_csv([stats]), args.out)
    print(format_table([stats]), end="", file=sys.stderr)
    return 0


def cmd_compare(argv: Sequence[str]) -> int:
    p = argparse.ArgumentParser(prog="minereduce-bench compare")
    p.add_argument("files", nargs="+", type=Path)
    p.add_argument("--baseline", default=Algorithm.MS_ILS.value)
    p.add_argument("--alpha", type=float, default=0.05)
    args = p.parse_args(argv)
    rows = [r for f in args.files for r in parse_csv(f.read_text())]
    print(format_table(rows), end="")
    for key in ("best_cost", "avg_cost"):
        print(f"wins by {key}: {count_wins(rows, key)}")
    base = {r.instance: r for r in rows if r.algorithm == args.baseline}
    for algo in sorted({r.algorithm for r in rows} - {args.baseline}):
        mine = {r.instance: r for r in rows if r.algorithm == algo and r.instance in base}
        if not mine:
            continue
        insts = sorted(mine)
        cost_apd = apd([base[i].avg_cost for i in insts], [mine[i].avg_cost for i in insts])
        time_apd = apd([base[i].avg_time for i in insts], [mine[i].avg_time for i in insts])
        print(f"{algo} vs {args.baseline}: APD cost {cost_apd:.2f}%  APD time {time_apd:.2f}%")
        for i in insts:
            a, b = base[i].costs, mine[i].costs
            if len(a) == len(b) >= 2:
                t = paired_t_test(a, b, args.alpha)
                flag = " (degenerate)" if t.degenerate else ""
                print(f"  {i}: t={t.t:.3f} {'significant' if t.significant else 'not significant'}{flag}")
    return 0


def cmd_convert(argv: Sequence[str]) -> int:
    p = argparse.ArgumentParser(prog="minereduce-bench convert")
    p.add_argument("vrplib", type=Path)
    p.add_argument("fleet", type=Path, help="one '<capacity> <fixed> <unit> <count>' line per vehicle type")
    p.add_argument("-o", "--out", type=Path)
    args = p.parse_args(argv)
    inst = convert_vrplib(args.vrplib.read_text(), parse_fleet(args.fleet.read_text()))
    _emit(format_instance(inst), args.out)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    commands = {"compare": cmd_compare, "convert": cmd_convert}
    try:
        if argv and argv[0] in commands:
            return commands[argv[0]](argv[1:])
        return cmd_run(argv)
    except (ParseError, InfeasibleInstanceError, ConstructionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
