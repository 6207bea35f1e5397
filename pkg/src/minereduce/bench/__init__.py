"""Benchmark harness: instance files, experiments, statistics and the CLI."""

from .experiment import run_experiment, time_to_target, ttt_run
from .io import ParseError, convert_vrplib, format_instance, load_instance, parse_instance, write_instance
from .stats import RunStats, TttResult, apd, emit_csv, paired_t_test, parse_csv

__all__ = [
    "ParseError", "RunStats", "TttResult", "apd", "convert_vrplib", "emit_csv", "format_instance",
    "load_instance", "paired_t_test", "parse_csv", "parse_instance", "run_experiment", "time_to_target",
    "ttt_run", "write_instance",
]
