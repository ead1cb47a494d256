"""Benchmark harness: configs, the run matrix and report tables."""

from .config import BenchConfig, ConfigError
from .runner import run_cell, run_matrix
from .tables import CSV_COLUMNS, parse_csv, render_table

__all__ = ["BenchConfig", "ConfigError", "CSV_COLUMNS", "parse_csv", "render_table", "run_cell", "run_matrix"]
