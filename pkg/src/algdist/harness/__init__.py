"""Verification harness: experiment suites, deterministic reports, CLI."""

from .config import ExperimentConfig, load_config
from .experiments import (
    EXPERIMENT_NAMES,
    EXPERIMENTS,
    default_config,
    run_experiment,
)
from .fitting import fit_implied_constant
from .report import (
    build_report,
    dump_json,
    format_float,
    records_to_csv,
    write_report,
)

__all__ = [
    "EXPERIMENT_NAMES",
    "EXPERIMENTS",
    "ExperimentConfig",
    "build_report",
    "default_config",
    "dump_json",
    "fit_implied_constant",
    "format_float",
    "load_config",
    "records_to_csv",
    "run_experiment",
    "write_report",
]
