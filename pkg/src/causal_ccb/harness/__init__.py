"""Configuration, presets, replication runner, plotting and CLI."""

from .cli import cli_main
from .config import ConfigError, ExperimentSpec, dump_model, load_model, load_spec
from .plot import emit_plot
from .presets import EXPERIMENTS, INSTANCES, experiment, instance
from .runner import AggregateRow, read_aggregate, run_experiment

__all__ = [
    "AggregateRow",
    "ConfigError",
    "EXPERIMENTS",
    "ExperimentSpec",
    "INSTANCES",
    "cli_main",
    "dump_model",
    "emit_plot",
    "experiment",
    "instance",
    "load_model",
    "load_spec",
    "read_aggregate",
    "run_experiment",
]
