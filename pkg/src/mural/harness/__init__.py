"""Experiment configuration, execution and reporting."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .runner import run_cell, run_experiment

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config", "run_cell", "run_experiment"]
