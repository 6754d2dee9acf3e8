"""Config-driven experiment runner and command-line interface."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiments import COLUMNS, SCENARIO_RUNNERS, run_compare, run_scan_L, run_scan_pi

__all__ = [
    "COLUMNS",
    "ConfigError",
    "ExperimentConfig",
    "SCENARIO_RUNNERS",
    "load_config",
    "parse_config",
    "run_compare",
    "run_scan_L",
    "run_scan_pi",
]
