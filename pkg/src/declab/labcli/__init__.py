"""Experiment harness: config parsing, sweeps, CSV output and acceptance checks."""

from importlib import resources

from .config import ExperimentConfig, parse_config, parse_text
from .experiments import EXPERIMENTS, CheckResult
from .runner import run_config, execute


def bundled_configs() -> list:
    """Paths of the acceptance configs shipped with the package."""
    root = resources.files("declab") / "configs"
    return sorted((p for p in root.iterdir() if p.name.endswith(".cfg")), key=lambda p: p.name)


__all__ = ["EXPERIMENTS", "CheckResult", "ExperimentConfig", "bundled_configs", "execute", "parse_config", "parse_text", "run_config"]
