"""Command-line entry point ``declab``."""

from __future__ import annotations

import sys

import click

from .errors import ConfigError
from .labcli.config import parse_config
from .labcli.experiments import EXPERIMENTS
from .labcli.runner import EXIT_CONFIG, default_jobs, execute


def _load(path):
    try:
        return parse_config(path)
    except ConfigError as exc:
        click.echo(f"error: {path}: {exc}", err=True)
        sys.exit(EXIT_CONFIG)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Numerical experiments on collective decoherence and semiclassical kinetics."""


@main.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--check", is_flag=True, help="Evaluate acceptance thresholds; exit 4 if any fails.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="CSV path (overrides the config's output key).")
@click.option("--jobs", "-j", type=click.IntRange(min=1), default=None, help="Worker processes for sweeps [env DECLAB_JOBS, default 1].")
def run(config, check, output, jobs):
    """Run the experiment described by CONFIG."""
    cfg = _load(config)
    if jobs is None:
        try:
            jobs = default_jobs()
        except ConfigError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
    sys.exit(execute(cfg, output=output, check=check, jobs=jobs))


@main.command("list-experiments")
def list_experiments():
    """List experiment names, parameters and CSV columns."""
    for name, spec in EXPERIMENTS.items():
        click.echo(f"{name}: {spec.description}")
        for pname, p in spec.params.items():
            default = "required" if p.required else f"default {p.default!r}"
            click.echo(f"    {pname} ({p.kind.__name__}, {default})")
        click.echo("    columns: " + ",".join(f"{c}[{u}]" for c, u in spec.columns))


@main.command()
@click.argument("config", type=click.Path(dir_okay=False))
def validate(config):
    """Parse and validate CONFIG without running it."""
    cfg = _load(config)
    sweep = f", sweep over {cfg.sweep_axis}" if cfg.sweep_axis else ""
    click.echo(f"ok: {cfg.experiment}{sweep}")


if __name__ == "__main__":
    main()
