"""Run a parsed configuration: optional one-axis sweep, CSV output, acceptance checks."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DeclabError
from ..results import ResultTable
from .config import ExperimentConfig
from .experiments import EXPERIMENTS, CheckResult

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_CHECK = 4


@dataclass
class RunOutcome:
    table: ResultTable
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def point_rng(seed: int, index: int | None) -> np.random.Generator:
    """Independent stream per sweep point, reproducible regardless of worker count."""
    bits = np.random.Philox(seed)
    return np.random.Generator(bits if index is None else bits.jumped(index + 1))


def _run_point(experiment: str, params: dict, seed: int, index: int | None, check: bool):
    spec = EXPERIMENTS[experiment]
    table = spec.runner(params, point_rng(seed, index))
    checks = spec.checker(params, table) if check and spec.checker else []
    return table, checks


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("DECLAB_JOBS", "1")))
    except ValueError:
        raise ConfigError("DECLAB_JOBS must be a positive integer") from None


def run_config(cfg: ExperimentConfig, check: bool = False, jobs: int = 1) -> RunOutcome:
    spec = EXPERIMENTS[cfg.experiment]
    axis = cfg.sweep_axis
    if axis is None:
        table, checks = _run_point(cfg.experiment, cfg.parameters, cfg.seed, None, check)
        return RunOutcome(table, checks)

    values = cfg.parameters[axis]
    points = [{**cfg.parameters, axis: v} for v in values]
    unit = spec.params[axis].unit
    columns = [(axis, unit)] + [c for c in spec.columns if c[0] != axis]
    out = ResultTable(columns, meta={"sweep_axis": axis, "points": []})
    if not points:
        return RunOutcome(out)

    args = [(cfg.experiment, p, cfg.seed, i, check) for i, p in enumerate(points)]
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(points))) as pool:
            results = list(pool.map(_run_point, *zip(*args)))
    else:
        results = [_run_point(*a) for a in args]

    checks = []
    for value, (table, point_checks) in zip(values, results):
        keep = [i for i, name in enumerate(table.names) if name != axis]
        out.extend((value, *(row[i] for i in keep)) for row in table.rows)
        out.meta["points"].append({axis: value, **table.meta})
        checks += [CheckResult(f"{c.name} [{axis}={value}]", c.passed, c.detail) for c in point_checks]
    return RunOutcome(out, checks)


def execute(cfg: ExperimentConfig, output=None, check: bool = False, jobs: int = 1, stdout=None, stderr=None) -> int:
    """Run, write the CSV and report; returns the process exit code."""
    import sys

    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        outcome = run_config(cfg, check=check, jobs=jobs)
        target = output if output is not None else cfg.output_path
        if target is None:
            stdout.write(outcome.table.to_csv_text())
        else:
            outcome.table.write_csv(target)
            print(f"wrote {len(outcome.table)} rows to {target}", file=stderr)
    except ConfigError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (DeclabError, ArithmeticError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_RUNTIME
    for c in outcome.checks:
        print(c.line(), file=stderr)
    return EXIT_OK if outcome.passed else EXIT_CHECK
