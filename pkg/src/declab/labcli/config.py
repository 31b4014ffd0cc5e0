"""Plain-text experiment configuration.

Format::

    # comments start with '#'
    [dicke-envelope]
    omega = 1.0
    g = 0.1
    n_atoms = 10          # a list such as [4, 8, 16] sweeps this parameter
    output = results/envelope.csv
    seed = 7

One section header naming the experiment, then one ``key = value`` per line.
Values are integers, floats, ``true``/``false``, bare words, or bracketed
comma-separated lists of those.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from ..errors import MissingKey, MultipleSweepAxes, ParseError, UnknownExperiment, ValidationError

RESERVED_KEYS = {"output", "seed"}
_SECTION = re.compile(r"^\[\s*([A-Za-z0-9_-]+)\s*\]$")
_ASSIGN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


@dataclass(frozen=True)
class Param:
    kind: type
    default: Any = None
    required: bool = False
    unit: str = "1"
    choices: tuple | None = None
    positive: bool = False
    non_negative: bool = False
    list_native: bool = False  # a list value is the parameter itself, not a sweep


@dataclass
class ExperimentConfig:
    experiment: str
    parameters: dict[str, Any]
    output_path: Path | None = None
    seed: int = 0
    source: Path | None = None
    sweep_axis: str | None = field(default=None)


def _scalar(text: str, line: int):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("pi", "2pi"):
        return math.pi * (2 if low == "2pi" else 1)
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if re.fullmatch(r"[A-Za-z0-9_.\-/]+", text):
        return text
    raise ParseError(line, f"cannot parse value {text!r}")


def parse_value(text: str, line: int = 0):
    text = text.strip()
    if not text:
        raise ParseError(line, "empty value")
    if text.startswith("["):
        if not text.endswith("]"):
            raise ParseError(line, "unterminated list")
        inner = text[1:-1].strip()
        return [_scalar(item.strip(), line) for item in inner.split(",")] if inner else []
    return _scalar(text, line)


def _coerce(name: str, spec: Param, value, line: int):
    if isinstance(value, list):
        return [_coerce(name, spec, v, line) for v in value]
    try:
        if spec.kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
            value = float(value)
        elif spec.kind is int and isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, spec.kind) or (spec.kind is int and isinstance(value, bool)):
            raise TypeError
    except TypeError:
        raise ValidationError(f"{name} must be of type {spec.kind.__name__} (line {line})") from None
    if spec.choices and value not in spec.choices:
        raise ValidationError(f"{name} must be one of {', '.join(map(str, spec.choices))}")
    if spec.positive and not value > 0:
        raise ValidationError(f"{name} must be positive")
    if spec.non_negative and not value >= 0:
        raise ValidationError(f"{name} must be non-negative")
    return value


def parse_text(text: str, registry: dict, source: Path | None = None) -> ExperimentConfig:
    experiment = None
    raw: dict[str, tuple[Any, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        m = _SECTION.match(stripped)
        if m:
            if experiment is not None:
                raise ParseError(lineno, "only one experiment section is allowed per file")
            experiment = m.group(1)
            if experiment not in registry:
                raise UnknownExperiment(f"line {lineno}: unknown experiment '{experiment}'")
            continue
        m = _ASSIGN.match(stripped)
        if not m:
            raise ParseError(lineno, f"expected 'key = value', got {stripped!r}")
        if experiment is None:
            raise ParseError(lineno, "key before the [experiment] section header")
        key, value = m.group(1), m.group(2)
        if key not in registry[experiment].params and key not in RESERVED_KEYS:
            raise ParseError(lineno, f"unknown key '{key}' for experiment '{experiment}'")
        if key in raw:
            raise ParseError(lineno, f"duplicate key '{key}'")
        raw[key] = (parse_value(value, lineno), lineno)
    if experiment is None:
        raise ParseError(0, "no [experiment] section header found")

    spec = registry[experiment]
    params = {}
    for name, p in spec.params.items():
        if name in raw:
            value, lineno = raw[name]
            params[name] = _coerce(name, p, value, lineno)
        elif p.required:
            raise MissingKey(name)
        else:
            params[name] = p.default
    sweeps = [n for n, v in params.items() if isinstance(v, list) and not spec.params[n].list_native]
    if len(sweeps) > 1:
        raise MultipleSweepAxes(f"only one parameter may be a list, found: {', '.join(sweeps)}")
    for name, p in spec.params.items():
        if p.list_native and not isinstance(params[name], list):
            params[name] = [params[name]]

    output = raw.get("output", (None, 0))[0]
    seed = raw.get("seed", (0, 0))
    if not isinstance(seed[0], int) or isinstance(seed[0], bool) or seed[0] < 0:
        raise ValidationError(f"seed must be a non-negative integer (line {seed[1]})")
    return ExperimentConfig(
        experiment=experiment,
        parameters=params,
        output_path=Path(str(output)) if output is not None else None,
        seed=seed[0],
        source=source,
        sweep_axis=sweeps[0] if sweeps else None,
    )


def parse_config(path, registry: dict | None = None) -> ExperimentConfig:
    if registry is None:
        from .experiments import EXPERIMENTS as registry
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(0, f"cannot read {path}: {exc.strerror}") from None
    return parse_text(text, registry, source=path)


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    description: str
    params: dict[str, Param]
    columns: list[tuple[str, str]]
    runner: Callable
    checker: Callable | None = None
