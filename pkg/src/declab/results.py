"""Tabular results and the power-law fit shared by the physics modules and the CLI."""

from __future__ import annotations

import io
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, InsufficientPoints, NonFiniteValue, NonPositiveInput


@dataclass
class ResultTable:
    """Ordered ``(name, unit)`` columns plus numeric rows.

    ``meta`` carries fitted scalars (slopes, rates, verdicts) that accompany the
    rows but are not written to CSV.
    """

    columns: list[tuple[str, str]]
    rows: list[tuple[float, ...]] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = [tuple(c) for c in self.columns]
        rows, self.rows = self.rows, []
        for row in rows:
            self.append(row)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.columns]

    def append(self, row) -> None:
        row = tuple(float(v) for v in row)
        if len(row) != len(self.columns):
            raise DimensionMismatch(f"row has {len(row)} values, table has {len(self.columns)} columns")
        self.rows.append(row)

    def extend(self, rows) -> None:
        for row in rows:
            self.append(row)

    def column(self, name: str) -> np.ndarray:
        idx = self.names.index(name)
        return np.array([row[idx] for row in self.rows], dtype=float)

    def __len__(self) -> int:
        return len(self.rows)

    def header(self) -> str:
        return ",".join(f"{name}[{unit}]" for name, unit in self.columns)

    def to_csv_text(self) -> str:
        out = io.StringIO()
        out.write(self.header() + "\n")
        for i, row in enumerate(self.rows):
            if not all(np.isfinite(row)):
                bad = [self.columns[j][0] for j, v in enumerate(row) if not np.isfinite(v)]
                raise NonFiniteValue(f"row {i} has non-finite value in column(s) {', '.join(bad)}")
            out.write(",".join(format(v, ".17g") for v in row) + "\n")
        return out.getvalue()

    def write_csv(self, path) -> Path:
        """Write atomically: the target is either absent/old or complete."""
        path = Path(path)
        text = self.to_csv_text()
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
                fh.flush()
                os.fsync(fh.fileno())
            os.chmod(tmp, 0o666 & ~_umask())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def read_csv(path) -> ResultTable:
    lines = Path(path).read_text().splitlines()
    columns = []
    for item in lines[0].split(","):
        name, unit = item[:-1].split("[", 1)
        columns.append((name, unit))
    rows = [tuple(float(v) for v in line.split(",")) for line in lines[1:] if line]
    return ResultTable(columns, rows)


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    intercept: float
    residual: float


def fit_power_law(xs, ys) -> PowerLawFit:
    """Least-squares line through ``(log x, log y)``; residual is the RMS in log space."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise DimensionMismatch("xs and ys must have the same length")
    if xs.size < 3:
        raise InsufficientPoints(f"power-law fit needs at least 3 points, got {xs.size}")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise NonPositiveInput("power-law fit requires strictly positive xs and ys")
    lx, ly = np.log(xs), np.log(ys)
    design = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    return PowerLawFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))
