"""Leading semiclassical propagator and its first Wigner-Kirkwood correction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import SingularTime, ValidationError
from .thomas_fermi import PERIODIC, RADIAL, PhysicalConstants

LINE = "line-1d"


@dataclass
class PotentialField:
    """Potential energy sampled on a uniform grid.

    ``periodic-1d`` potentials are gauge-fixed to zero mean when built by the
    Poisson solver; ``line-1d`` and ``radial-3d`` grids use one-sided stencils
    at their ends.
    """

    values: np.ndarray
    coords: np.ndarray
    geometry: str = LINE

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.coords = np.asarray(self.coords, dtype=float)
        if self.values.shape != self.coords.shape or self.values.ndim != 1:
            raise ValidationError("potential values and coordinates must be matching 1-D arrays")
        if self.geometry not in (LINE, PERIODIC, RADIAL):
            raise ValidationError(f"unknown geometry {self.geometry!r}")

    @property
    def spacing(self) -> float:
        return float(self.coords[1] - self.coords[0])

    def derivatives(self) -> tuple[np.ndarray, np.ndarray]:
        """Second-order central ``(V', V'')``."""
        v, h = self.values - self.values[0], self.spacing  # offset keeps constant V exactly flat
        if self.geometry == PERIODIC:
            up, down = np.roll(v, -1), np.roll(v, 1)
            return (up - down) / (2 * h), (up - 2 * v + down) / h**2
        d1 = np.gradient(v, h, edge_order=2)
        d2 = np.empty_like(v)
        d2[1:-1] = (v[2:] - 2 * v[1:-1] + v[:-2]) / h**2
        d2[0] = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / h**2
        d2[-1] = (2 * v[-1] - 5 * v[-2] + 4 * v[-3] - v[-4]) / h**2
        return d1, d2

    def laplacian_and_grad_sq(self) -> tuple[np.ndarray, np.ndarray]:
        d1, d2 = self.derivatives()
        lap = d2
        if self.geometry == RADIAL:
            with np.errstate(divide="ignore", invalid="ignore"):
                lap = d2 + np.where(self.coords > 0, 2 * d1 / self.coords, 2 * d2)
        return lap, d1**2

    def __call__(self, x):
        if self.geometry == PERIODIC:
            length = self.spacing * self.coords.size
            return np.interp(x, self.coords, self.values, period=length)
        return np.interp(x, self.coords, self.values)


def wigner_kirkwood_factor(V: PotentialField, x_index, t, k: PhysicalConstants):
    """``1 + (hbar^2/12m)(t^2 lap V / hbar^2 - i t^3 |grad V|^2 / hbar^3)`` at grid point(s) ``x_index``.

    ``|factor - 1|`` of order one marks the breakdown of the classical
    (Thomas-Fermi) description.
    """
    lap, grad_sq = V.laplacian_and_grad_sq()
    t = np.asarray(t, dtype=float)
    lap_x, grad_x = lap[x_index], grad_sq[x_index]
    correction = (t**2 / k.hbar**2) * lap_x - 1j * (t**3 / k.hbar**3) * grad_x
    return 1.0 + k.hbar**2 / (12 * k.mass) * correction


def g_tf(x, x_prime, t: float, V, k: PhysicalConstants, dim: int = 3):
    """Thomas-Fermi propagator ``(m/2 pi i hbar t)^(d/2) exp[i m |x-x'|^2/(2 hbar t) - i t V((x+x')/2)/hbar]``.

    ``x`` and ``x_prime`` broadcast with a trailing axis of length ``dim``
    (scalars are accepted for ``dim=1``).  ``V`` is None (free particle), a
    callable, or a :class:`PotentialField`.  The power is taken on the principal
    branch: ``i^(-d/2) = exp(-i pi d sign(t) / 4)``, i.e. ``exp(-3 i pi/4)`` in 3-D.
    """
    if t == 0:
        raise SingularTime("the propagator is singular at t = 0")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(x_prime, dtype=float)
    if dim == 1 and (x.ndim == 0 or x.shape[-1:] != (1,)):
        x, xp = x[..., None], xp[..., None]
    dist_sq = np.sum((x - xp) ** 2, axis=-1)
    mid = 0.5 * (x + xp)
    potential = 0.0 if V is None else V(mid[..., 0] if dim == 1 else mid)
    prefactor = (k.mass / (2 * math.pi * k.hbar * abs(t))) ** (dim / 2) * np.exp(-1j * math.pi * dim * np.sign(t) / 4)
    return prefactor * np.exp(1j * k.mass * dist_sq / (2 * k.hbar * t) - 1j * t * potential / k.hbar)
