"""Thomas-Fermi kinetic energy, Fermi energy and the radial atomic energy functional."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, simpson
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from ..errors import GeometryMismatch, NegativeDensity, NeutralityViolation, ValidationError
from ..results import ResultTable, fit_power_law

RADIAL = "radial-3d"
PERIODIC = "periodic-1d"
TF_CONSTANT = (3 * math.pi**2) ** (2 / 3)
NEUTRALITY_TOL = 1e-6


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    mass: float = 1.0
    charge: float = 1.0
    Z: int = 1

    def __post_init__(self):
        for name in ("hbar", "mass", "charge", "Z"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")

    @classmethod
    def plasma_units(cls) -> "PhysicalConstants":
        """Units with unit density giving plasma frequency 1: ``4 pi e^2 / m = 1``."""
        return cls(hbar=1.0, mass=1.0, charge=1.0 / math.sqrt(4 * math.pi), Z=1)


@dataclass
class DensityField:
    """Electron density on a radial (3-D, spherically symmetric) or periodic 1-D grid.

    ``coords`` are radii for ``radial-3d`` and cell positions for ``periodic-1d``
    (``length`` is then the box length).
    """

    values: np.ndarray
    coords: np.ndarray
    geometry: str = RADIAL
    length: float | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.coords = np.asarray(self.coords, dtype=float)
        if self.values.shape != self.coords.shape:
            raise ValidationError("density values and coordinates differ in shape")
        if self.geometry not in (RADIAL, PERIODIC):
            raise ValidationError(f"unknown geometry {self.geometry!r}")
        if self.geometry == PERIODIC and self.length is None:
            n = self.coords.size
            self.length = float(self.coords[1] - self.coords[0]) * n if n > 1 else 1.0

    def particle_number(self) -> float:
        if self.geometry == RADIAL:
            return float(simpson(4 * math.pi * self.coords**2 * self.values, x=self.coords))
        return float(np.mean(self.values) * self.length)


def _check_density(rho) -> np.ndarray:
    values = rho.values if isinstance(rho, DensityField) else np.asarray(rho, dtype=float)
    if np.any(values < 0):
        raise NegativeDensity(f"density has negative entries (min {values.min():.3e})")
    return values


def tf_kinetic_density(rho, k: PhysicalConstants) -> np.ndarray:
    """``tau_TF = (3/10)(hbar^2/m)(3 pi^2)^(2/3) rho^(5/3)``."""
    values = _check_density(rho)
    return 0.3 * k.hbar**2 / k.mass * TF_CONSTANT * values ** (5 / 3)


def fermi_energy(rho, k: PhysicalConstants) -> np.ndarray:
    """``E_F = (hbar^2/2m)(3 pi^2)^(2/3) rho^(2/3)``; ``tau_TF = (3/5) rho E_F``."""
    values = _check_density(rho)
    return 0.5 * k.hbar**2 / k.mass * TF_CONSTANT * values ** (2 / 3)


@dataclass(frozen=True)
class EnergyTerms:
    kinetic: float
    attraction: float
    hartree: float

    @property
    def total(self) -> float:
        return self.kinetic + self.attraction + self.hartree


def tf_energy_terms(rho: DensityField, k: PhysicalConstants, check_neutral: bool = True) -> EnergyTerms:
    if rho.geometry != RADIAL:
        raise GeometryMismatch("the atomic energy functional needs a radial-3d density")
    values = _check_density(rho)
    r = rho.coords
    if not np.any(values):
        return EnergyTerms(0.0, 0.0, 0.0)
    shell = 4 * math.pi * r**2
    if check_neutral:
        n = rho.particle_number()
        if abs(n - k.Z) > NEUTRALITY_TOL * k.Z:
            raise NeutralityViolation(f"integral of rho is {n!r}, expected Z = {k.Z}")
    e2 = k.charge**2
    kinetic = simpson(shell * tf_kinetic_density(values, k), x=r)
    attraction = -k.Z * e2 * simpson(4 * math.pi * r * values, x=r)
    # shell theorem: potential of the inner charge plus the outer shells
    inner = cumulative_trapezoid(shell * values, r, initial=0.0)
    outer_integrand = 4 * math.pi * r * values
    outer = simpson(outer_integrand, x=r) - cumulative_trapezoid(outer_integrand, r, initial=0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(r > 0, inner / np.where(r > 0, r, 1.0), 0.0) + outer
    hartree = 0.5 * e2 * simpson(shell * values * phi, x=r)
    return EnergyTerms(float(kinetic), float(attraction), float(hartree))


def tf_energy(rho: DensityField, k: PhysicalConstants, check_neutral: bool = True) -> float:
    """Kinetic + nuclear attraction + Hartree energy of a spherically symmetric density."""
    return tf_energy_terms(rho, k, check_neutral).total


def stretched_exponential_density(Z: float, scale: float, shape: float, n_points: int = 4001) -> DensityField:
    """``rho(r) = Z scale^3 f(scale r)`` with ``f(x) ∝ exp(-x^shape)`` normalized to 1.

    The grid is logarithmic in the scaled radius and is renormalized on the grid
    so that the quadrature particle number is exactly Z.
    """
    x_max = 60.0 ** (1.0 / shape)
    x = np.geomspace(1e-7, x_max, n_points)
    norm = 4 * math.pi * math.exp(gammaln(3.0 / shape)) / shape
    f = np.exp(-(x**shape)) / norm
    f /= simpson(4 * math.pi * x**2 * f, x=x)
    return DensityField(Z * scale**3 * f, x / scale, RADIAL)


def minimize_profile_energy(Z: float, k: PhysicalConstants, shape_bounds=(0.1, 2.0)) -> tuple[float, float, float]:
    """Nested 1-D minimization of the energy over scale and shape.

    Returns ``(energy, scale, shape)``.
    """
    kk = PhysicalConstants(k.hbar, k.mass, k.charge, Z)

    def best_scale(shape):
        res = minimize_scalar(
            lambda log_s: tf_energy(stretched_exponential_density(Z, math.exp(log_s), shape), kk),
            bracket=(math.log(Z ** (1 / 3)) - 1.0, math.log(Z ** (1 / 3)) + 1.0),
            tol=1e-10,
        )
        return res.fun, math.exp(res.x)

    outer = minimize_scalar(lambda b: best_scale(b)[0], bounds=shape_bounds, method="bounded", options={"xatol": 1e-6})
    energy, scale = best_scale(outer.x)
    return float(energy), float(scale), float(outer.x)


def tf_energy_scaling(Z_values, k: PhysicalConstants | None = None) -> ResultTable:
    """Minimized energy against Z; ``meta['exponent']`` is the log-log slope of ``|E|``."""
    k = k or PhysicalConstants()
    table = ResultTable([("Z", "1"), ("energy", "energy"), ("scale", "1/length"), ("shape", "1")])
    for Z in Z_values:
        table.append((Z, *minimize_profile_energy(Z, k)))
    fit = fit_power_law(table.column("Z"), -table.column("energy"))
    table.meta.update(exponent=fit.exponent, intercept=fit.intercept, residual=fit.residual)
    return table
