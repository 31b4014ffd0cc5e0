"""1D1V Vlasov-Poisson solver with optional Fermi-energy pressure force.

``dW/dt + v dW/dx - (1/m) d(V + E_F)/dx dW/dv = 0`` with the electron
potential energy ``V'' = -4 pi e^2 (rho - background)`` on a periodic box.

Time stepping is Strang split (half x-advection, kick, half x-advection) and
every advection is semi-Lagrangian with periodic cubic B-spline
interpolation, which conserves the discrete mass exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import CFLViolation, FitFailed, GeometryMismatch, NonNeutralSource, ValidationError, VelocityOverflow
from ..results import ResultTable
from .thomas_fermi import PERIODIC, DensityField, PhysicalConstants, fermi_energy
from .semiclassical import PotentialField

BOUNDARY_MASS_TOL = 1e-8
NEUTRALITY_TOL = 1e-10
FIELD_FLOOR = 1e-20
REL_FIT_FLOOR = 1e-9  # dynamic range of the damping fit
# ln-space RMS residual below which a negative fitted rate counts as damping
VERDICT_RESIDUAL_MAX = 0.5

DAMPED = "DAMPED"
UNDAMPED = "UNDAMPED"
NO_SIGNAL = "NO_SIGNAL"


@dataclass(frozen=True)
class PhaseSpaceDistribution:
    """``W[i, j]`` at ``x_i = i L / N_x`` and cell-centred ``v_j`` in ``[-v_max, v_max]``."""

    values: np.ndarray
    length: float
    v_max: float

    def __post_init__(self):
        w = np.asarray(self.values, dtype=float)
        if w.ndim != 2:
            raise ValidationError("phase-space values must be a 2-D (N_x, N_v) array")
        object.__setattr__(self, "values", w)

    @property
    def n_x(self) -> int:
        return self.values.shape[0]

    @property
    def n_v(self) -> int:
        return self.values.shape[1]

    @property
    def dx(self) -> float:
        return self.length / self.n_x

    @property
    def dv(self) -> float:
        return 2 * self.v_max / self.n_v

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n_x) * self.dx

    @property
    def v(self) -> np.ndarray:
        return -self.v_max + (np.arange(self.n_v) + 0.5) * self.dv

    def density(self) -> DensityField:
        return DensityField(self.values.sum(axis=1) * self.dv, self.x, PERIODIC, self.length)

    def mass(self) -> float:
        return float(self.values.sum() * self.dx * self.dv)

    def momentum(self) -> float:
        return float((self.values @ self.v).sum() * self.dx * self.dv)

    def boundary_fraction(self, width: int = 1) -> float:
        edge = self.values[:, :width].sum() + self.values[:, -width:].sum()
        return float(abs(edge) / max(abs(self.values).sum(), 1e-300))


def maxwellian_perturbed(epsilon, k_mode, n_x=128, n_v=256, v_max=6.0, v_th=1.0) -> PhaseSpaceDistribution:
    """``(1 + eps cos(k x)) exp(-v^2/2v_th^2) / sqrt(2 pi) v_th`` on ``L = 2 pi / k``."""
    length = 2 * math.pi / k_mode
    w = PhaseSpaceDistribution(np.zeros((n_x, n_v)), length, v_max)
    fv = np.exp(-0.5 * (w.v / v_th) ** 2) / (math.sqrt(2 * math.pi) * v_th)
    return replace(w, values=np.outer(1 + epsilon * np.cos(k_mode * w.x), fv))


def two_stream(epsilon, k_mode, drift=2.0, v_th=0.5, n_x=128, n_v=256, v_max=6.0) -> PhaseSpaceDistribution:
    """Two counter-propagating Maxwellian beams at ``+-drift`` with unit total density."""
    length = 2 * math.pi / k_mode
    w = PhaseSpaceDistribution(np.zeros((n_x, n_v)), length, v_max)
    norm = 2 * math.sqrt(2 * math.pi) * v_th
    fv = (np.exp(-0.5 * ((w.v - drift) / v_th) ** 2) + np.exp(-0.5 * ((w.v + drift) / v_th) ** 2)) / norm
    return replace(w, values=np.outer(1 + epsilon * np.cos(k_mode * w.x), fv))


def _wavenumbers(n: int, length: float) -> np.ndarray:
    return 2 * math.pi * np.fft.rfftfreq(n, d=length / n)


def poisson_solve(rho: DensityField, background: float, k: PhysicalConstants) -> PotentialField:
    """Spectral solution of ``V'' = -4 pi e^2 (rho - background)`` with zero-mean gauge."""
    if rho.geometry != PERIODIC:
        raise GeometryMismatch("poisson_solve works on periodic-1d densities")
    source = rho.values - background
    if abs(source.mean()) > NEUTRALITY_TOL * max(1.0, abs(background)):
        raise NonNeutralSource(f"mean of rho - background is {source.mean():.3e}")
    n = source.size
    kk = _wavenumbers(n, rho.length)
    s_hat = np.fft.rfft(source)
    v_hat = np.zeros_like(s_hat)
    v_hat[1:] = 4 * math.pi * k.charge**2 * s_hat[1:] / kk[1:] ** 2
    return PotentialField(np.fft.irfft(v_hat, n), rho.coords, PERIODIC)


def spectral_derivative(values: np.ndarray, length: float) -> np.ndarray:
    n = values.size
    kk = _wavenumbers(n, length)
    f_hat = np.fft.rfft(values) * 1j * kk
    if n % 2 == 0:
        f_hat[-1] = 0.0
    return np.fft.irfft(f_hat, n)


def field_energy(potential: PotentialField) -> float:
    """``integral |dV/dx|^2 dx`` over the box."""
    grad = spectral_derivative(potential.values, potential.spacing * potential.values.size)
    return float(np.sum(grad**2) * potential.spacing)


def shift_periodic(f: np.ndarray, shift, axis: int) -> np.ndarray:
    """Sample the periodic cubic B-spline interpolant of ``f`` at ``index - shift``.

    ``shift`` is in grid units, constant along ``axis`` and broadcast over the
    other axis, so each row may move by its own amount.  The spline prefilter
    and the four-tap B-spline evaluation are both circulant along ``axis`` and
    are applied together as one Fourier multiplier.
    """
    f = np.moveaxis(np.asarray(f, dtype=float), axis, -1)
    n = f.shape[-1]
    freq = np.fft.rfftfreq(n)
    prefilter = (4 + 2 * np.cos(2 * math.pi * freq)) / 6
    if np.ndim(shift):
        shift = np.asarray(shift, dtype=float).reshape(-1, 1)
    whole = np.floor(shift)
    frac = 1.0 - (shift - whole)  # sample position inside its cell, in (0, 1]
    taps = (
        (1 - frac) ** 3 / 6,
        (3 * frac**3 - 6 * frac**2 + 4) / 6,
        (-3 * frac**3 + 3 * frac**2 + 3 * frac + 1) / 6,
        frac**3 / 6,
    )
    phase = np.exp(-2j * math.pi * freq)
    # out[j] = sum_q taps[q] * c[j - whole - 2 + q]
    response = sum(taps[q] * phase ** (2 - q) for q in range(4)) * np.exp(-2j * math.pi * freq * whole)
    out = np.fft.irfft(np.fft.rfft(f, axis=-1) * response / prefilter, n, axis=-1)
    return np.moveaxis(out, -1, axis)


def acceleration(W: PhaseSpaceDistribution, k: PhysicalConstants, fermi_term: bool) -> tuple[np.ndarray, PotentialField]:
    """``-(1/m) d(V + E_F)/dx`` from the self-consistent potential."""
    rho = W.density()
    potential = poisson_solve(rho, float(rho.values.mean()), k)
    total = potential.values + (fermi_energy(rho, k) if fermi_term else 0.0)
    return -spectral_derivative(total, W.length) / k.mass, potential


def _advect_x(W: PhaseSpaceDistribution, dt: float) -> PhaseSpaceDistribution:
    return replace(W, values=shift_periodic(W.values, W.v * dt / W.dx, axis=0))


def vlasov_step(
    W: PhaseSpaceDistribution,
    dt: float,
    k: PhysicalConstants,
    fermi_term: bool = False,
    self_consistent: bool = True,
) -> PhaseSpaceDistribution:
    """One Strang-split step.  ``self_consistent=False`` switches the force off (free streaming).

    Requires ``v_max |dt| <= dx`` and ``max|a| |dt| <= dv``.
    """
    if W.v_max * abs(dt) > W.dx * (1 + 1e-12):
        raise CFLViolation(f"v_max*dt = {W.v_max * abs(dt):.4g} exceeds dx = {W.dx:.4g}")
    W = _advect_x(W, dt / 2)
    if self_consistent:
        acc, _ = acceleration(W, k, fermi_term)
        if np.max(np.abs(acc)) * abs(dt) > W.dv:
            raise CFLViolation(f"max|a|*dt = {np.max(np.abs(acc)) * abs(dt):.4g} exceeds dv = {W.dv:.4g}")
        W = replace(W, values=shift_periodic(W.values, acc * dt / W.dv, axis=1))
    W = _advect_x(W, dt / 2)
    if W.boundary_fraction() > BOUNDARY_MASS_TOL:
        raise VelocityOverflow(f"fraction {W.boundary_fraction():.2e} of |W| sits at the velocity boundary")
    return W


def simulate(
    W: PhaseSpaceDistribution,
    t_final: float,
    dt: float,
    k: PhysicalConstants | None = None,
    fermi_term: bool = False,
    record_every: int = 1,
) -> ResultTable:
    """Run to ``t_final`` recording ``(t, field_energy, mass, momentum)``.

    ``dt`` is an upper bound; the step actually used divides ``t_final`` evenly.
    """
    k = k or PhysicalConstants.plasma_units()
    # shrink dt slightly so the run ends exactly at t_final
    n_steps = max(1, math.ceil(t_final / dt - 1e-9))
    dt = t_final / n_steps
    table = ResultTable([("t", "1/omega_p"), ("field_energy", "energy^2/length"), ("mass", "1"), ("momentum", "1")])

    def record(t, W):
        _, potential = acceleration(W, k, False)
        table.append((t, field_energy(potential), W.mass(), W.momentum()))

    record(0.0, W)
    for step in range(1, n_steps + 1):
        W = vlasov_step(W, dt, k, fermi_term)
        if step % record_every == 0 or step == n_steps:
            record(step * dt, W)
    mass, momentum = table.column("mass"), table.column("momentum")
    table.meta.update(
        mass_drift=float(np.max(np.abs(mass - mass[0])) / mass[0]),
        momentum_drift=float(np.max(np.abs(momentum - momentum[0]))),
        recurrence_time=2 * math.pi / (2 * math.pi / W.length * W.dv),
        final_state=W,
    )
    return table


def _local_maxima(y: np.ndarray) -> np.ndarray:
    return np.nonzero((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:]))[0] + 1


def fit_peak_rate(times, energy, t_max=None, floor: float = FIELD_FLOOR, min_peaks: int = 4, rel_floor: float = REL_FIT_FLOOR):
    """Exponential rate of the field-energy peak envelope.

    Fits ``ln E_peak = c + 2 gamma t`` over the leading run of peaks that stay
    above ``max(floor, rel_floor * largest peak)`` and before ``t_max``; the
    first peak below the floor ends the window, so noise-floor plateaus and
    partial recurrences never enter the fit.  Returns ``(gamma, rms_residual, n_peaks)``.
    """
    times = np.asarray(times)
    energy = np.asarray(energy)
    idx = _local_maxima(energy)
    if t_max is not None:
        idx = idx[times[idx] <= t_max]
    if idx.size:
        keep = energy[idx] > max(floor, rel_floor * energy[idx].max())
        idx = idx[: idx.size if keep.all() else int(np.argmin(keep))]
    if idx.size < min_peaks:
        raise FitFailed(f"only {idx.size} field-energy peaks available for the fit (need {min_peaks})")
    slope, intercept = np.polyfit(times[idx], np.log(energy[idx]), 1)
    resid = np.log(energy[idx]) - (slope * times[idx] + intercept)
    return slope / 2, float(np.sqrt(np.mean(resid**2))), int(idx.size)


def landau_run(
    epsilon: float,
    k_mode: float,
    n_x: int = 128,
    n_v: int = 256,
    v_max: float = 6.0,
    t_final: float = 50 * 2 * math.pi,
    dt: float | None = None,
    fermi_term: bool = False,
    record_every: int = 1,
    fit_t_max: float | None = None,
) -> ResultTable:
    """Linear Landau damping benchmark in normalized units (omega_p = v_th = 1).

    ``meta['gamma']`` is the fitted field-amplitude rate; peaks are taken up to
    ``fit_t_max`` (default: half the free-streaming recurrence time of the
    velocity grid) and only while they stay above the fit floor.
    """
    if epsilon > 0.01:
        raise ValidationError("landau_run is the linear benchmark: epsilon must be <= 0.01")
    W = maxwellian_perturbed(epsilon, k_mode, n_x, n_v, v_max)
    if dt is None:
        dt = 0.9 * W.dx / v_max
    table = simulate(W, t_final, dt, PhysicalConstants.plasma_units(), fermi_term, record_every)
    table.meta.update(epsilon=epsilon, k_mode=k_mode)
    if epsilon == 0:
        return table
    if fit_t_max is None:
        fit_t_max = min(t_final, 0.5 * table.meta["recurrence_time"])
    gamma, resid, n_peaks = fit_peak_rate(table.column("t"), table.column("field_energy"), fit_t_max)
    table.meta.update(gamma=gamma, fit_residual=resid, n_peaks=n_peaks, fit_t_max=fit_t_max)
    return table


def stability_verdict(run: ResultTable, residual_max: float = VERDICT_RESIDUAL_MAX) -> str:
    """DAMPED, UNDAMPED or NO_SIGNAL for a completed run.

    A run is DAMPED when the field-energy peak envelope decays exponentially
    (negative fitted rate with RMS log residual below ``residual_max``) and never
    rises an order of magnitude above its initial value.
    """
    t = run.column("t")
    energy = run.column("field_energy")
    if energy.max() < FIELD_FLOOR:
        return NO_SIGNAL
    if energy.max() > 10 * energy[0]:
        return UNDAMPED
    gamma = run.meta.get("gamma")
    resid = run.meta.get("fit_residual")
    if gamma is None:
        t_max = run.meta.get("fit_t_max", 0.5 * run.meta.get("recurrence_time", t[-1]))
        try:
            gamma, resid, _ = fit_peak_rate(t, energy, t_max)
        except FitFailed:
            return UNDAMPED
    return DAMPED if gamma < 0 and resid < residual_max else UNDAMPED
