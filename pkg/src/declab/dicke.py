"""Dicke model: N two-level atoms coupled to one radiation mode.

Two independent routes to the survival amplitude ``<U_F(t)>`` of the
Delta -> 0 Hamiltonian ``H_F = w a^+a + g (sum sigma_1)(a^+ + a)``:

* the closed form, in which the atoms only enter through the eigenvalue ``s``
  of ``sum sigma_1`` and the field evolves by a displacement followed by free
  rotation, and
* exact propagation of the truncated composite Hamiltonian with :mod:`qcore`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import qcore
from .errors import CutoffTooSmall, DimensionTooLarge, FitFailed, ValidationError
from .results import ResultTable, fit_power_law

FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))
TRUNCATION_TOL = 1e-8


@dataclass(frozen=True)
class DickeParams:
    omega: float
    g: float
    n_atoms: int
    delta: float = 0.0
    fock_cutoff: int = 64

    def __post_init__(self):
        if not self.omega > 0:
            raise ValidationError("omega must be positive")
        if not self.g > 0:
            raise ValidationError("g must be positive")
        if not self.delta >= 0:
            raise ValidationError("delta must be non-negative")
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ValidationError("n_atoms must be an integer >= 1")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 1:
            raise ValidationError("fock_cutoff must be an integer >= 1")

    def with_(self, **changes) -> "DickeParams":
        values = dict(omega=self.omega, g=self.g, n_atoms=self.n_atoms, delta=self.delta, fock_cutoff=self.fock_cutoff)
        values.update(changes)
        return DickeParams(**values)


@dataclass(frozen=True)
class RadiationState:
    """Field state ``sum_n c_n |n>`` with ``n = 0..cutoff``."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex).ravel()
        if c.size < 2:
            raise ValidationError("radiation state needs at least two Fock levels")
        norm_sq = float(np.sum(np.abs(c) ** 2))
        if abs(norm_sq - 1.0) > 1e-12:
            raise ValidationError(f"radiation state is not normalized (sum |c_n|^2 = {norm_sq!r})")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def cutoff(self) -> int:
        return self.coefficients.size - 1

    def support_max(self, tol: float = 1e-24) -> int:
        """Highest Fock level carrying population above ``tol``."""
        return int(np.nonzero(np.abs(self.coefficients) ** 2 > tol)[0].max())

    @classmethod
    def vacuum(cls, cutoff: int) -> "RadiationState":
        return cls.number(0, cutoff)

    @classmethod
    def number(cls, n: int, cutoff: int) -> "RadiationState":
        c = np.zeros(cutoff + 1, dtype=complex)
        c[n] = 1.0
        return cls(c)

    @classmethod
    def coherent(cls, beta: complex, cutoff: int) -> "RadiationState":
        """Coherent state truncated at ``cutoff`` and renormalized."""
        n = np.arange(cutoff + 1)
        if beta == 0:
            return cls.vacuum(cutoff)
        log_mag = n * np.log(abs(beta)) - 0.5 * gammaln(n + 1) - abs(beta) ** 2 / 2
        c = np.exp(log_mag) * np.exp(1j * n * np.angle(beta))
        return cls(c / np.linalg.norm(c))


def check_sector(s: int, n_atoms: int) -> int:
    """Validate an eigenvalue ``s`` of ``sum sigma_1``: ``|s| <= N`` and ``s = N mod 2``."""
    if int(s) != s or abs(s) > n_atoms or (n_atoms - s) % 2:
        raise ValidationError(f"s={s!r} is not an eigenvalue of sum sigma_1 for N={n_atoms}")
    return int(s)


def _sector(s, p: DickeParams) -> int:
    return p.n_atoms if s is None else check_sector(s, p.n_atoms)


def build_dicke_hamiltonian(p: DickeParams, limit: int = qcore.DEFAULT_EXACT_LIMIT) -> np.ndarray:
    """``w a^+a + (Delta/2) sum sigma_3 + g (sum sigma_1)(a^+ + a)`` on field (x) symmetric spin sector."""
    dim = (p.n_atoms + 1) * (p.fock_cutoff + 1)
    if dim > limit:
        raise DimensionTooLarge(f"Dicke dimension (N+1)(M+1) = {dim} exceeds limit {limit}")
    field = qcore.TruncatedFockSpace(p.fock_cutoff)
    spins = qcore.CollectiveSpinSpace(p.n_atoms)
    a, adag = qcore.fock_ladder(field)
    jx, jz = qcore.collective_spin(spins)
    i_f, i_s = qcore.identity(field.dim), qcore.identity(spins.dim)
    h = p.omega * qcore.tensor(adag @ a, i_s, limit)
    if p.delta:
        h = h + p.delta * qcore.tensor(i_f, jz, limit)
    h = h + p.g * qcore.tensor(a + adag, 2 * jx, limit)
    return h


def build_hf_hamiltonian(p: DickeParams, limit: int = qcore.DEFAULT_EXACT_LIMIT) -> np.ndarray:
    return build_dicke_hamiltonian(p.with_(delta=0.0), limit)


def xi(t, s, p: DickeParams):
    """Phase ``(s g / w)^2 (w t - sin w t)``."""
    s = _sector(s, p)
    t = np.asarray(t, dtype=float)
    return (s * p.g / p.omega) ** 2 * (p.omega * t - np.sin(p.omega * t))


def alpha(t, s, p: DickeParams):
    """Displacement amplitude ``(s g / w)(1 - exp(i w t))``."""
    s = _sector(s, p)
    t = np.asarray(t, dtype=float)
    return (s * p.g / p.omega) * (1.0 - np.exp(1j * p.omega * t))


def displacement_matrix(alpha_value: complex, size: int) -> np.ndarray:
    """Matrix elements ``<m| D(alpha) |n>`` for ``0 <= m, n < size``.

    For ``m = n + k`` the element is
    ``sqrt(n!/m!) alpha^k exp(-|alpha|^2/2) L_n^(k)(|alpha|^2)``, and
    ``<n| D |n+k> = (-1)^k conj(<n+k| D |n>)``.  The Laguerre recurrence is run
    on the already-normalized products so nothing overflows.
    """
    x = abs(alpha_value) ** 2
    if x == 0.0:
        return np.eye(size, dtype=complex)
    k = np.arange(size, dtype=float)
    u = np.zeros((size, size))  # u[n, k] = <n+k|D|n> without the phase
    u[0] = np.exp(0.5 * k * math.log(x) - 0.5 * x - 0.5 * gammaln(k + 1))
    if size > 1:
        u[1] = (1.0 + k - x) / np.sqrt(k + 1.0) * u[0]
    for n in range(1, size - 1):
        u[n + 1] = ((2 * n + 1 + k - x) * u[n] - np.sqrt(n * (n + k)) * u[n - 1]) / np.sqrt((n + 1) * (n + 1 + k))
    phase = np.exp(1j * np.angle(alpha_value) * k)
    d = np.zeros((size, size), dtype=complex)
    for kk in range(size):
        n = np.arange(size - kk)
        lower = u[n, kk] * phase[kk]
        d[n + kk, n] = lower
        if kk:
            d[n, n + kk] = (-1) ** kk * np.conj(lower)
    return d


def analytic_expectation(t, state: RadiationState, p: DickeParams, s=None):
    """Closed-form ``<U_F(t)>`` in polarization sector ``s`` (default: fully polarized, s = N).

    ``<U_F> = e^{i xi} sum_{m,n} c_m^* c_n e^{-i m w t} <m|D(alpha)|n>``.
    """
    s = _sector(s, p)
    top = state.support_max()
    if top > state.cutoff - 2:
        raise CutoffTooSmall(f"state has support at level {top}, within 2 levels of the cutoff {state.cutoff}")
    c = state.coefficients[: top + 1]
    levels = np.arange(top + 1)
    times = np.atleast_1d(np.asarray(t, dtype=float))
    phases = np.exp(1j * xi(times, s, p))
    alphas = alpha(times, s, p)
    out = np.empty(times.size, dtype=complex)
    for i, (tt, a_t) in enumerate(zip(times, alphas)):
        d = displacement_matrix(a_t, top + 1)
        rotated = c * np.exp(1j * levels * p.omega * tt)
        out[i] = phases[i] * np.vdot(rotated, d @ c)
    return out if np.ndim(t) else out[0]


@dataclass
class ExactRun:
    amplitudes: np.ndarray
    top_population: float
    propagation_cutoff: int

    @property
    def truncation_suspect(self) -> bool:
        return self.top_population >= TRUNCATION_TOL


def polarized_spin_state(n_atoms: int, s: int) -> np.ndarray:
    """Eigenvector of ``sum sigma_1 = 2 Jx`` with eigenvalue ``s`` in the j = N/2 sector."""
    jx, _ = qcore.collective_spin(qcore.CollectiveSpinSpace(n_atoms))
    vals, vecs = np.linalg.eigh(2 * jx.real)
    idx = int(np.argmin(np.abs(vals - s)))
    return vecs[:, idx].astype(complex)


def exact_expectation(
    times,
    state: RadiationState,
    p: DickeParams,
    s=None,
    hamiltonian: str = "hf",
    grow_cutoff: bool = False,
    limit: int = qcore.DEFAULT_EXACT_LIMIT,
) -> ExactRun:
    """``<psi0| exp(-iHt) |psi0>`` by exact diagonalization of the truncated composite system.

    ``psi0 = |field state> (x) |sum sigma_1 = s>``.  The propagation cutoff is
    ``p.fock_cutoff`` (at least the state's own cutoff); with ``grow_cutoff``
    it is doubled until the population of the top Fock level stays below
    ``TRUNCATION_TOL`` over ``times``.
    """
    s = _sector(s, p)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    cutoff = max(p.fock_cutoff, state.cutoff)
    spin = polarized_spin_state(p.n_atoms, s)
    while True:
        q = p.with_(fock_cutoff=cutoff)
        h = build_hf_hamiltonian(q, limit) if hamiltonian == "hf" else build_dicke_hamiltonian(q, limit)
        field = np.zeros(cutoff + 1, dtype=complex)
        field[: state.cutoff + 1] = state.coefficients
        psi0 = np.kron(field, spin)
        prop = qcore.Propagator(h, limit=limit)
        amps = prop.survival_amplitude(psi0, times)
        top = 0.0
        for tt in times:
            psi = prop.evolve(psi0, tt).reshape(cutoff + 1, p.n_atoms + 1)
            top = max(top, float(np.sum(np.abs(psi[-1]) ** 2)))
        run = ExactRun(amps, top, cutoff)
        if not (grow_cutoff and run.truncation_suspect):
            return run
        cutoff *= 2


def envelope(t, p: DickeParams):
    """Collapse envelope ``exp(-(N g / w)^2 (1 - cos w t))`` for the fully polarized sector."""
    t = np.asarray(t, dtype=float)
    return np.exp(-((p.n_atoms * p.g / p.omega) ** 2) * (1.0 - np.cos(p.omega * t)))


def recurrence_width(p: DickeParams) -> float:
    return 1.0 / (p.n_atoms * p.g)


def _half_crossing(f, lo, hi, step):
    """First point in (lo, hi] where ``f`` drops below 1/2, by sampling then linear interpolation."""
    grid = np.linspace(lo, hi, max(2, math.ceil((hi - lo) / step - 1e-9)) + 1)
    vals = f(grid) - 0.5
    below = np.nonzero(vals < 0)[0]
    if below.size == 0:
        return None
    i = max(int(below[0]), 1)
    a, b = grid[i - 1], grid[i]
    fa, fb = vals[i - 1], vals[i]
    return a + (b - a) * fa / (fa - fb), (a, b)


def revival_fwhm(p: DickeParams, revival: int = 1, rtol: float = 1e-10) -> float:
    """Full width at half maximum of the envelope peak at ``t = 2 pi revival / w``.

    Sampling starts at resolution ``1/(10 N g)`` and each crossing bracket is
    resampled ten times finer until the interpolated crossing settles.
    """
    period = 2 * math.pi / p.omega
    t0 = revival * period
    half_period = period / 2
    step = min(recurrence_width(p) / 10, half_period / 50)

    def one_side(sign):
        f = lambda tau: envelope(t0 + sign * tau, p)  # noqa: E731
        found = _half_crossing(f, 0.0, half_period, step)
        if found is None:
            raise FitFailed(
                f"envelope never falls to half maximum (N g / w = {p.n_atoms * p.g / p.omega:.3g}); no collapse to measure"
            )
        tau, (a, b) = found
        h = step
        while True:
            h /= 10
            new, (a, b) = _half_crossing(f, a, b, h)
            if abs(new - tau) <= rtol * tau:
                return new
            tau = new

    return one_side(-1.0) + one_side(+1.0)


def peak_width(p: DickeParams, revival: int = 1) -> float:
    """Gaussian width implied by the revival FWHM, comparable to ``1/(N g)``."""
    return revival_fwhm(p, revival) / FWHM_PER_SIGMA


def collapse_study(n_atoms, g: float, omega: float = 1.0, revival: int = 1) -> ResultTable:
    """Revival-peak width against N with a log-log fit; ``meta`` holds the fitted exponent."""
    n_atoms = [int(n) for n in n_atoms]
    if len(n_atoms) < 3:
        raise FitFailed(f"collapse study needs at least 3 values of N, got {len(n_atoms)}")
    if any(b <= a for a, b in zip(n_atoms, n_atoms[1:])):
        raise ValidationError("n_atoms must be strictly increasing")
    table = ResultTable([("n_atoms", "1"), ("fitted_width", "time"), ("analytic_width", "time")])
    for n in n_atoms:
        p = DickeParams(omega=omega, g=g, n_atoms=n)
        table.append((n, peak_width(p, revival), recurrence_width(p)))
    fit = fit_power_law(table.column("n_atoms"), table.column("fitted_width"))
    table.meta.update(exponent=fit.exponent, intercept=fit.intercept, residual=fit.residual)
    return table


def delta_robustness(p: DickeParams, t_grid, state: RadiationState | None = None) -> ResultTable:
    """``|<U(t)>|`` under the full Hamiltonian against ``H_F``, both exactly propagated."""
    if state is None:
        state = RadiationState.vacuum(p.fock_cutoff)
    t_grid = np.asarray(t_grid, dtype=float)
    full = exact_expectation(t_grid, state, p, hamiltonian="full")
    hf = exact_expectation(t_grid, state, p, hamiltonian="hf")
    table = ResultTable([("t", "1/omega"), ("abs_full", "1"), ("abs_hf", "1"), ("abs_deviation", "1")])
    for t, a, b in zip(t_grid, np.abs(full.amplitudes), np.abs(hf.amplitudes)):
        table.append((t, a, b, abs(a - b)))
    table.meta.update(truncation_suspect=full.truncation_suspect or hf.truncation_suspect)
    return table
