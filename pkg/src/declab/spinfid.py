"""Many-body fidelity of product states under sums of local Hamiltonians.

Sites are spin-1/2 and ordered with site 0 as the most significant tensor
factor.  Terms act on one site or on an adjacent pair.  Units have hbar = 1.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.sparse as sps

from . import qcore
from .errors import DimensionMismatch, DimensionTooLarge, NonHermitian, SupportMismatch, ValidationError
from .results import ResultTable

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

MAX_FIDELITY_SITES = 12  # 2**12 = qcore.DEFAULT_EXACT_LIMIT
MAX_MOMENT_SITES = 22


@dataclass(frozen=True)
class LocalTerm:
    sites: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        m = np.asarray(self.matrix, dtype=complex)
        if len(sites) not in (1, 2) or (len(sites) == 2 and sites[1] != sites[0] + 1):
            raise SupportMismatch(f"term support must be one site or an adjacent pair, got {sites}")
        if m.shape != (2 ** len(sites),) * 2:
            raise DimensionMismatch(f"term on {len(sites)} site(s) needs a {2 ** len(sites)}x{2 ** len(sites)} matrix")
        if np.max(np.abs(m - m.conj().T)) > qcore.HERMITIAN_TOL:
            raise NonHermitian(f"term on sites {sites} is not Hermitian")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "matrix", m)

    @property
    def bound(self) -> float:
        """Largest eigenvalue magnitude, i.e. the best constant C' for this term."""
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))


@dataclass
class LocalHamiltonianEnsemble:
    n_sites: int
    terms: list[LocalTerm]
    model_tag: str = "custom"
    declared_bound: float | None = None

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValidationError("n_sites must be >= 1")
        self.terms = [t if isinstance(t, LocalTerm) else LocalTerm(*t) for t in self.terms]
        for t in self.terms:
            if min(t.sites) < 0 or max(t.sites) >= self.n_sites:
                raise SupportMismatch(f"term on sites {t.sites} lies outside [0, {self.n_sites})")
        if self.declared_bound is not None and self.max_bound > self.declared_bound + 1e-12:
            raise ValidationError(f"a term exceeds the declared bound {self.declared_bound}")

    @property
    def max_bound(self) -> float:
        return max((t.bound for t in self.terms), default=0.0)

    def sparse(self) -> sps.csr_matrix:
        n = self.n_sites
        total = sps.csr_matrix((2**n, 2**n), dtype=complex)
        for t in self.terms:
            left = sps.identity(2 ** t.sites[0], format="csr")
            right = sps.identity(2 ** (n - t.sites[-1] - 1), format="csr")
            total = total + sps.kron(sps.kron(left, sps.csr_matrix(t.matrix)), right, format="csr")
        return total

    def dense(self, limit: int = qcore.DEFAULT_EXACT_LIMIT) -> np.ndarray:
        if 2**self.n_sites > limit:
            raise DimensionTooLarge(f"2^{self.n_sites} exceeds exact-diagonalization limit {limit}")
        return self.sparse().toarray()


@dataclass
class ProductState:
    local_states: np.ndarray  # shape (N, 2)

    def __post_init__(self):
        s = np.asarray(self.local_states, dtype=complex)
        if s.ndim != 2 or s.shape[1] != 2:
            raise DimensionMismatch("local_states must have shape (N, 2)")
        norms = np.linalg.norm(s, axis=1)
        if np.any(np.abs(norms - 1) > 1e-12):
            raise ValidationError("every local state must be normalized")
        self.local_states = s

    @property
    def n_sites(self) -> int:
        return self.local_states.shape[0]

    def local(self, sites) -> np.ndarray:
        return reduce(np.kron, [self.local_states[i] for i in sites])

    def vector(self) -> np.ndarray:
        return self.local(range(self.n_sites))

    @classmethod
    def uniform(cls, vec, n_sites: int) -> "ProductState":
        return cls(np.tile(np.asarray(vec, dtype=complex), (n_sites, 1)))

    @classmethod
    def bloch(cls, theta: float, phi: float, n_sites: int) -> "ProductState":
        """Every spin along the Bloch direction (theta, phi)."""
        return cls.uniform([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], n_sites)

    @classmethod
    def random(cls, n_sites: int, rng: np.random.Generator) -> "ProductState":
        """Haar-random local states from ``rng``."""
        z = rng.standard_normal((n_sites, 2)) + 1j * rng.standard_normal((n_sites, 2))
        return cls(z / np.linalg.norm(z, axis=1, keepdims=True))


def independent_field(n_sites: int, delta: float = 1.0) -> LocalHamiltonianEnsemble:
    """``H = sum_i (delta/2) sigma_3``; exactly solvable anchor family."""
    terms = [LocalTerm((i,), 0.5 * delta * SIGMA_Z) for i in range(n_sites)]
    return LocalHamiltonianEnsemble(n_sites, terms, "independent-field")


def transverse_ising(n_sites: int, coupling: float = 1.0, field_strength: float = 1.0) -> LocalHamiltonianEnsemble:
    """Open chain ``H = J sum sigma_3 sigma_3 + h sum sigma_1``."""
    zz = np.kron(SIGMA_Z, SIGMA_Z)
    terms = [LocalTerm((i, i + 1), coupling * zz) for i in range(n_sites - 1)]
    terms += [LocalTerm((i,), field_strength * SIGMA_X) for i in range(n_sites)]
    return LocalHamiltonianEnsemble(n_sites, terms, "transverse-ising")


def _embed(term: LocalTerm, region: tuple[int, ...]) -> np.ndarray:
    """Lift a term onto the contiguous ``region`` of sites."""
    left = 2 ** (term.sites[0] - region[0])
    right = 2 ** (region[-1] - term.sites[-1])
    return np.kron(np.kron(np.eye(left), term.matrix), np.eye(right))


def _check_sizes(ens: LocalHamiltonianEnsemble, phi: ProductState):
    if ens.n_sites != phi.n_sites:
        raise SupportMismatch(f"ensemble has {ens.n_sites} sites, state has {phi.n_sites}")


def variance(ens: LocalHamiltonianEnsemble, phi: ProductState) -> float:
    """Energy variance of a product state from local covariances.

    Terms with disjoint supports are uncorrelated in a product state, so only
    overlapping pairs are evaluated, each on the sites it touches.
    """
    _check_sizes(ens, phi)
    by_site = defaultdict(list)
    for idx, t in enumerate(ens.terms):
        for s in t.sites:
            by_site[s].append(idx)
    pairs = set()
    for idxs in by_site.values():
        pairs.update((i, j) for i in idxs for j in idxs if i <= j)
    total = 0.0
    for i, j in pairs:
        ti, tj = ens.terms[i], ens.terms[j]
        lo = min(ti.sites[0], tj.sites[0])
        hi = max(ti.sites[-1], tj.sites[-1])
        region = tuple(range(lo, hi + 1))
        v = phi.local(region)
        ai, aj = _embed(ti, region), _embed(tj, region)
        cov = np.vdot(v, ai @ (aj @ v)) - np.vdot(v, ai @ v) * np.vdot(v, aj @ v)
        total += cov.real if i == j else 2 * cov.real
    return float(total)


def dense_variance(ens: LocalHamiltonianEnsemble, phi: ProductState) -> float:
    """``<H^2> - <H>^2`` on the full 2^N space."""
    _check_sizes(ens, phi)
    h = ens.sparse()
    psi = phi.vector()
    hpsi = h @ psi
    mean = np.vdot(psi, hpsi).real
    return float(np.vdot(hpsi, hpsi).real - mean**2)


class FidelityEvaluator:
    """Exact ``F(t) = |<phi| exp(-iHt) |phi>|^2`` from a single diagonalization."""

    def __init__(self, ens: LocalHamiltonianEnsemble, phi: ProductState, max_sites: int = MAX_FIDELITY_SITES):
        _check_sizes(ens, phi)
        if ens.n_sites > max_sites:
            raise DimensionTooLarge(f"exact fidelity needs 2^{ens.n_sites} states; limit is {max_sites} sites")
        prop = qcore.Propagator(ens.dense(limit=2**max_sites), limit=2**max_sites)
        self.energies = prop.energies
        self.weights = prop.spectral_weights(phi.vector())

    def amplitude(self, t):
        t = np.asarray(t, dtype=float)
        out = np.exp(-1j * np.multiply.outer(t, self.energies)) @ self.weights
        return out

    def __call__(self, t):
        return np.clip(np.abs(self.amplitude(t)) ** 2, 0.0, 1.0)


def fidelity(ens: LocalHamiltonianEnsemble, phi: ProductState, t):
    return FidelityEvaluator(ens, phi)(t)


def gaussian_prediction(sigma_sq: float, t):
    if sigma_sq < 0:
        raise ValidationError("sigma_sq must be non-negative")
    return np.exp(-sigma_sq * np.asarray(t, dtype=float) ** 2)


@dataclass(frozen=True)
class TheoremReport:
    sigma_sq: float
    c_lower: float
    c_prime: float
    hypotheses_met: bool
    required_c: float = field(default=0.0)
    allowed_c_prime: float = field(default=0.0)


def check_hypotheses(ens: LocalHamiltonianEnsemble, phi: ProductState, C: float, C_prime: float) -> TheoremReport:
    """Check ``sigma^2 >= N C`` and ``|H_i| <= C'`` for this ensemble and state."""
    if not C > 0:
        raise ValidationError("C must be positive")
    s2 = variance(ens, phi)
    c_lower = s2 / ens.n_sites
    c_prime = ens.max_bound
    return TheoremReport(s2, c_lower, c_prime, bool(c_lower >= C and c_prime <= C_prime), C, C_prime)


def central_moments(ens: LocalHamiltonianEnsemble, phi: ProductState, max_sites: int = MAX_MOMENT_SITES):
    """``(mean, mu2, mu3, mu4)`` of the energy distribution of ``phi``."""
    _check_sizes(ens, phi)
    if ens.n_sites > max_sites:
        raise DimensionTooLarge(f"moment evaluation limited to {max_sites} sites")
    h = ens.sparse()
    psi = phi.vector()
    mean = np.vdot(psi, h @ psi).real
    d1 = h @ psi - mean * psi
    d2 = h @ d1 - mean * d1
    mu2 = np.vdot(d1, d1).real
    mu3 = np.vdot(d1, d2).real
    mu4 = np.vdot(d2, d2).real
    return float(mean), float(mu2), float(mu3), float(mu4)


def short_time_coefficients(ens: LocalHamiltonianEnsemble, phi: ProductState) -> tuple[float, float]:
    """``(sigma^2, q)`` with ``F(t) = 1 - sigma^2 t^2 + q t^4 + O(t^6)``.

    ``log F = -k2 t^2 + k4 t^4 / 12 + ...`` in the cumulants ``k2 = mu2`` and
    ``k4 = mu4 - 3 mu2^2``; the odd cumulants only shift the phase.  Hence
    ``q = k4/12 + k2^2/2 = mu4/12 + mu2^2/4``.
    """
    _, mu2, _, mu4 = central_moments(ens, phi)
    if mu2 <= 1e-14 * max(1.0, ens.max_bound**2):
        return 0.0, 0.0
    return mu2, mu4 / 12 + mu2**2 / 4


def build_model(family: str, n_sites: int, **params) -> tuple[LocalHamiltonianEnsemble, ProductState]:
    """Built-in families with their default product states.

    * ``independent-field``: ``delta``; every spin along +x.
    * ``transverse-ising``: ``coupling``, ``field_strength``, Bloch angles
      ``theta``, ``phi`` of the uniform state (default: along +y).
    """
    if family == "independent-field":
        ens = independent_field(n_sites, params.get("delta", 1.0))
        return ens, ProductState.bloch(np.pi / 2, 0.0, n_sites)
    if family == "transverse-ising":
        ens = transverse_ising(n_sites, params.get("coupling", 1.0), params.get("field_strength", 1.0))
        state = ProductState.bloch(params.get("theta", np.pi / 2), params.get("phi", np.pi / 2), n_sites)
        return ens, state
    raise ValidationError(f"unknown model family {family!r}")


def convergence_study(model_family, n_list, tau_grid=None, **params) -> ResultTable:
    """Sup-distance ``D(N) = max_tau |F(tau/sigma) - exp(-tau^2)|`` in rescaled time.

    ``model_family`` is a built-in family name or a callable ``N -> (ensemble, state)``.
    """
    if tau_grid is None:
        tau_grid = np.linspace(0.0, 3.0, 601)
    tau_grid = np.asarray(tau_grid, dtype=float)
    table = ResultTable([("n_sites", "1"), ("sigma_sq", "energy^2"), ("sup_deviation", "1")])
    for n in n_list:
        ens, phi = model_family(n) if callable(model_family) else build_model(model_family, n, **params)
        s2 = variance(ens, phi)
        if s2 <= 0:
            raise ValidationError(f"zero energy variance at N={n}; rescaled time undefined")
        f = FidelityEvaluator(ens, phi)(tau_grid / np.sqrt(s2))
        table.append((n, s2, float(np.max(np.abs(f - np.exp(-(tau_grid**2)))))))
    return table
