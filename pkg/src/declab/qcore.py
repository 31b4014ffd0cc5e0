"""Hilbert-space foundations: truncated boson mode, collective spin, exact propagation.

Operators are dense numpy arrays and states are 1-D complex arrays.  Composite
spaces are ordered field factor first, spin factor second, so the basis index of
``|n> (x) |m>`` is ``n * spin_dim + m``.  Units have hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DimensionTooLarge, NonHermitian, ValidationError

DEFAULT_EXACT_LIMIT = 4096
HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-12


@dataclass(frozen=True)
class TruncatedFockSpace:
    """Single bosonic mode keeping number states ``|0>, ..., |cutoff>``."""

    cutoff: int

    def __post_init__(self):
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise ValidationError(f"Fock cutoff must be an integer >= 1, got {self.cutoff!r}")

    @property
    def dim(self) -> int:
        return self.cutoff + 1


@dataclass(frozen=True)
class CollectiveSpinSpace:
    """Symmetric sector j = N/2 of N two-level atoms.

    Basis states are ordered by descending Jz eigenvalue m = j, j-1, ..., -j.
    """

    n_atoms: int

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ValidationError(f"number of atoms must be an integer >= 1, got {self.n_atoms!r}")

    @property
    def j(self) -> float:
        return self.n_atoms / 2

    @property
    def dim(self) -> int:
        return self.n_atoms + 1


def fock_ladder(space: TruncatedFockSpace) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(a, a_dag)`` on the truncated mode; ``a_dag |M> = 0``."""
    n = np.arange(1, space.dim)
    a = np.diag(np.sqrt(n).astype(complex), k=1)
    return a, a.conj().T.copy()


def number_operator(space: TruncatedFockSpace) -> np.ndarray:
    return np.diag(np.arange(space.dim).astype(complex))


def number_state(space: TruncatedFockSpace, n: int) -> np.ndarray:
    if not 0 <= n <= space.cutoff:
        raise ValidationError(f"number state |{n}> outside truncated space with cutoff {space.cutoff}")
    psi = np.zeros(space.dim, dtype=complex)
    psi[n] = 1.0
    return psi


def spin_operators(space: CollectiveSpinSpace) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(Jx, Jy, Jz)`` for spin j = N/2."""
    j = space.j
    m = j - np.arange(space.dim)
    # <m+1|J+|m> sits one row above the diagonal in descending-m ordering
    jp = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)).astype(complex), k=1)
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    jz = np.diag(m.astype(complex))
    return jx, jy, jz


def collective_spin(space: CollectiveSpinSpace) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(Jx, Jz)``; the Pauli sums are ``sum sigma_1 = 2 Jx`` and ``sum sigma_3 = 2 Jz``."""
    jx, _, jz = spin_operators(space)
    return jx, jz


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def tensor(a: np.ndarray, b: np.ndarray, limit: int = DEFAULT_EXACT_LIMIT) -> np.ndarray:
    """Kronecker product, first factor outermost (field first, spin second)."""
    a = np.asarray(a)
    b = np.asarray(b)
    dim = a.shape[0] * b.shape[0]
    if dim > limit:
        raise DimensionTooLarge(f"product dimension {dim} exceeds limit {limit}")
    return np.kron(a, b)


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"operator must be square, got shape {h.shape}")
    residual = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if residual >= tol * max(1.0, np.max(np.abs(h))):
        raise NonHermitian(f"Hermiticity residual {residual:.3e} exceeds {tol:.0e}")
    return h


def state_vector(amplitudes, tol: float = NORM_TOL) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"state norm {norm!r} differs from 1 by more than {tol:.0e}")
    return psi


def expectation(psi: np.ndarray, op: np.ndarray) -> complex:
    psi = np.asarray(psi)
    if op.shape != (psi.size, psi.size):
        raise DimensionMismatch(f"operator shape {op.shape} does not match state dimension {psi.size}")
    return complex(np.vdot(psi, op @ psi))


class Propagator:
    """Exact ``exp(-iHt)`` from one eigendecomposition, reused for every t.

    Real symmetric Hamiltonians are diagonalized in real arithmetic and
    diagonal ones are not diagonalized at all.
    """

    def __init__(self, h: np.ndarray, limit: int = DEFAULT_EXACT_LIMIT):
        h = np.asarray(h)
        if h.shape[0] > limit:
            raise DimensionTooLarge(f"dimension {h.shape[0]} exceeds exact-diagonalization limit {limit}")
        check_hermitian(h)
        self.dim = h.shape[0]
        if not np.any(h - np.diag(np.diag(h))):
            self.energies = np.real(np.diag(h)).copy()
            self.vectors = None
        else:
            if np.iscomplexobj(h) and not np.any(h.imag):
                h = h.real
            self.energies, self.vectors = np.linalg.eigh(h)

    def _to_eigenbasis(self, psi):
        if self.vectors is None:
            return np.asarray(psi, dtype=complex)
        return self.vectors.conj().T @ psi

    def _from_eigenbasis(self, coeffs):
        if self.vectors is None:
            return coeffs
        return self.vectors @ coeffs

    def evolve(self, psi0: np.ndarray, t: float) -> np.ndarray:
        psi0 = np.asarray(psi0)
        if psi0.size != self.dim:
            raise DimensionMismatch(f"state dimension {psi0.size} does not match operator dimension {self.dim}")
        coeffs = self._to_eigenbasis(psi0)
        return self._from_eigenbasis(np.exp(-1j * self.energies * t) * coeffs)

    def spectral_weights(self, psi0: np.ndarray) -> np.ndarray:
        """Populations ``|<k|psi0>|^2`` of the energy eigenstates."""
        return np.abs(self._to_eigenbasis(psi0)) ** 2

    def survival_amplitude(self, psi0: np.ndarray, times) -> np.ndarray:
        """``<psi0| exp(-iHt) |psi0>`` for every entry of ``times``."""
        weights = self.spectral_weights(psi0)
        times = np.atleast_1d(np.asarray(times, dtype=float))
        return np.exp(-1j * np.outer(times, self.energies)) @ weights

    def expectation(self, psi0: np.ndarray, op: np.ndarray, times) -> np.ndarray:
        """``<psi(t)| op |psi(t)>`` along the trajectory."""
        return np.array([expectation(self.evolve(psi0, t), op) for t in np.atleast_1d(times)])


def evolve(h: np.ndarray, psi0: np.ndarray, t: float, limit: int = DEFAULT_EXACT_LIMIT) -> np.ndarray:
    """``exp(-iHt) psi0`` by eigendecomposition.  Build a :class:`Propagator` to reuse it."""
    return Propagator(h, limit=limit).evolve(psi0, t)
