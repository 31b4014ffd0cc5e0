"""Linear kinetic dispersion relation of Langmuir waves in a Maxwellian plasma.

Independent of the Vlasov solver: the complex root of
``eps(k, w) = 1 - Z'(zeta) / (2 (k lambda_D)^2) = 0`` with
``zeta = w / (sqrt(2) k v_th)`` gives the Landau damping rate ``Im w``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import root
from scipy.special import wofz

from ..errors import FitFailed


def plasma_z(zeta):
    """Fried-Conte plasma dispersion function ``Z(zeta) = i sqrt(pi) w(zeta)``."""
    return 1j * math.sqrt(math.pi) * wofz(zeta)


def plasma_z_prime(zeta):
    return -2.0 * (1.0 + zeta * plasma_z(zeta))


def dielectric(omega: complex, k: float, v_th: float = 1.0, omega_p: float = 1.0) -> complex:
    zeta = omega / (math.sqrt(2.0) * k * v_th)
    k_debye_sq = (k * v_th / omega_p) ** 2
    return 1.0 - plasma_z_prime(zeta) / (2.0 * k_debye_sq)


def langmuir_root(k: float, v_th: float = 1.0, omega_p: float = 1.0, guess: complex | None = None) -> complex:
    """Least-damped Langmuir root ``w_r + i gamma`` (gamma < 0 is damping)."""
    if guess is None:
        guess = complex(math.sqrt(omega_p**2 + 3 * (k * v_th) ** 2), -0.1 * omega_p)

    def residual(z):
        d = dielectric(complex(z[0], z[1]), k, v_th, omega_p)
        return [d.real, d.imag]

    sol = root(residual, [guess.real, guess.imag], method="hybr", tol=1e-14)
    if not sol.success or np.max(np.abs(residual(sol.x))) > 1e-10:
        raise FitFailed(f"dispersion root did not converge for k={k}: {sol.message}")
    return complex(sol.x[0], sol.x[1])
