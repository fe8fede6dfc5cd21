"""Dispersion relation of the harmonic chain and the forced (Sommerfeld) problem.

``Omega(k) = 2 c0 sin(k/2)``.  Travelling waves with phase speed ``c`` carry the
wave numbers ``k > 0`` with ``c^2 k^2 = Omega(k)^2``; the periodically forced
chain radiates at the wave number ``kappa`` with ``Omega(kappa) = sigma``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.optimize import brentq

SCAN_CELLS = 10_000
BISECT_TOL = 1e-13


class OutOfBandError(ValueError):
    """Frequency or phase speed outside the admissible range."""


def omega(k, c0: float = 1.0):
    return 2.0 * c0 * np.sin(0.5 * np.asarray(k)) if np.ndim(k) else 2.0 * c0 * math.sin(0.5 * k)


def omega_prime(k, c0: float = 1.0):
    return c0 * np.cos(0.5 * np.asarray(k)) if np.ndim(k) else c0 * math.cos(0.5 * k)


@dataclass(frozen=True)
class DispersionRoot:
    kappa: float
    c_gr: float
    branch_index: int


def group_speed(kappa: float, c_ph: float, c0: float = 1.0) -> float:
    """Signed group speed of the mode ``kappa`` travelling with phase speed ``c_ph``.

    The mode oscillates with frequency ``c_ph * kappa = +-|Omega(kappa)|``; the
    branch of ``+-Omega`` through that point gives the group speed.
    """
    s = math.copysign(1.0, c_ph) * math.copysign(1.0, math.sin(0.5 * kappa))
    return s * omega_prime(kappa, c0)


def solve_kappa_forced(sigma: float, c0: float = 1.0) -> float:
    """Wave number in ``(0, pi)`` excited by forcing at frequency ``sigma``."""
    if not 0.0 < sigma < 2.0 * c0:
        raise OutOfBandError(f"forcing frequency {sigma} outside the band (0, {2.0 * c0})")
    return 2.0 * math.asin(sigma / (2.0 * c0))


def solve_kappa_tw(c_ph: float, c0: float = 1.0) -> List[DispersionRoot]:
    """All positive roots of ``c_ph^2 k^2 = Omega(k)^2``, in increasing order."""
    c = abs(c_ph)
    if c_ph == 0.0 or c >= c0:
        raise OutOfBandError(f"phase speed must satisfy 0 < |c_ph| < c0, got {c_ph}")

    def g(k):
        return c * k - 2.0 * c0 * abs(math.sin(0.5 * k))

    # beyond k_max the line c*k exceeds 2*c0 >= |Omega|
    k_max = 2.0 * c0 / c
    grid = np.linspace(0.0, k_max, SCAN_CELLS + 1)[1:]
    vals = c * grid - 2.0 * c0 * np.abs(np.sin(0.5 * grid))
    roots = []
    s = np.sign(vals)
    # a root landing exactly on a grid point is taken once, from the cell it starts
    for i in np.nonzero((s[:-1] != s[1:]) & (s[1:] != 0))[0]:
        a, b = grid[i], grid[i + 1]
        if vals[i] == 0.0:
            k = a
        else:
            k = brentq(g, a, b, xtol=BISECT_TOL, rtol=4 * np.finfo(float).eps)
        roots.append(DispersionRoot(k, group_speed(k, c_ph, c0), int(k // (2.0 * math.pi))))
    return roots


def kappa_single(c_ph: float, c0: float = 1.0) -> DispersionRoot:
    """The unique wave number for ``c2 < |c_ph| < c0``."""
    roots = solve_kappa_tw(c_ph, c0)
    if len(roots) != 1:
        raise OutOfBandError(
            f"|c_ph|={abs(c_ph)} gives {len(roots)} wave numbers; need c2 < |c_ph| < c0"
        )
    return roots[0]


def _tangency_x() -> float:
    # tan(x) = x on (pi, 3pi/2): the line c*k touches the second lobe of |Omega|
    return brentq(lambda x: math.sin(x) - x * math.cos(x), math.pi + 1e-9, 1.5 * math.pi - 1e-9, xtol=1e-15)


def critical_speeds(c0: float = 1.0) -> Tuple[float, float]:
    """Speeds ``(c1, c2)`` separating type-I, type-II and multi-mode tails.

    ``c1`` is where the group speed of the tail changes sign (kappa = pi), so
    ``c1 = Omega(pi)/pi``.  Below ``c2`` the line ``c k`` cuts a second lobe
    of ``|Omega|`` and the tail wave number is no longer unique.
    """
    if not c0 > 0:
        raise ValueError("c0 must be positive")
    c1 = omega(math.pi, c0) / math.pi
    c2 = -c0 * math.cos(_tangency_x())
    return c1, c2


# --- forced chain -----------------------------------------------------------


@dataclass(frozen=True)
class SommerfeldSolution:
    """Source (``+``) or sink (``-``) response to ``zeta = -cos(sigma t)`` at j = 0.

    Strains and velocities:
    ``v_j = -+A cos(kappa|j| -+ sigma t)``,
    ``r_j = sgn(j + 1/2) A cos(kappa|j + 1/2| -+ sigma t)``.
    """

    sigma: float
    kappa: float
    A: float
    branch: str
    alpha: complex
    beta: complex

    @property
    def sign(self) -> int:
        return 1 if self.branch == "source" else -1

    def displacement(self, j, t):
        j = np.asarray(j, dtype=float)
        return np.sin(self.kappa * np.abs(j) - self.sign * self.sigma * t) / (
            2.0 * omega(self.kappa) * omega_prime(self.kappa)
        )

    def velocity(self, j, t):
        j = np.asarray(j, dtype=float)
        return -self.sign * self.A * np.cos(self.kappa * np.abs(j) - self.sign * self.sigma * t)

    def strain(self, j, t):
        h = np.asarray(j, dtype=float) + 0.5
        return np.sign(h) * self.A * np.cos(self.kappa * np.abs(h) - self.sign * self.sigma * t)

    def forcing_profile(self, t):
        return -math.cos(self.sigma * t)

    def helmholtz(self, j) -> np.ndarray:
        """Complex amplitudes ``u_j(alpha, beta)`` of the general solution."""
        j = np.asarray(j, dtype=float)
        up = np.exp(1j * self.kappa * np.abs(j)) / (2j * omega(self.kappa) * omega_prime(self.kappa))
        return up + self.alpha * np.exp(-1j * self.kappa * j) + self.beta * np.exp(1j * self.kappa * j)


def sommerfeld_solution(sigma: float, branch: str = "source") -> SommerfeldSolution:
    if branch not in ("source", "sink"):
        raise ValueError(f"branch must be 'source' or 'sink', got {branch!r}")
    kappa = solve_kappa_forced(sigma)
    A = 1.0 / (2.0 * omega_prime(kappa))
    if branch == "source":
        alpha = beta = 0j
    else:
        alpha = beta = -1.0 / (2j * omega(kappa) * omega_prime(kappa))
    return SommerfeldSolution(sigma, kappa, A, branch, complex(alpha), complex(beta))


@dataclass(frozen=True)
class SommerfeldFields:
    E_osc: float
    Q_minus_inf: float
    Q_plus_inf: float
    theta: float

    @property
    def som1(self) -> bool:
        return self.theta > 0

    @property
    def som2(self) -> bool:
        return self.Q_plus_inf > 0 and self.Q_minus_inf < 0


def sommerfeld_fields(sol: SommerfeldSolution) -> SommerfeldFields:
    """Macroscopic fields of the two-sided radiating solution."""
    e_osc = 0.5 * sol.A**2
    q = sol.sign * omega_prime(sol.kappa) * e_osc
    return SommerfeldFields(e_osc, -q, q, 2.0 * q)


def radiation_defects(alpha: complex, beta: complex, kappa: float) -> Tuple[float, float]:
    """Amplitudes of ``du/dj -+ i kappa u`` as ``j -> +-inf`` for ``u(alpha, beta)``.

    Only the incoming plane waves survive in these limits: ``alpha e^{-i kappa j}``
    on the right and ``beta e^{+i kappa j}`` on the left.
    """
    return abs(-2j * kappa * alpha), abs(2j * kappa * beta)


def check_asymptotic_radiation(alpha: complex, beta: complex, tol: float = 1e-12) -> bool:
    """Discrete radiation condition at both ends; holds only for ``alpha = beta = 0``."""
    return cmath.isfinite(alpha) and cmath.isfinite(beta) and abs(alpha) <= tol and abs(beta) <= tol
