"""Microscopic model of the nearest-neighbour (NN) chain.

State variables are the discrete strains ``r_j = x_{j+1} - x_j`` and the
velocities ``v_j = dx_j/dt``.  Velocities live on sites ``j_min..j_max`` and
strains on bonds ``j_min..j_max-1``, so a state always carries one fewer strain
than velocities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class Harmonic:
    """Quadratic potential ``c0^2 r^2 / 2 + d1 r + d0``."""

    c0: float = 1.0
    d1: float = 0.0
    d0: float = 0.0

    def __post_init__(self):
        if not self.c0 > 0:
            raise ValueError(f"sound speed must be positive, got {self.c0}")

    def value(self, r: ArrayLike) -> ArrayLike:
        return 0.5 * self.c0**2 * r * r + self.d1 * r + self.d0

    def force(self, r: ArrayLike) -> ArrayLike:
        return self.c0**2 * r + self.d1


@dataclass(frozen=True)
class BiQuadratic:
    """Double well ``min{(r-1)^2, (r+1)^2} / 2`` with unit sound speed.

    The derivative jumps at ``r = 0``; the force there is taken from the
    right well (``sign*(0) = +1``).
    """

    c0: float = field(default=1.0, init=False)

    @staticmethod
    def well(r: ArrayLike) -> ArrayLike:
        return np.where(np.asarray(r) >= 0.0, 1.0, -1.0)

    def value(self, r: ArrayLike) -> ArrayLike:
        out = 0.5 * (r - self.well(r)) ** 2
        return float(out) if np.ndim(out) == 0 else out

    def force(self, r: ArrayLike) -> ArrayLike:
        out = r - self.well(r)
        return float(out) if np.ndim(out) == 0 else out


Potential = Union[Harmonic, BiQuadratic]


def potential_value(p: Potential, r: ArrayLike) -> ArrayLike:
    return p.value(r)


def potential_force(p: Potential, r: ArrayLike) -> ArrayLike:
    """Return ``Phi'(r)``."""
    return p.force(r)


@dataclass(frozen=True)
class ChainState:
    """Snapshot of a finite chain segment at time ``t``."""

    t: float
    j_min: int
    r: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        v = np.array(self.v, dtype=float)
        if r.ndim != 1 or v.ndim != 1:
            raise ValueError("strains and velocities must be one-dimensional")
        if len(v) < 1 or len(r) != len(v) - 1:
            raise ValueError(
                f"need len(r) == len(v) - 1, got {len(r)} strains and {len(v)} velocities"
            )
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise ValueError("chain state contains non-finite entries")
        r.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "j_min", int(self.j_min))
        object.__setattr__(self, "t", float(self.t))

    @property
    def j_max(self) -> int:
        return self.j_min + len(self.v) - 1

    @property
    def sites(self) -> np.ndarray:
        """Velocity indices ``j_min..j_max``."""
        return np.arange(self.j_min, self.j_max + 1)

    @property
    def bonds(self) -> np.ndarray:
        """Strain indices ``j_min..j_max-1``."""
        return np.arange(self.j_min, self.j_max)

    def displacements(self, x0: float = 0.0) -> np.ndarray:
        """Positions ``x_j`` rebuilt from strains, with ``x_{j_min} = x0``."""
        return x0 + np.concatenate(([0.0], np.cumsum(self.r)))

    @classmethod
    def uniform(cls, j_min: int, j_max: int, r0: float, v0: float, t: float = 0.0):
        n = j_max - j_min + 1
        return cls(t, j_min, np.full(n - 1, float(r0)), np.full(n, float(v0)))

    @classmethod
    def from_displacements(cls, j_min: int, x, v, t: float = 0.0):
        return cls(t, j_min, np.diff(np.asarray(x, dtype=float)), v)


@dataclass(frozen=True)
class Forcing:
    """Zero-mean periodic force applied to the particle ``j = 0``."""

    profile: Callable[[float], float]
    period: float
    site: int = 0
    check: bool = True

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError("forcing period must be positive")
        if self.site != 0:
            raise ValueError("forcing acts on site 0 only")
        if self.check:
            mean, _ = integrate.quad(self.profile, 0.0, self.period, limit=200)
            size, _ = integrate.quad(lambda s: abs(self.profile(s)), 0.0, self.period, limit=200)
            if abs(mean) > 1e-8 * max(size, 1e-300) and abs(mean) > 1e-12:
                raise ValueError(f"forcing has non-zero mean over one period ({mean:.3e})")

    def __call__(self, t: float) -> float:
        return float(self.profile(t))

    @classmethod
    def cosine(cls, amplitude: float = 1.0, sigma: float = 1.0, phase: float = 0.0):
        """``zeta(t) = amplitude * cos(sigma t + phase)``."""
        if not sigma > 0:
            raise ValueError("forcing frequency must be positive")
        return cls(
            lambda t: amplitude * math.cos(sigma * t + phase),
            period=2.0 * math.pi / sigma,
            check=False,
        )

    def time_reversed(self, t_ref: float) -> "Forcing":
        """Forcing ``s -> zeta(t_ref - s)`` for runs started from a reversed state."""
        prof = self.profile
        return Forcing(lambda s: prof(t_ref - s), self.period, self.site, check=False)


def _kick(r: np.ndarray, p: Potential) -> np.ndarray:
    """Interior accelerations ``Phi'(r_j) - Phi'(r_{j-1})`` (sites j_min+1..j_max-1)."""
    f = p.force(r)
    return f[1:] - f[:-1]


def rhs(state: ChainState, p: Potential, f: Optional[Forcing] = None):
    """Time derivatives ``(dr, dv)`` of the first-order lattice equations.

    Boundary velocities are held (Dirichlet), so ``dv`` vanishes at both end
    sites.  The forcing enters ``dv_0`` when site 0 is an interior site.
    """
    dr = np.diff(state.v)
    dv = np.zeros_like(state.v)
    dv[1:-1] = _kick(state.r, p)
    if f is not None:
        i0 = -state.j_min
        if 0 < i0 < len(state.v) - 1:
            dv[i0] += f(state.t)
    return dr, dv


def discrete_energy(state: ChainState, p: Potential) -> float:
    """Total energy ``sum v_j^2/2 + sum Phi(r_j)`` over the index range."""
    return float(0.5 * np.dot(state.v, state.v) + np.sum(p.value(state.r)))


def window_energy(state: ChainState, p: Potential, a: int, b: int) -> float:
    """``sum_{j=a}^{b} (v_j^2/2 + Phi(r_{j-1}))`` for sites ``j_min < a <= b <= j_max``."""
    i, k = a - state.j_min, b - state.j_min
    if i < 1 or k > len(state.v) - 1 or i > k:
        raise IndexError(f"window [{a}, {b}] not inside chain interior")
    v = state.v[i : k + 1]
    return float(0.5 * np.dot(v, v) + np.sum(p.value(state.r[i - 1 : k])))


def window_flux(state: ChainState, p: Potential, a: int, b: int) -> float:
    """Net energy inflow ``v_b Phi'(r_b) - v_{a-1} Phi'(r_{a-1})`` into the window [a, b]."""
    i, k = a - state.j_min, b - state.j_min
    if i < 1 or k > len(state.r) - 1:
        raise IndexError(f"window [{a}, {b}] needs bonds a-1 and b inside the chain")
    return float(state.v[k] * p.force(state.r[k]) - state.v[i - 1] * p.force(state.r[i - 1]))
