"""Exact travelling waves of the harmonic chain and their mean fields."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import integrate

from latticewave.chain_core import ChainState, Harmonic, Potential
from latticewave.spectral import group_speed, omega

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Mode:
    kappa: float
    A: float
    eta: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("mode wave number must be positive")
        if self.A < 0:
            raise ValueError("mode amplitude must be non-negative")
        object.__setattr__(self, "eta", float(self.eta) % TWO_PI)


@dataclass(frozen=True)
class TravellingWaveSpec:
    c_ph: float
    modes: Tuple[Mode, ...] = ()
    R: float = 0.0
    V: float = 0.0
    potential: Harmonic = field(default_factory=Harmonic)
    direction: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if self.c_ph == 0:
            raise ValueError("phase speed must be non-zero")
        expected = "right" if self.c_ph > 0 else "left"
        if self.direction is None:
            object.__setattr__(self, "direction", expected)
        elif self.direction != expected:
            raise ValueError(f"direction {self.direction!r} inconsistent with c_ph={self.c_ph}")
        c0 = self.potential.c0
        for m in self.modes:
            err = abs(self.c_ph**2 * m.kappa**2 - omega(m.kappa, c0) ** 2)
            if err > 1e-10 * max(1.0, m.kappa**2):
                raise ValueError(f"kappa={m.kappa} does not solve the dispersion relation (residual {err:.2e})")

    @property
    def amplitude(self) -> float:
        return math.sqrt(sum(m.A**2 for m in self.modes))

    def velocity_signs(self) -> np.ndarray:
        # right-moving first-lobe modes need v = V - c0 A cos(.) to solve the lattice equations
        return np.array(
            [-math.copysign(1.0, self.c_ph) * math.copysign(1.0, math.sin(0.5 * m.kappa)) for m in self.modes]
        )

    @classmethod
    def single(cls, c_ph: float, kappa: float, A: float, R: float = 0.0, V: float = 0.0,
               eta: float = 0.0, potential: Optional[Harmonic] = None):
        return cls(c_ph, (Mode(kappa, A, eta),), R, V, potential or Harmonic())


class WaveProfile:
    """Callable ``phi -> (R(phi), V(phi))`` for a travelling wave spec."""

    def __init__(self, spec: TravellingWaveSpec):
        self.spec = spec
        self._k = np.array([m.kappa for m in spec.modes])
        self._a = np.array([m.A for m in spec.modes])
        self._eta = np.array([m.eta for m in spec.modes])
        self._s = spec.velocity_signs()

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        c0 = self.spec.potential.c0
        if len(self._k) == 0:
            return np.full_like(phi, self.spec.R), np.full_like(phi, self.spec.V)
        arg = np.multiply.outer(phi, self._k) + self._eta
        r = self.spec.R + np.sum(self._a * np.cos(arg + 0.5 * self._k), axis=-1)
        v = self.spec.V + c0 * np.sum(self._s * self._a * np.cos(arg), axis=-1)
        return r, v

    def sample(self, j_min: int, j_max: int, t: float = 0.0) -> ChainState:
        """Lattice state ``r_j = R(j - c t)``, ``v_j = V(j - c t)``."""
        j = np.arange(j_min, j_max + 1, dtype=float)
        r, v = self(j - self.spec.c_ph * t)
        return ChainState(t, j_min, r[:-1], v)


def build_wave(spec: TravellingWaveSpec) -> WaveProfile:
    return WaveProfile(spec)


@dataclass(frozen=True)
class MeanFields:
    """Spatially constant thermodynamic fields of a travelling wave."""

    R: float
    V: float
    P: float
    E: float
    F: float
    U: float
    Q: float
    E_osc: float
    E_non: float
    Xi: float = 0.0

    def as_dict(self):
        return dict(R=self.R, V=self.V, P=self.P, E=self.E, F=self.F, U=self.U,
                    Q=self.Q, E_osc=self.E_osc, E_non=self.E_non, Xi=self.Xi)


def tw_mean_fields(spec: TravellingWaveSpec, p: Optional[Potential] = None) -> MeanFields:
    """Closed-form means for harmonic travelling waves.

    ``Q`` sums the group-speed weighted oscillatory energies of the modes,
    ``Q = sum_i c_gr,i * c0^2 A_i^2 / 2``; for one mode this is ``c_gr * E_osc``.
    """
    p = spec.potential if p is None else p
    if not isinstance(p, Harmonic):
        raise TypeError("closed-form travelling-wave fields need a harmonic potential")
    c0, R, V = p.c0, spec.R, spec.V
    P = -(c0**2) * R - p.d1
    e_non = 0.5 * V**2 + p.value(R)
    e_osc = 0.5 * c0**2 * spec.amplitude**2
    Q = sum(group_speed(m.kappa, spec.c_ph, c0) * 0.5 * c0**2 * m.A**2 for m in spec.modes)
    E = e_non + e_osc
    return MeanFields(R=R, V=V, P=P, E=E, F=V * P + Q, U=E - 0.5 * V**2, Q=Q, E_osc=e_osc, E_non=e_non)


def quadrature_mean(profile: WaveProfile, psi, L: float = 1e4, n: int = 1_000_001) -> float:
    """Trapezoid average of ``psi(R(phi), V(phi))`` over ``[-L, L]``.

    For a single mode ``L`` is snapped to a whole number of wavelengths, which
    removes the ``O(1/L)`` boundary term of the oscillatory parts.
    """
    modes = profile.spec.modes
    if len(modes) == 1:
        lam = TWO_PI / modes[0].kappa
        L = max(1, round(2.0 * L / lam)) * lam / 2.0
    phi = np.linspace(-L, L, n)
    r, v = profile(phi)
    return float(integrate.trapezoid(psi(r, v), phi) / (2.0 * L))
