"""Phase-transition waves in the bi-quadratic chain: jump conditions and selection criteria.

A wave moves with phase speed ``c`` from the left state (strain in the ``-1``
well) to the right state (``+1`` well).  Both sides carry a periodic tail with
the single wave number ``kappa(c)`` and amplitudes ``A_minus``/``A_plus``.
Jumps are ``[[X]] = X_plus - X_minus``, means ``<X> = (X_plus + X_minus)/2``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from latticewave.spectral import OutOfBandError, critical_speeds, kappa_single

IDENTITY_TOL = 1e-10
# productions this close to zero (relative to the energies involved) count as zero
ZERO_TOL = 1e-12


class WellError(ValueError):
    """Asymptotic strains do not sit in opposite wells."""


def jump_conditions(c_ph: float):
    """Mass and momentum jumps ``([[R]], [[V]])`` across a wave of speed ``c_ph``."""
    if abs(c_ph) >= 1.0:
        raise OutOfBandError(f"phase-transition waves are subsonic, got c_ph={c_ph}")
    d = 1.0 - c_ph * c_ph
    return 2.0 / d, -2.0 * c_ph / d


@dataclass(frozen=True)
class PTWaveState:
    c_ph: float
    kappa: float
    c_gr: float
    R_minus: float
    R_plus: float
    V_minus: float
    V_plus: float
    A_minus: float
    A_plus: float

    @property
    def direction(self) -> str:
        return "right" if self.c_ph > 0 else "left"

    @property
    def sign_ok(self) -> bool:
        return self.R_plus > 0.0 > self.R_minus

    @property
    def confined(self) -> bool:
        """Tail oscillations stay inside their wells."""
        return self.R_plus - self.A_plus > 0.0 and self.R_minus + self.A_minus < 0.0

    @property
    def jump_R(self):
        return self.R_plus - self.R_minus

    @property
    def jump_V(self):
        return self.V_plus - self.V_minus

    @property
    def mean_R(self):
        return 0.5 * (self.R_plus + self.R_minus)

    @property
    def mean_V(self):
        return 0.5 * (self.V_plus + self.V_minus)

    @property
    def E_osc_minus(self):
        return 0.5 * self.A_minus**2

    @property
    def E_osc_plus(self):
        return 0.5 * self.A_plus**2

    @property
    def jump_E_osc(self):
        return self.E_osc_plus - self.E_osc_minus

    @property
    def Q_minus(self):
        return self.c_gr * self.E_osc_minus

    @property
    def Q_plus(self):
        return self.c_gr * self.E_osc_plus

    # pressure P = -Phi'(R) with R_plus in the +1 well and R_minus in the -1 well
    @property
    def P_minus(self):
        return -self.R_minus - 1.0

    @property
    def P_plus(self):
        return -self.R_plus + 1.0

    @property
    def E_non_minus(self):
        return 0.5 * self.V_minus**2 + 0.5 * (self.R_minus + 1.0) ** 2

    @property
    def E_non_plus(self):
        return 0.5 * self.V_plus**2 + 0.5 * (self.R_plus - 1.0) ** 2

    @property
    def Xi(self):
        return (self.c_gr - self.c_ph) * self.jump_E_osc

    @property
    def Upsilon(self):
        """Configurational force ``[[Phi(R)]] - <Phi'(R)> [[R]]`` with side-assigned wells."""
        jump_phi = 0.5 * (self.R_plus - 1.0) ** 2 - 0.5 * (self.R_minus + 1.0) ** 2
        mean_force = 0.5 * ((self.R_plus - 1.0) + (self.R_minus + 1.0))
        return jump_phi - mean_force * self.jump_R

    def jump_residuals(self):
        """Residuals of the mass, momentum and energy jump conditions."""
        c = self.c_ph
        e = c * ((self.E_non_plus + self.E_osc_plus) - (self.E_non_minus + self.E_osc_minus)) - (
            (self.P_plus * self.V_plus + self.Q_plus) - (self.P_minus * self.V_minus + self.Q_minus)
        )
        return (
            c * self.jump_R + self.jump_V,
            c * self.jump_V - (self.P_plus - self.P_minus),
            e,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(
            direction=self.direction,
            sign_ok=self.sign_ok,
            jump_R=self.jump_R,
            jump_V=self.jump_V,
            mean_R=self.mean_R,
            mean_V=self.mean_V,
            E_osc_minus=self.E_osc_minus,
            E_osc_plus=self.E_osc_plus,
            jump_E_osc=self.jump_E_osc,
            Q_minus=self.Q_minus,
            Q_plus=self.Q_plus,
            Xi=self.Xi,
            Upsilon=self.Upsilon,
        )
        return d


def close_family(c_ph: float, A_minus: float, A_plus: float, mean_V: float = 0.0) -> PTWaveState:
    """Complete a wave from ``(c_ph, A_minus, A_plus, <V>)``.

    The mean strain follows from the energy transfer ``-2 c <R> = (c_gr - c)[[E_osc]]``
    and the strains from ``R_pm = <R> +- [[R]]/2``.
    """
    if A_minus < 0 or A_plus < 0:
        raise ValueError("tail amplitudes must be non-negative")
    if c_ph == 0:
        raise ZeroDivisionError("static interfaces (c_ph = 0) have no single tail wave number")
    root = kappa_single(c_ph)
    jR, jV = jump_conditions(c_ph)
    jE = 0.5 * (A_plus**2 - A_minus**2)
    mR = -(root.c_gr - c_ph) * jE / (2.0 * c_ph)
    return PTWaveState(
        c_ph=c_ph, kappa=root.kappa, c_gr=root.c_gr,
        R_minus=mR - 0.5 * jR, R_plus=mR + 0.5 * jR,
        V_minus=mean_V - 0.5 * jV, V_plus=mean_V + 0.5 * jV,
        A_minus=float(A_minus), A_plus=float(A_plus),
    )


def time_reversed(state: PTWaveState) -> PTWaveState:
    return PTWaveState(
        c_ph=-state.c_ph, kappa=state.kappa, c_gr=-state.c_gr,
        R_minus=state.R_minus, R_plus=state.R_plus,
        V_minus=-state.V_minus, V_plus=-state.V_plus,
        A_minus=state.A_minus, A_plus=state.A_plus,
    )


def xi_and_upsilon(state: PTWaveState):
    """Energy transfer ``Xi`` and configurational force ``Upsilon``; checks the kinetic relation."""
    if not state.sign_ok:
        raise WellError(f"R_minus={state.R_minus:.6g}, R_plus={state.R_plus:.6g} are not in opposite wells")
    xi, ups = state.Xi, state.Upsilon
    scale = max(1.0, abs(xi))
    if abs(state.c_ph * ups - xi) > IDENTITY_TOL * scale:
        raise ArithmeticError(f"kinetic relation violated: c*Upsilon={state.c_ph * ups}, Xi={xi}")
    if abs(-2.0 * state.c_ph * state.mean_R - xi) > IDENTITY_TOL * scale:
        raise ArithmeticError("energy transfer identity violated")
    return xi, ups


def classify_type(c_ph: float) -> str:
    """``"I"`` if the tail group speed has the sign of ``c_ph``, ``"II"`` otherwise."""
    c1, c2 = critical_speeds()
    c = abs(c_ph)
    if not c2 < c < 1.0:
        raise OutOfBandError(f"|c_ph|={c} outside the classification range ({c2:.6g}, 1)")
    wave_type = "I" if c > c1 else "II"
    c_gr = kappa_single(c_ph).c_gr
    if (wave_type == "I") != (math.copysign(1.0, c_gr) == math.copysign(1.0, c_ph)):
        raise ArithmeticError(f"type {wave_type} inconsistent with c_gr={c_gr} at c_ph={c_ph}")
    return wave_type


def causality_wave(c_ph: float, mean_V: float = 0.0) -> PTWaveState:
    """The wave without oscillations ahead of the interface.

    Behind it the tail amplitude is ``|2c / (c_gr - c)|``; then
    ``[[E_osc]] = -+2c^2/(c_gr - c)^2`` and ``Xi = 2c^2/(c - c_gr) > 0`` for
    right-moving waves.  Left-moving waves are the mirror image.
    """
    root = kappa_single(c_ph)
    a = abs(2.0 * c_ph / (root.c_gr - c_ph))
    if c_ph > 0:
        return close_family(c_ph, a, 0.0, mean_V)
    return close_family(c_ph, 0.0, a, mean_V)


def relative_flux(state: PTWaveState):
    """``Q - c_ph E_osc`` on both sides (flux seen by an observer riding the interface)."""
    d = state.c_gr - state.c_ph
    return d * state.E_osc_minus, d * state.E_osc_plus


@dataclass(frozen=True)
class CriteriaReport:
    som1: bool
    som2: bool
    entropy: bool
    causality_consistent: bool
    wave_type: str
    relative_flux_away: bool

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate_criteria(state: PTWaveState) -> CriteriaReport:
    """Production (SOM1), flux direction (SOM2), entropy and causality checks.

    Fluxes are Lagrangian: pointing away means ``Q_plus >= 0`` on the right and
    ``Q_minus <= 0`` on the left, whichever way the interface moves.  A side
    without oscillations carries no flux and passes.  Productions within
    rounding of zero count as zero for both SOM1 and the entropy flag.
    """
    scale = ZERO_TOL * max(1.0, state.E_osc_minus + state.E_osc_plus, abs(state.Upsilon))
    som1 = state.Xi >= -scale
    entropy = state.c_ph * state.Upsilon >= -scale
    away_plus = state.E_osc_plus == 0.0 or state.Q_plus >= 0.0
    away_minus = state.E_osc_minus == 0.0 or state.Q_minus <= 0.0
    ahead_quiet = state.A_plus == 0.0 if state.c_ph > 0 else state.A_minus == 0.0
    qt_minus, qt_plus = relative_flux(state)
    return CriteriaReport(
        som1=som1,
        som2=away_plus and away_minus,
        entropy=entropy,
        causality_consistent=ahead_quiet and som1,
        wave_type=classify_type(state.c_ph),
        relative_flux_away=qt_plus >= 0.0 and qt_minus <= 0.0,
    )
