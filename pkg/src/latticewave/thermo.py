"""Coarse-graining of lattice data into macroscopic thermodynamic fields.

Macroscopic coordinates are ``tau = eps * t`` and ``xi = eps * j`` with
``eps = 1/N``.  A thermodynamic field is approximated by a flat window average
of the atomic observable over ``2w + 1`` consecutive sites.  From the averaged
means of ``r``, ``v``, ``-Phi'(r)``, ``v^2/2 + Phi(r)`` and ``-v Phi'(r)`` all
other fields follow algebraically:

    U = E - V^2/2,  Q = F - V P,  E_non = V^2/2 + Phi(R),  E_osc = E - E_non.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import integrate

from latticewave.chain_core import ChainState, Forcing, Potential
from latticewave.integrator import Trajectory

FIELD_NAMES = ("R", "V", "P", "E", "F", "U", "Q", "E_osc", "E_non", "Xi")
CSV_COLUMNS = ("tau", "xi") + FIELD_NAMES


@dataclass(frozen=True)
class ScalingConfig:
    """Hyperbolic scaling ``eps``, window half-width ``w`` (sites), cell spacing ``h_xi``."""

    epsilon: float
    w: int
    h_xi: float

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.w < 10:
            raise ValueError(f"window half-width must be at least 10 sites, got {self.w}")
        if self.w * self.epsilon > 0.1:
            raise ValueError(
                f"window {self.w} sites spans {self.w * self.epsilon:.3g} macroscopic units; not mesoscopic"
            )
        if self.h_xi < self.epsilon * (1 - 1e-12):
            raise ValueError("cell spacing below one lattice site")

    @classmethod
    def for_chain(cls, N: int, w: Optional[int] = None, cell_sites: Optional[int] = None):
        """Defaults: ``w = max(10, round(sqrt(N)))`` and cells every ``max(1, w // 4)`` sites."""
        w = max(10, int(round(math.sqrt(N)))) if w is None else int(w)
        cs = max(1, w // 4) if cell_sites is None else int(cell_sites)
        return cls(1.0 / N, w, cs / N)

    @property
    def cell_sites(self) -> int:
        return max(1, int(round(self.h_xi / self.epsilon)))


@dataclass(frozen=True)
class ThermoFields:
    """Fields on a ``(tau, xi)`` grid; every field array has shape ``(len(tau), len(xi))``."""

    tau: np.ndarray
    xi: np.ndarray
    R: np.ndarray
    V: np.ndarray
    P: np.ndarray
    E: np.ndarray
    F: np.ndarray
    U: np.ndarray
    Q: np.ndarray
    E_osc: np.ndarray
    E_non: np.ndarray
    Xi: np.ndarray
    truncated: np.ndarray

    @property
    def shape(self):
        return self.R.shape

    def field(self, name: str) -> np.ndarray:
        if name not in FIELD_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def slice(self, n: int) -> "ThermoFields":
        n = range(len(self.tau))[n]
        kw = {k: getattr(self, k)[n : n + 1] for k in FIELD_NAMES + ("truncated",)}
        return ThermoFields(tau=self.tau[n : n + 1], xi=self.xi, **kw)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for n, tau in enumerate(self.tau):
                for m, xi in enumerate(self.xi):
                    row = [tau, xi] + [getattr(self, k)[n, m] for k in FIELD_NAMES]
                    w.writerow([f"{x:.9g}" for x in row])

    @classmethod
    def from_csv(cls, path) -> "ThermoFields":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if tuple(rows[0]) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {rows[0]}")
        data = np.array(rows[1:], dtype=float)
        tau = np.unique(data[:, 0])
        xi = data[data[:, 0] == tau[0], 1]
        shape = (len(tau), len(xi))
        kw = {k: data[:, 2 + i].reshape(shape) for i, k in enumerate(FIELD_NAMES)}
        return cls(tau=tau, xi=xi, truncated=np.zeros(shape, dtype=bool), **kw)


def stack(slices: Sequence[ThermoFields]) -> ThermoFields:
    """Concatenate single-time field sets on a common ``xi`` grid."""
    xi = slices[0].xi
    for s in slices[1:]:
        if s.xi.shape != xi.shape or not np.allclose(s.xi, xi):
            raise ValueError("field slices live on different xi grids")
    kw = {k: np.concatenate([getattr(s, k) for s in slices]) for k in FIELD_NAMES + ("truncated",)}
    return ThermoFields(tau=np.concatenate([s.tau for s in slices]), xi=xi, **kw)


def _box_mean(a: np.ndarray, centres: np.ndarray, w: int):
    cs = np.concatenate(([0.0], np.cumsum(a)))
    lo = np.clip(centres - w, 0, len(a) - 1)
    hi = np.clip(centres + w, 0, len(a) - 1)
    return (cs[hi + 1] - cs[lo]) / (hi - lo + 1)


def window_average(snapshot: ChainState, p: Potential, cfg: ScalingConfig) -> ThermoFields:
    """Boxcar averages over ``2w+1`` sites, one cell every ``cfg.cell_sites`` sites.

    Observables pair ``r_j`` with ``v_j`` on ``j_min..j_max-1``.  Cells whose
    window leaves the chain are averaged over the available sites and flagged.
    """
    r = snapshot.r
    v = snapshot.v[:-1]
    n = len(r)
    if n < 2 * cfg.w + 1:
        raise ValueError(f"chain of {n} bonds is shorter than one window ({2 * cfg.w + 1} sites)")
    cs = cfg.cell_sites
    j0, j1 = snapshot.j_min, snapshot.j_max - 1
    jc = np.arange(math.ceil(j0 / cs) * cs, j1 + 1, cs)
    idx = jc - j0
    trunc = (idx - cfg.w < 0) | (idx + cfg.w > n - 1)

    force = p.force(r)
    R = _box_mean(r, idx, cfg.w)
    V = _box_mean(v, idx, cfg.w)
    P = -_box_mean(force, idx, cfg.w)
    E = _box_mean(0.5 * v * v + p.value(r), idx, cfg.w)
    F = -_box_mean(v * force, idx, cfg.w)
    e_non = 0.5 * V * V + p.value(R)
    fields = ThermoFields(
        tau=np.array([cfg.epsilon * snapshot.t]),
        xi=cfg.epsilon * jc.astype(float),
        R=R[None], V=V[None], P=P[None], E=E[None], F=F[None],
        U=(E - 0.5 * V * V)[None],
        Q=(F - V * P)[None],
        E_osc=(E - e_non)[None],
        E_non=e_non[None],
        Xi=np.zeros((1, len(jc))),
        truncated=trunc[None],
    )
    return production_xi(fields, p)


def average_trajectory(traj: Trajectory, p: Potential, cfg: ScalingConfig,
                       indices: Optional[Iterable[int]] = None) -> ThermoFields:
    idx = range(len(traj)) if indices is None else indices
    return stack([window_average(traj[i], p, cfg) for i in idx])


def variance_energy(snapshot: ChainState, p: Potential, cfg: ScalingConfig) -> np.ndarray:
    """``<(v - <v>)^2>/2 + <Phi(r)> - Phi(<r>)`` per cell; cross-check for ``E_osc``."""
    r, v = snapshot.r, snapshot.v[:-1]
    cs = cfg.cell_sites
    jc = np.arange(math.ceil(snapshot.j_min / cs) * cs, snapshot.j_max, cs)
    idx = jc - snapshot.j_min
    V = _box_mean(v, idx, cfg.w)
    var_v = _box_mean(v * v, idx, cfg.w) - V * V
    return 0.5 * var_v + _box_mean(p.value(r), idx, cfg.w) - p.value(_box_mean(r, idx, cfg.w))


def production_xi(fields: ThermoFields, p: Potential) -> ThermoFields:
    """Fill ``Xi = -(P + Phi'(R)) dV/dxi`` (central differences, one-sided at the ends)."""
    if len(fields.xi) < 2:
        return replace(fields, Xi=np.zeros_like(fields.R))
    dV = np.gradient(fields.V, fields.xi, axis=1)
    return replace(fields, Xi=-(fields.P + p.force(fields.R)) * dV)


def production_theta(traj: Trajectory, f: Forcing, cfg: ScalingConfig, tau: float, delta: float) -> float:
    """Mean power ``(eps / 2 delta) * int v_0 zeta dt`` over ``[(tau-delta)/eps, (tau+delta)/eps]``."""
    if f is None:
        return 0.0
    if not delta > 0:
        raise ValueError("delta must be positive")
    if 0 in traj.config.probe_sites:
        t, v0 = traj.probe_times, traj.probe(0)
    else:
        t = traj.times
        i0 = -traj[0].j_min
        v0 = np.array([s.v[i0] for s in traj.snapshots])
    ta, tb = (tau - delta) / cfg.epsilon, (tau + delta) / cfg.epsilon
    slack = 1e-9 * max(1.0, abs(tb))
    if ta < t[0] - slack or tb > t[-1] + slack:
        raise ValueError(f"interval [{ta:.6g}, {tb:.6g}] outside trajectory span [{t[0]:.6g}, {t[-1]:.6g}]")
    sel = (t >= ta - slack) & (t <= tb + slack)
    ts = t[sel]
    work = v0[sel] * np.array([f(s) for s in ts])
    return float(integrate.trapezoid(work, ts) / (ts[-1] - ts[0]))


# --- weak-form residuals ----------------------------------------------------


def _bump(s):
    inside = np.abs(s) < 1.0
    q = np.where(inside, 1.0 - s * s, 0.0)
    return q**3, np.where(inside, -6.0 * s * q * q, 0.0)


@dataclass(frozen=True)
class BumpTestFunction:
    """``phi(tau, xi) = b((tau - tau_c)/tau_h) * b((xi - xi_c)/xi_h)`` with ``b(s) = (1 - s^2)^3``."""

    tau_c: float
    xi_c: float
    tau_h: float
    xi_h: float

    def evaluate(self, tau, xi):
        bt, dbt = _bump((np.asarray(tau) - self.tau_c) / self.tau_h)
        bx, dbx = _bump((np.asarray(xi) - self.xi_c) / self.xi_h)
        phi = np.outer(bt, bx)
        return phi, np.outer(dbt / self.tau_h, bx), np.outer(bt, dbx / self.xi_h)

    def contains_xi(self, x: float) -> bool:
        return abs(x - self.xi_c) < self.xi_h


LAWS = {
    # law: (density, flux J) with d_tau density + d_xi J = 0
    "mass": lambda f: (f.R, -f.V),
    "momentum": lambda f: (f.V, f.P),
    "energy": lambda f: (f.E, f.F),
}


def conservation_residual(fields: ThermoFields, law: str, test_fn: BumpTestFunction,
                          forced: bool = False, normalize: bool = False) -> float:
    """Weak-form residual ``|int int density * phi_tau + flux * phi_xi|``.

    With ``normalize`` the value is divided by the integral of the absolute
    integrand, which makes residuals comparable across field magnitudes.
    """
    if law not in LAWS:
        raise ValueError(f"unknown conservation law {law!r}")
    if len(fields.tau) < 2:
        raise ValueError("need at least two time slices")
    tf = test_fn
    if (tf.tau_c - tf.tau_h < fields.tau[0] - 1e-12 or tf.tau_c + tf.tau_h > fields.tau[-1] + 1e-12
            or tf.xi_c - tf.xi_h < fields.xi[0] - 1e-12 or tf.xi_c + tf.xi_h > fields.xi[-1] + 1e-12):
        raise ValueError("test function support exceeds the field grid")
    if forced and law == "energy" and tf.contains_xi(0.0):
        raise ValueError("energy is only conserved away from the forced site; move the test support")
    rho, flux = LAWS[law](fields)
    _, phi_t, phi_x = tf.evaluate(fields.tau, fields.xi)
    a = rho * phi_t
    b = flux * phi_x
    if forced and law == "energy":
        col = np.abs(fields.xi) < 0.5 * np.min(np.diff(fields.xi))
        a[:, col] = 0.0
        b[:, col] = 0.0

    def dbl(g):
        return integrate.trapezoid(integrate.trapezoid(g, fields.xi, axis=1), fields.tau)

    res = abs(dbl(a + b))
    if normalize:
        scale = dbl(np.abs(a) + np.abs(b))
        return float(res / scale) if scale > 0 else 0.0
    return float(res)


def partial_energy_balance(fields: ThermoFields, a: float, b: float) -> np.ndarray:
    """``d/dtau int_a^b E_osc + Q(b) - Q(a) - int_a^b Xi`` at interior time slices."""
    sel = (fields.xi >= a) & (fields.xi <= b)
    xs = fields.xi[sel]
    content = integrate.trapezoid(fields.E_osc[:, sel], xs, axis=1)
    prod = integrate.trapezoid(fields.Xi[:, sel], xs, axis=1)
    flux = fields.Q[:, sel][:, -1] - fields.Q[:, sel][:, 0]
    rate = np.gradient(content, fields.tau)
    return (rate + flux - prod)[1:-1]
