"""Velocity-Verlet time stepping with Dirichlet ends.

Each step is kick-drift-kick: half-step on the interior velocities, a full step
on the strains, another half-step on the velocities.  The first and last entry
of both ``r`` and ``v`` are never updated, which realises the Dirichlet data.
KDK makes a forward run followed by velocity reversal retrace itself exactly
(up to round-off).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from latticewave.chain_core import ChainState, Forcing, Potential, discrete_energy

log = logging.getLogger(__name__)


class IntegrationError(RuntimeError):
    """Raised when the lattice state blows up or becomes non-finite."""


@dataclass(frozen=True)
class SimConfig:
    potential: Potential
    initial: ChainState
    forcing: Optional[Forcing] = None
    dt: float = 0.05
    t_end: float = 1.0
    snapshot_stride: int = 1
    probe_sites: Sequence[int] = ()
    # require that no signal from the ends reaches the chain centre
    enforce_light_cone: bool = False

    def __post_init__(self):
        c0 = self.potential.c0
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.dt > 0.1 / c0 + 1e-15:
            raise ValueError(f"dt={self.dt} exceeds the budget 0.1/c0 = {0.1 / c0}")
        if self.t_end < 0:
            raise ValueError("t_end must be non-negative")
        if int(self.snapshot_stride) < 1:
            raise ValueError("snapshot_stride must be a positive integer")
        for j in self.probe_sites:
            if not self.initial.j_min <= j <= self.initial.j_max:
                raise ValueError(f"probe site {j} outside the chain")
        if self.enforce_light_cone:
            half = (self.initial.j_max - self.initial.j_min) / 2.0
            if self.t_end >= half / c0:
                raise ValueError(
                    f"t_end={self.t_end} lets boundary signals reach the centre (limit {half / c0})"
                )

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class Trajectory:
    snapshots: List[ChainState]
    config: SimConfig
    probe_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    # probe_v[k, i] = velocity at probe_sites[i] at probe_times[k] (every step)
    probe_v: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    def __len__(self):
        return len(self.snapshots)

    def __getitem__(self, i):
        return self.snapshots[i]

    def probe(self, site: int) -> np.ndarray:
        i = list(self.config.probe_sites).index(site)
        return self.probe_v[:, i]


def _forcing_index(state: ChainState, f: Optional[Forcing]) -> Optional[int]:
    if f is None:
        return None
    i0 = -state.j_min
    return i0 if 0 < i0 < len(state.v) - 1 else None


def _kdk(r, v, p, dt, t, f, i0):
    """Advance arrays ``r``, ``v`` in place by one step from time ``t``."""
    half = 0.5 * dt
    fr = p.force(r)
    v[1:-1] += half * (fr[1:] - fr[:-1])
    if i0 is not None:
        v[i0] += half * f(t)
    r[1:-1] += dt * (v[2:-1] - v[1:-2])
    fr = p.force(r)
    v[1:-1] += half * (fr[1:] - fr[:-1])
    if i0 is not None:
        v[i0] += half * f(t + dt)


def verlet_step(state: ChainState, p: Potential, f: Optional[Forcing] = None, dt: float = 0.05) -> ChainState:
    r = np.array(state.r)
    v = np.array(state.v)
    _kdk(r, v, p, dt, state.t, f, _forcing_index(state, f))
    if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
        raise IntegrationError(f"non-finite state after step at t={state.t + dt}")
    return ChainState(state.t + dt, state.j_min, r, v)


def reverse(state: ChainState) -> ChainState:
    """Time reversal: negate velocities, keep strains and time."""
    return ChainState(state.t, state.j_min, state.r, -state.v)


def simulate(cfg: SimConfig) -> Trajectory:
    """Integrate from ``cfg.initial`` to ``cfg.t_end`` and collect snapshots."""
    s0 = cfg.initial
    p, f, dt = cfg.potential, cfg.forcing, cfg.dt
    r = np.array(s0.r)
    v = np.array(s0.v)
    i0 = _forcing_index(s0, f)
    n = cfg.n_steps
    stride = int(cfg.snapshot_stride)
    probes = np.array([j - s0.j_min for j in cfg.probe_sites], dtype=int)

    e0 = discrete_energy(s0, p)
    e_scale = max(abs(e0), 1e-12)
    snaps = [s0]
    probe_t = np.empty(n + 1)
    probe_v = np.empty((n + 1, len(probes)))
    probe_t[0] = s0.t
    probe_v[0] = v[probes]

    t = s0.t
    for k in range(1, n + 1):
        _kdk(r, v, p, dt, t, f, i0)
        t = s0.t + k * dt
        probe_t[k] = t
        probe_v[k] = v[probes]
        if k % stride == 0 or k == n:
            if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
                raise IntegrationError(f"non-finite state at t={t:.6g} (step {k})")
            snap = ChainState(t, s0.j_min, r.copy(), v.copy())
            if f is None:
                e = discrete_energy(snap, p)
                if abs(e - e0) > 10.0 * e_scale:
                    raise IntegrationError(
                        f"energy grew from {e0:.6g} to {e:.6g} by t={t:.6g}; reduce dt"
                    )
            # snapshots stay uniformly spaced; a trailing partial stride is dropped
            if k % stride == 0:
                snaps.append(snap)
    log.debug("simulated %d steps, %d snapshots", n, len(snaps))
    return Trajectory(snaps, cfg, probe_t, probe_v)
