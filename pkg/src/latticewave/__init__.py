"""Lattice dynamics of nearest-neighbour chains and selection criteria for waves.

The package simulates chains of unit masses with nearest-neighbour interaction,
coarse-grains the microscopic data into macroscopic thermodynamic fields, and
evaluates radiation, entropy and causality criteria for standing sources and
moving phase interfaces.
"""

from latticewave.chain_core import (
    BiQuadratic,
    ChainState,
    Forcing,
    Harmonic,
    discrete_energy,
    potential_force,
    potential_value,
    rhs,
)
from latticewave.integrator import (
    IntegrationError,
    SimConfig,
    Trajectory,
    reverse,
    simulate,
    verlet_step,
)

__all__ = [
    "BiQuadratic",
    "ChainState",
    "Forcing",
    "Harmonic",
    "IntegrationError",
    "SimConfig",
    "Trajectory",
    "discrete_energy",
    "potential_force",
    "potential_value",
    "reverse",
    "rhs",
    "simulate",
    "verlet_step",
]

__version__ = "0.1.0"
