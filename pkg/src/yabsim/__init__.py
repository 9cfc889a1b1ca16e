"""Steady-state model of a three-phase Y-type bridge (YAB) AC-DC converter.

Compares the YAB against a per-phase AC-DC dual active bridge under
sinusoidal phase-shift modulation: link currents by harmonic division,
grid-level power, THD, current stress, ZVS, MOSFET losses and flux.
"""

from .params import ConfigError, ConverterParams, Topology, blocking_cap_bounds, validate
from .metrics import GridCycleResult, grid_cycle
from .harmonic import LinkImpedanceSpec, steady_state_current

__all__ = [
    "ConfigError", "ConverterParams", "Topology", "blocking_cap_bounds", "validate",
    "GridCycleResult", "grid_cycle", "LinkImpedanceSpec", "steady_state_current",
]
__version__ = "0.1.0"
