"""Sin-PS modulation: grid voltages, DC-side pulse widths and gate arrays.

Gate arrays are numpy int8 vectors of length ``N_sw`` holding 0/1. Index 0 is
the first sample of the switching period (the AC-side rising edge). All
shifts are applied as circular rolls of the 50 % reference, rounded to the
nearest sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PHASE_OFFSETS_DEG = {"a": 0.0, "b": 120.0, "c": -120.0}
DC_LEGS = {"a": "x", "b": "y", "c": "z"}


class OverModulationError(ValueError):
    pass


def grid_voltages(theta, v_g_peak: float):
    """Three-phase grid voltages at grid angle ``theta`` (degrees).

    Phase b lags by 120 degrees, so ``v_b(theta) == v_a(theta - 120)``.
    """
    theta = np.asarray(theta, dtype=float)
    v_a = v_g_peak * np.cos(np.radians(theta))
    v_b = v_g_peak * np.cos(np.radians(theta - 120.0))
    v_c = v_g_peak * np.cos(np.radians(theta + 120.0))
    return v_a, v_b, v_c


def duty_cycles(v_abc, v_dc: float, T_sw: float):
    """Signed DC-side pulse widths in seconds, one per phase voltage."""
    if not v_dc > 0:
        raise ValueError("v_dc must be positive")
    out = []
    for v in v_abc:
        v = np.asarray(v, dtype=float)
        if np.any(np.abs(v) > 2.0 * v_dc * (1 + 1e-12)):
            raise OverModulationError(
                f"over-modulation: |v| = {np.max(np.abs(v)):.4g} V exceeds 2*v_dc = {2 * v_dc:.4g} V")
        out.append(v / (2.0 * v_dc) * T_sw / 2.0)
    return tuple(out)


def gate_reference(N_sw: int) -> np.ndarray:
    if N_sw < 2 or N_sw % 2:
        raise ValueError(f"N_sw must be even, got {N_sw}")
    g = np.zeros(N_sw, dtype=np.int8)
    g[: N_sw // 2] = 1
    return g


def sample_shift(tau, T_sw: float, N_sw: int):
    """Circular shift in samples for a delay ``tau``, rounded to nearest, in [0, N_sw)."""
    s = np.floor(N_sw * np.asarray(tau, dtype=float) / T_sw + 0.5).astype(np.int64)
    return np.mod(s, N_sw)


def shifted_gate(g_ref: np.ndarray, tau: float, T_sw: float) -> np.ndarray:
    return np.roll(g_ref, int(sample_shift(tau, T_sw, len(g_ref))))


def square_gates(shifts, N_sw: int) -> np.ndarray:
    """50 % gates rolled by integer ``shifts`` (any shape); sample axis appended last.

    Equivalent to ``np.roll(gate_reference(N_sw), s)`` for every ``s``.
    """
    shifts = np.asarray(shifts, dtype=np.int64)[..., None]
    n = np.arange(N_sw)
    return (np.mod(n - shifts, N_sw) < N_sw // 2).astype(np.int8)


@dataclass(frozen=True)
class ModulationPoint:
    theta: float
    phi: float
    d_x: float
    d_y: float
    d_z: float
    T_sw: float

    def duty(self, leg: str) -> float:
        return {"x": self.d_x, "y": self.d_y, "z": self.d_z}[leg]

    def edges(self, leg: str = "x") -> tuple[float, float]:
        """Rising-edge delays (tau_1, tau_2) of the two half-bridges of ``leg``."""
        d = self.duty(leg)
        centre = self.T_sw / 4.0 + self.phi
        return centre - d / 2.0, centre + d / 2.0

    @property
    def tau_1(self) -> float:
        return self.edges("x")[0]

    @property
    def tau_2(self) -> float:
        return self.edges("x")[1]


def modulation_point(theta: float, phi: float, v_g_peak: float, v_dc: float,
                     T_sw: float) -> ModulationPoint:
    d_x, d_y, d_z = duty_cycles(grid_voltages(theta, v_g_peak), v_dc, T_sw)
    return ModulationPoint(theta=float(theta), phi=float(phi), d_x=float(d_x),
                           d_y=float(d_y), d_z=float(d_z), T_sw=T_sw)


def dc_gates(point: ModulationPoint, N_sw: int, leg: str = "x"):
    """Gate arrays of the two DC-side half-bridges of ``leg`` (top switches)."""
    ref = gate_reference(N_sw)
    tau_1, tau_2 = point.edges(leg)
    return shifted_gate(ref, tau_1, point.T_sw), shifted_gate(ref, tau_2, point.T_sw)


def phase_shift_schedule(phi: float, d, T_sw: float) -> dict[str, float]:
    """Gate phase shifts in seconds for all nine half-bridges.

    ``d`` holds the signed pulse widths (d_x, d_y, d_z) in seconds.
    """
    out = {"a": 0.0, "b": 0.0, "c": 0.0}
    for leg, d_p in zip("xyz", d):
        duty = d_p / (T_sw / 2.0)
        out[f"{leg}1"] = phi + (1.0 - duty) / 4.0 * T_sw
        out[f"{leg}2"] = phi + (1.0 + duty) / 4.0 * T_sw
    return out


def rising_edges(gates: np.ndarray) -> np.ndarray:
    """Index of the (single) rising edge along the last axis of ``gates``.

    Raises ValueError if any waveform is constant.
    """
    g = np.asarray(gates)
    rise = (g == 1) & (np.roll(g, 1, axis=-1) == 0)
    if not np.all(rise.any(axis=-1)):
        raise ValueError("gate waveform has no rising edge")
    return np.argmax(rise, axis=-1)
