"""Winding voltages for one switching period and the CM/DM split of the DC side."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import modulation as mod
from .params import ConverterParams, Topology


def primary_winding_voltage(g_a, v_a):
    """AC-side winding voltage: a 50 % square wave of amplitude ``v_a / 2``.

    The half-bridge node swings between 0 and ``v_a`` (differential part);
    the blocking capacitor removes the ``v_a / 2`` average.  ``v_a`` may be an
    array broadcasting against ``g_a``.
    """
    g = np.asarray(g_a, dtype=float)
    return np.asarray(v_a, dtype=float) / 2.0 * (2.0 * g - 1.0)


def bridge_voltage(g_x1, g_x2, v_dc: float):
    return v_dc * (np.asarray(g_x1, dtype=float) - np.asarray(g_x2, dtype=float))


@dataclass(frozen=True)
class ThreePhaseBridgeSet:
    v_Xx: np.ndarray
    v_Yy: np.ndarray
    v_Zz: np.ndarray

    @property
    def v_cm_dc(self) -> np.ndarray:
        return (self.v_Xx + self.v_Yy + self.v_Zz) / 3.0


def dm_decompose(bridges: ThreePhaseBridgeSet):
    """Differential-mode parts (v_XN, v_YN, v_ZN) of the three bridge voltages."""
    shapes = {np.shape(bridges.v_Xx), np.shape(bridges.v_Yy), np.shape(bridges.v_Zz)}
    if len(shapes) != 1:
        raise ValueError(f"bridge voltage length mismatch: {sorted(shapes)}")
    cm = bridges.v_cm_dc
    return bridges.v_Xx - cm, bridges.v_Yy - cm, bridges.v_Zz - cm


def inductor_voltage(v_AN, dc_side, topology: Topology | str = Topology.YAB):
    """Voltage across the link inductance.

    For the YAB ``dc_side`` must be the DM voltage v_XN; for the AC-DC DAB it
    is the full-bridge voltage v_Xx.
    """
    Topology(topology)  # rejects unknown names
    return np.asarray(v_AN, dtype=float) - np.asarray(dc_side, dtype=float)


def ac_switch_voltage(theta, v_g_rms: float, v_dc: float, mode: str = "normalized"):
    """Switching voltage of the AC half-bridge of phase a versus grid angle.

    ``mode="normalized"`` returns the value in units of ``v_dc``;
    ``mode="volts"`` returns volts and is what the loss map is indexed with.
    The phase is actively clamped (zero) for 120 < theta < 240.
    """
    theta = np.mod(np.asarray(theta, dtype=float), 360.0)
    rad = np.radians(theta)
    amp = np.sqrt(6.0) * v_g_rms
    if mode == "normalized":
        amp = amp / v_dc
    elif mode != "volts":
        raise ValueError(f"unknown mode {mode!r}")
    rising = amp * np.sin(2 * np.pi / 3 - rad)
    falling = amp * np.sin(2 * np.pi / 3 + rad)
    out = np.where(theta <= 120.0, rising, np.where(theta >= 240.0, falling, 0.0))
    # sin() lands a few ulps off zero at the interval ends
    out = np.where(np.abs(out) < 1e-12 * amp, 0.0, out)
    return out if out.ndim else float(out)


@dataclass
class SwitchingCycle:
    theta: float
    v_AN: np.ndarray
    v_Xx: np.ndarray
    v_XN: np.ndarray
    v_L: np.ndarray
    i_t: np.ndarray | None = None


@dataclass(frozen=True)
class PhaseWaveforms:
    """Batched waveforms over grid angles for all three phases.

    Arrays are shaped ``(3, n_angles, N_sw)`` with phase order a, b, c
    (DC legs x, y, z); ``shift1``/``shift2`` are the rising-edge sample
    indices of the two DC half-bridges, shaped ``(3, n_angles)``.
    """
    theta: np.ndarray
    v_phase: np.ndarray
    v_AN: np.ndarray
    v_bridge: np.ndarray
    v_cm_dc: np.ndarray
    v_dm: np.ndarray
    v_L: np.ndarray
    shift1: np.ndarray
    shift2: np.ndarray
    topology: Topology

    @property
    def g_ac(self) -> np.ndarray:
        return mod.gate_reference(self.v_AN.shape[-1])

    def dc_gates(self, phase: int = 0):
        N = self.v_AN.shape[-1]
        return (mod.square_gates(self.shift1[phase], N),
                mod.square_gates(self.shift2[phase], N))


def synthesize(params: ConverterParams, theta, phi: float,
               topology: Topology | str | None = None) -> PhaseWaveforms:
    """Build gate-derived voltages at every angle in ``theta`` for phase shift ``phi`` (s)."""
    topology = Topology(topology or params.topology)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    N, T = params.N_sw, params.T_sw
    v_phase = np.stack(mod.grid_voltages(theta, params.v_g_peak))        # (3, M)
    d = np.stack(mod.duty_cycles(v_phase, params.v_dc, T))              # (3, M)
    centre = T / 4.0 + phi
    shift1 = mod.sample_shift(centre - d / 2.0, T, N)
    shift2 = mod.sample_shift(centre + d / 2.0, T, N)
    v_bridge = bridge_voltage(mod.square_gates(shift1, N), mod.square_gates(shift2, N),
                              params.v_dc)                              # (3, M, N)
    v_cm = v_bridge.mean(axis=0)
    v_dm = v_bridge - v_cm
    v_AN = primary_winding_voltage(mod.gate_reference(N), v_phase[..., None])
    dc_side = v_dm if topology is Topology.YAB else v_bridge
    v_L = inductor_voltage(v_AN, dc_side, topology)
    return PhaseWaveforms(theta=theta, v_phase=v_phase, v_AN=v_AN, v_bridge=v_bridge,
                          v_cm_dc=v_cm, v_dm=v_dm, v_L=v_L, shift1=shift1,
                          shift2=shift2, topology=topology)


def switching_cycle(params: ConverterParams, theta: float, phi: float,
                    topology: Topology | str | None = None) -> SwitchingCycle:
    """Phase-a waveforms for a single grid angle (no current yet)."""
    w = synthesize(params, [theta], phi, topology)
    return SwitchingCycle(theta=float(theta), v_AN=w.v_AN[0, 0], v_Xx=w.v_bridge[0, 0],
                          v_XN=w.v_dm[0, 0], v_L=w.v_L[0, 0])
