"""Grid-period sweep and the quantities derived from it.

One call to :func:`grid_cycle` samples the grid period on the half-degree
offset grid, solves the link current of every phase at every angle, and
fills power, grid current and THD, current stress, turn-on currents and
soft-switching class, device losses and inductor flux.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import modulation as mod
from .harmonic import LinkImpedanceSpec, steady_state_current
from .lossmap import LossMap
from .params import ConverterParams, Topology, check
from .waveforms import ac_switch_voltage, synthesize

FULL_ZVS = "full_zvs"
PARTIAL_ZVS = "partial_zvs"
HARD = "hard"
CLAMPED = "clamped"
ZVS_CLASSES = (FULL_ZVS, PARTIAL_ZVS, HARD, CLAMPED)


def theta_grid(n_theta: int = 360) -> np.ndarray:
    """Sample-centre grid angles in degrees: 0.5, 1.5, ..., 359.5 for n_theta=360."""
    return (np.arange(n_theta) + 0.5) * (360.0 / n_theta)


def phase_power(v_AN, i_t):
    """Switching-period average of v_AN * i_t along the last axis."""
    v_AN = np.asarray(v_AN, dtype=float)
    i_t = np.asarray(i_t, dtype=float)
    if v_AN.shape[-1] != i_t.shape[-1]:
        raise ValueError("voltage and current sequences differ in length")
    return np.mean(v_AN * i_t, axis=-1)


def harmonic_magnitudes(x) -> np.ndarray:
    """Amplitudes of harmonics 0..n/2 of one period of ``x``."""
    x = np.asarray(x, dtype=float)
    mag = np.abs(np.fft.rfft(x)) * 2.0 / len(x)
    mag[0] /= 2.0
    return mag


def thd(x, n_harmonics: int = 50) -> float:
    mags = harmonic_magnitudes(x)
    if n_harmonics >= len(mags):
        raise ValueError(f"n_harmonics={n_harmonics} needs more than {2 * n_harmonics} samples")
    if mags[1] == 0:
        raise ValueError("fundamental is zero")
    return float(np.sqrt(np.sum(mags[2:n_harmonics + 1] ** 2)) / mags[1])


def grid_current_and_thd(p_a, v_a, n_harmonics: int = 50):
    """Grid current p_a / v_a per angle and its THD over harmonics 2..n_harmonics."""
    p_a = np.asarray(p_a, dtype=float)
    v_a = np.asarray(v_a, dtype=float)
    peak = np.max(np.abs(v_a))
    if np.any(np.abs(v_a) < 1e-6 * peak):
        raise ValueError("grid voltage vanishes at a sample; use the offset angle grid")
    i_a = p_a / v_a
    return i_a, thd(i_a, n_harmonics)


def current_stress(currents) -> float:
    """RMS over all samples of all switching periods."""
    c = np.asarray(currents, dtype=float)
    return float(np.sqrt(np.mean(c ** 2))) if c.size else 0.0


def turn_on_currents(i_t, g_a, g_x1, g_x2):
    """Device currents at the rising edges of the three phase-a gates.

    Negative values mean the body diode is conducting at turn-on.  Works on a
    single period or on stacks shaped ``(..., N_sw)``.
    """
    i_t = np.asarray(i_t, dtype=float)

    def at(edge):
        return np.take_along_axis(i_t, np.asarray(edge)[..., None], axis=-1)[..., 0]

    e_a = np.broadcast_to(mod.rising_edges(g_a), i_t.shape[:-1])
    return at(e_a), -at(mod.rising_edges(g_x1)), at(mod.rising_edges(g_x2))


def zvs_threshold(v_sw, L_t: float, C_oss: float):
    """Current magnitude that fully commutates both output capacitances."""
    return np.asarray(v_sw, dtype=float) * math.sqrt(2.0 * C_oss / L_t)


def zvs_classify(i_sw, v_sw, L_t: float, C_oss: float):
    i_sw = np.asarray(i_sw, dtype=float)
    v_sw = np.asarray(v_sw, dtype=float)
    i_sw, v_sw = np.broadcast_arrays(i_sw, v_sw)
    cls = np.where(-i_sw > zvs_threshold(v_sw, L_t, C_oss), FULL_ZVS, PARTIAL_ZVS)
    cls = np.where(i_sw >= 0, HARD, cls)
    cls = np.where(v_sw == 0, CLAMPED, cls)
    return cls if cls.ndim else str(cls)


def switching_loss(v_sw, i_sw, cls, loss_map: LossMap, f_sw: float, return_clamped: bool = False):
    """Half-bridge switching loss f_sw * E_sw(v_sw, i_sw); clamped angles lose nothing.

    ``cls`` may be None, in which case clamping is read from ``v_sw == 0``.
    """
    v_sw = np.asarray(v_sw, dtype=float)
    i_sw = np.asarray(i_sw, dtype=float)
    v_sw, i_sw = np.broadcast_arrays(v_sw, i_sw)
    clamped = (v_sw == 0) if cls is None else (np.asarray(cls) == CLAMPED)
    energy, n_clamped = loss_map.lookup(v_sw, i_sw)
    p = np.where(clamped, 0.0, f_sw * np.asarray(energy))
    p = p if p.ndim else float(p)
    return (p, n_clamped) if return_clamped else p


def conduction_loss(i_t, R_ds_on: float):
    """Per-period conduction loss of one half-bridge: I_rms**2 * R_ds_on."""
    i_t = np.asarray(i_t, dtype=float)
    return np.mean(i_t ** 2, axis=-1) * R_ds_on


def peak_flux(v_L, N_l: float, A_c_l: float, f_sw: float) -> float:
    """Peak flux density of a core driven by one zero-mean period of v_L."""
    v_L = np.asarray(v_L, dtype=float)
    return float(np.sum(np.abs(v_L)) / (4.0 * N_l * v_L.size * f_sw * A_c_l))


def inductor_flux(v_L, N_l: float, A_c_l: float, f_sw: float, p_hat_a: float):
    """Returns ``(B_max [T], B_bar_max [T/W])``, the latter normalised by peak phase power."""
    if not p_hat_a > 0:
        raise ValueError(f"peak phase power must be positive, got {p_hat_a!r}")
    b_max = peak_flux(v_L, N_l, A_c_l, f_sw)
    return b_max, b_max / p_hat_a


def hft_startup_flux(v_g_peak: float, N_t: float, A_c_t: float, f_sw: float) -> float:
    """Transformer peak flux when the square winding voltage +-v_g_peak/2 acts alone."""
    return v_g_peak / (2.0 * N_t) / (4.0 * f_sw) / A_c_t


def hft_grid_flux(v_g_peak: float, N_t: float, A_c_t: float, f_g: float,
                  L_t: float, C_B: float) -> float:
    """Transformer peak flux from the grid-frequency voltage left by the blocking capacitor."""
    x_l = 2.0 * math.pi * f_g * L_t
    x_c = 1.0 / (2.0 * math.pi * f_g * C_B)
    return v_g_peak / (2.0 * N_t) * x_l / (x_l + x_c) / (4.0 * f_g) / A_c_t


@dataclass
class GridCycleResult:
    params: ConverterParams
    topology: Topology
    phi: float
    theta_grid: np.ndarray
    v_a: np.ndarray
    p_a: np.ndarray
    p_b: np.ndarray
    p_c: np.ndarray
    i_a: np.ndarray
    thd: float
    I_t_rms: float
    i_sw_a: np.ndarray
    i_sw_x1: np.ndarray
    i_sw_x2: np.ndarray
    v_sw_a: np.ndarray
    v_sw_x: float
    B_max: float
    B_bar_max: float
    p_hat_a: float
    i_t: np.ndarray = field(repr=False)
    v_AN: np.ndarray = field(repr=False)
    v_L: np.ndarray = field(repr=False)
    zvs_a: np.ndarray | None = None
    zvs_x1: np.ndarray | None = None
    zvs_x2: np.ndarray | None = None
    p_sw: dict[str, np.ndarray] | None = None
    p_cond: dict[str, np.ndarray] | None = None
    loss_map_label: str = ""
    n_clamped_lookups: int = 0

    @property
    def p_total(self) -> np.ndarray:
        return self.p_a + self.p_b + self.p_c

    @property
    def P_avg(self) -> float:
        return float(np.mean(self.p_total))

    @property
    def phi_frac(self) -> float:
        return self.phi / self.params.T_sw


def grid_cycle(params: ConverterParams, phi: float, *, topology: Topology | str | None = None,
               loss_map: LossMap | None = None, n_harmonics: int = 50) -> GridCycleResult:
    """Evaluate one grid period at main phase shift ``phi`` (seconds).

    Losses are filled only when the inputs they need are available: switching
    losses need ``loss_map``, conduction losses need ``params.R_ds_on`` and the
    full/partial ZVS split needs ``params.C_oss``.
    """
    check(params)
    topology = Topology(topology or params.topology)
    T = params.T_sw
    if not -0.5 * T <= phi <= 0.5 * T:
        raise ValueError(f"phi must lie in [-T_sw/2, T_sw/2], got {phi / T:g} T_sw")

    theta = theta_grid(params.n_theta)
    w = synthesize(params, theta, phi, topology)
    spec = LinkImpedanceSpec(params.L_t, params.R_series, params.f_sw, params.N_sw)
    i_t = steady_state_current(w.v_L, spec)                 # (3, M, N)
    p = phase_power(w.v_AN, i_t)                             # (3, M)
    v_a = w.v_phase[0]
    i_a, distortion = grid_current_and_thd(p[0], v_a, n_harmonics)

    g_x1, g_x2 = w.dc_gates(0)
    i_sw_a, i_sw_x1, i_sw_x2 = turn_on_currents(i_t[0], w.g_ac, g_x1, g_x2)
    v_sw_a = ac_switch_voltage(theta, params.v_g_rms, params.v_dc, mode="volts")

    k0 = int(np.argmin(np.abs(np.mod(theta + 180.0, 360.0) - 180.0)))
    p_hat = float(p[0, k0])
    b_max = peak_flux(w.v_L[0, k0], params.N_l, params.A_c_l, params.f_sw)
    b_bar = b_max / p_hat if p_hat > 0 else math.nan

    res = GridCycleResult(
        params=params, topology=topology, phi=phi, theta_grid=theta, v_a=v_a,
        p_a=p[0], p_b=p[1], p_c=p[2], i_a=i_a, thd=distortion,
        I_t_rms=current_stress(i_t[0]), i_sw_a=i_sw_a, i_sw_x1=i_sw_x1, i_sw_x2=i_sw_x2,
        v_sw_a=v_sw_a, v_sw_x=params.v_dc, B_max=b_max, B_bar_max=b_bar, p_hat_a=p_hat,
        i_t=i_t[0], v_AN=w.v_AN[0], v_L=w.v_L[0])

    if params.C_oss is not None:
        res.zvs_a = zvs_classify(i_sw_a, v_sw_a, params.L_t, params.C_oss)
        res.zvs_x1 = zvs_classify(i_sw_x1, params.v_dc, params.L_t, params.C_oss)
        res.zvs_x2 = zvs_classify(i_sw_x2, params.v_dc, params.L_t, params.C_oss)
    if loss_map is not None:
        p_a_sw, n1 = switching_loss(v_sw_a, i_sw_a, res.zvs_a, loss_map, params.f_sw, True)
        p_x1_sw, n2 = switching_loss(params.v_dc, i_sw_x1, res.zvs_x1, loss_map, params.f_sw, True)
        p_x2_sw, n3 = switching_loss(params.v_dc, i_sw_x2, res.zvs_x2, loss_map, params.f_sw, True)
        res.p_sw = {"a": p_a_sw, "x1": p_x1_sw, "x2": p_x2_sw}
        res.loss_map_label = loss_map.label
        res.n_clamped_lookups = n1 + n2 + n3
    if params.R_ds_on is not None:
        cond = conduction_loss(i_t[0], params.R_ds_on)
        res.p_cond = {"a": cond, "x1": cond, "x2": cond}
    return res


def aggregate_losses(result: GridCycleResult) -> tuple[float, float]:
    """Grid-period average switching and conduction loss of all nine half-bridges.

    Phase symmetry lets the phase-a records stand in for phases b and c.
    """
    if result.p_sw is None or result.p_cond is None:
        raise ValueError("result carries no loss data (need a loss map and R_ds_on)")
    p_sw = 3.0 * sum(float(np.mean(result.p_sw[k])) for k in ("a", "x1", "x2"))
    p_cond = 3.0 * sum(float(np.mean(result.p_cond[k])) for k in ("a", "x1", "x2"))
    return p_sw, p_cond
