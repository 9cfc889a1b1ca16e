"""Exact time-domain reference for the link current.

The sampled voltage is held constant over each sample interval and the R-L
branch is integrated in closed form, cycle after cycle, until the response is
periodic.  Nothing here touches an FFT, so it can referee the harmonic solver.

Two time alignments are offered.  ``"center"`` holds sample n over
[(n - 1/2) dt, (n + 1/2) dt) and reports the current at t = n dt, which is how
a DFT places its samples.  ``"boundary"`` holds sample n over
[n dt, (n + 1) dt) and reports the current at the interval starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

DECADES = 12  # periodicity target: residual transient below 1e-12


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleResult:
    i: np.ndarray
    cycles_to_converge: int
    converged: bool
    rel_rms_err: float | None = None
    max_abs_err_over_peak: float | None = None


def decay_cycles(L: float, R: float, T_sw: float) -> int:
    """Cycles needed for the homogeneous solution to shrink by 10**-DECADES."""
    return math.ceil(DECADES * math.log(10.0) * L / (R * T_sw))


def simulate_zoh(v_L, L: float, R: float, T_sw: float, max_cycles: int = 1_000_000,
                 align: str = "center") -> OracleResult:
    """Periodic current sampled once per hold interval.

    :param v_L: one period of inductor voltage, held over each sample interval
    :param L: inductance in H
    :param R: series resistance in ohm (0 allowed)
    :param T_sw: period in s
    :param max_cycles: give up after this many periods
    :param align: ``"center"`` or ``"boundary"`` (see module docstring)
    """
    v = np.asarray(v_L, dtype=float)
    if not L > 0 or not R >= 0:
        raise ValueError("need L > 0 and R >= 0")
    if align not in ("center", "boundary"):
        raise ValueError(f"unknown align {align!r}")
    N = v.size
    dt = T_sw / N
    if R == 0:
        scale = np.sum(np.abs(v)) or 1.0
        if abs(v.sum()) > 1e-9 * scale:
            raise OracleError("R = 0 with non-zero-mean voltage has no periodic solution")
        # one period already returns to its start value; only the offset is free
        i = np.concatenate(([0.0], np.cumsum(v[:-1]) * dt / L))
        if align == "center":
            i = i + v * dt / (2.0 * L)
        # piecewise-linear current: the sample mean equals the time average
        return OracleResult(i=i - i.mean(), cycles_to_converge=1, converged=True)

    a = math.exp(-R * dt / L)
    drive = v / R * (1.0 - a)
    # forced response over one period from zero state: i[n+1] = a*i[n] + drive[n]
    forced = lfilter([1.0], [1.0, -a], drive)
    end_forced = forced[-1]
    a_N = a ** N

    needed = decay_cycles(L, R, T_sw)
    if needed > max_cycles:
        raise OracleError(f"needs {needed} cycles to settle, max_cycles={max_cycles}")
    i0 = 0.0
    change = math.inf
    for _ in range(needed):
        nxt = a_N * i0 + end_forced
        change = abs(nxt - i0)
        i0 = nxt
    # boundary samples of the final period
    n = np.arange(N)
    i = np.concatenate(([0.0], forced[:-1])) + i0 * a ** n
    if align == "center":
        half = math.exp(-R * dt / (2.0 * L))
        i = i * half + v / R * (1.0 - half)
    peak = float(np.max(np.abs(i))) or 1.0
    return OracleResult(i=i, cycles_to_converge=needed,
                        converged=bool(change < 1e-12 * peak))


def compare(i_fft, i_oracle) -> tuple[float, float]:
    """(relative RMS error, max abs error / oracle peak) of ``i_fft`` against the oracle."""
    i_fft = np.asarray(i_fft, dtype=float)
    i_oracle = np.asarray(i_oracle, dtype=float)
    if i_fft.shape != i_oracle.shape:
        raise ValueError("current sequences differ in length")
    ref_rms = math.sqrt(float(np.mean(i_oracle ** 2)))
    peak = float(np.max(np.abs(i_oracle)))
    if ref_rms == 0.0 or peak == 0.0:
        raise ValueError("oracle current is identically zero")
    diff = i_fft - i_oracle
    return math.sqrt(float(np.mean(diff ** 2))) / ref_rms, float(np.max(np.abs(diff))) / peak


def check(i_fft, v_L, L: float, R: float, T_sw: float, align: str = "center") -> OracleResult:
    res = simulate_zoh(v_L, L, R, T_sw, align=align)
    rel, worst = compare(i_fft, res.i)
    return OracleResult(i=res.i, cycles_to_converge=res.cycles_to_converge,
                        converged=res.converged, rel_rms_err=rel, max_abs_err_over_peak=worst)
