"""Periodic steady-state link current by division in the frequency domain."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class LinkImpedanceSpec:
    L: float
    R: float
    f_sw: float
    N_sw: int

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if not self.R >= 0:
            raise ValueError("R must be non-negative")


@lru_cache(maxsize=64)
def _admittance(L: float, R: float, f_sw: float, N_sw: int) -> np.ndarray:
    # one-sided bins 0..N/2 of a real signal; bin k sits at k*f_sw
    k = np.arange(N_sw // 2 + 1)
    z = R + 2j * np.pi * k * f_sw * L
    y = np.zeros_like(z)
    y[1:] = 1.0 / z[1:]
    if N_sw % 2 == 0:
        # the Nyquist bin is its own mirror image; averaging the +/- bin
        # responses keeps the current real and shift-equivariant
        y[-1] = y[-1].real
    y.flags.writeable = False
    return y


def admittance(spec: LinkImpedanceSpec) -> np.ndarray:
    return _admittance(float(spec.L), float(spec.R), float(spec.f_sw), int(spec.N_sw))


def steady_state_current(v_L, spec: LinkImpedanceSpec) -> np.ndarray:
    """Steady-state inductor current for one period of the sampled voltage ``v_L``.

    Works along the last axis, so a stack of periods can be solved at once.
    The DC bin is dropped: the series blocking capacitor carries no DC.
    """
    v = np.asarray(v_L, dtype=float)
    if v.shape[-1] != spec.N_sw:
        raise ValueError(f"expected {spec.N_sw} samples, got {v.shape[-1]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("inductor voltage contains non-finite samples")
    v = v - v.mean(axis=-1, keepdims=True)
    spectrum = np.fft.rfft(v, axis=-1) * admittance(spec)
    return np.fft.irfft(spectrum, n=spec.N_sw, axis=-1)


def spectral_rms(i) -> np.ndarray:
    """RMS along the last axis computed from FFT bin magnitudes (Parseval)."""
    i = np.asarray(i, dtype=float)
    n = i.shape[-1]
    return np.sqrt(np.sum(np.abs(np.fft.fft(i, axis=-1)) ** 2, axis=-1)) / n
