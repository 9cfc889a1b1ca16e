import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from yabsim.harmonic import LinkImpedanceSpec, spectral_rms, steady_state_current
from yabsim.oracle import simulate_zoh

L, F = 19.3e-6, 100e3
T = 1 / F


def spec(n=512, R=0.0):
    return LinkImpedanceSpec(L, R, F, n)


def test_zero_voltage_gives_zero_current():
    assert np.all(steady_state_current(np.zeros(64), spec(64)) == 0)


def test_single_harmonic_closed_form():
    n = 256
    t = np.arange(n) * T / n
    v = 100.0 * np.cos(2 * np.pi * F * t)
    want = 100.0 / (2 * np.pi * F * L) * np.sin(2 * np.pi * F * t)
    np.testing.assert_allclose(steady_state_current(v, spec(n)), want, atol=1e-10)


def test_square_wave_triangle_against_oracle():
    n = 2048
    v = np.where(np.arange(n) < n // 2, 100.0, -100.0)
    i = steady_state_current(v, spec(n))
    ref = simulate_zoh(v, L, 0.0, T).i
    assert np.sqrt(np.mean((i - ref) ** 2) / np.mean(ref ** 2)) < 5e-3
    # continuous-time triangle about a zero mean: peak V*T/(4L)
    assert np.max(i) == pytest.approx(100.0 * T / (4 * L), rel=0.01)
    assert np.ptp(i) == pytest.approx(100.0 * T / (2 * L), rel=0.01)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        steady_state_current(np.zeros(10), spec(12))
    with pytest.raises(ValueError):
        steady_state_current(np.full(8, np.nan), spec(8))
    with pytest.raises(ValueError):
        LinkImpedanceSpec(0.0, 0.0, F, 8)
    with pytest.raises(ValueError):
        LinkImpedanceSpec(L, -1.0, F, 8)


volts = arrays(np.float64, 64, elements=st.floats(-500, 500))


@given(volts, st.sampled_from([0.0, 24.8e-3, 1.0]))
def test_zero_mean_and_real(v, R):
    i = steady_state_current(v, spec(64, R))
    peak = np.max(np.abs(i))
    assert abs(i.mean()) <= 1e-12 * max(peak, 1e-300) + 1e-300
    assert np.isrealobj(i)
    # complex inverse of the full spectrum has no imaginary residue
    full = np.fft.ifft(np.fft.fft(i))
    assert np.max(np.abs(full.imag)) <= 1e-10 * max(peak, 1e-300) + 1e-300


@given(volts, volts, st.floats(-3, 3), st.integers(0, 63), st.sampled_from([0.0, 24.8e-3]))
def test_linear_and_shift_equivariant(v1, v2, a, m, R):
    s = spec(64, R)
    i1, i2 = steady_state_current(v1, s), steady_state_current(v2, s)
    scale = 1 + np.max(np.abs(i1)) + np.max(np.abs(i2))
    np.testing.assert_allclose(steady_state_current(a * v1 + v2, s), a * i1 + i2,
                               atol=1e-9 * scale * (1 + abs(a)))
    np.testing.assert_allclose(steady_state_current(np.roll(v1, m), s), np.roll(i1, m),
                               atol=1e-9 * scale)


@given(volts)
def test_parseval(v):
    i = steady_state_current(v, spec(64))
    rms = np.sqrt(np.mean(i ** 2))
    assert spectral_rms(i) == pytest.approx(rms, rel=1e-10, abs=1e-300)


def test_batched_matches_single():
    rng = np.random.default_rng(3)
    v = rng.normal(size=(3, 5, 128))
    s = spec(128, 24.8e-3)
    i = steady_state_current(v, s)
    np.testing.assert_allclose(i[2, 4], steady_state_current(v[2, 4], s), atol=1e-14)
