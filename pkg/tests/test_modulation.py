import numpy as np
import pytest
from hypothesis import given, strategies as st

from yabsim import modulation as mod

T = 10e-6
V_HAT = np.sqrt(2) * 277


def test_grid_voltages_at_zero():
    v = mod.grid_voltages(0.0, 391.7)
    np.testing.assert_allclose(v, (391.7, -195.85, -195.85), rtol=1e-12)


def test_grid_voltage_zero_crossing():
    assert abs(mod.grid_voltages(90.0, 391.7)[0]) < 1e-12


@given(st.floats(-720, 720))
def test_grid_voltages_sum_to_zero(theta):
    assert abs(sum(mod.grid_voltages(theta, V_HAT))) < 1e-9


def test_duty_cycle_examples():
    assert mod.duty_cycles([391.7], 200.0, T)[0] == pytest.approx(4.896e-6, rel=1e-3)
    assert mod.duty_cycles([0.0], 200.0, T)[0] == 0.0
    with pytest.raises(mod.OverModulationError):
        mod.duty_cycles([391.7], 150.0, T)


@given(st.floats(0, 360), st.floats(196, 1000))
def test_duty_invariants(theta, v_dc):
    d = mod.duty_cycles(mod.grid_voltages(theta, V_HAT), v_dc, T)
    assert abs(sum(d)) <= 1e-12 * T
    assert all(abs(x) <= T / 2 for x in d)


def test_gate_reference_examples():
    assert mod.gate_reference(8).tolist() == [1, 1, 1, 1, 0, 0, 0, 0]
    assert mod.gate_reference(2).tolist() == [1, 0]
    with pytest.raises(ValueError):
        mod.gate_reference(7)


def test_shifted_gate_examples():
    g = mod.gate_reference(8)
    assert mod.shifted_gate(g, 0.0, T).tolist() == g.tolist()
    assert mod.shifted_gate(g, T / 2, T).tolist() == (1 - g).tolist()
    assert mod.shifted_gate(g, T / 4, T).tolist() == [0, 0, 1, 1, 1, 1, 0, 0]


def test_sample_shift_rounds_to_nearest():
    assert mod.sample_shift(2.4 / 8 * T, T, 8) == 2
    assert mod.sample_shift(2.6 / 8 * T, T, 8) == 3
    assert mod.sample_shift(-1.0 / 8 * T, T, 8) == 7


@given(st.integers(1, 256), st.integers(-600, 600), st.integers(-600, 600))
def test_shift_composition_and_popcount(half, a, b):
    n = 2 * half
    g = mod.gate_reference(n)
    ga = mod.shifted_gate(g, a * T / n, T)
    gab = mod.shifted_gate(ga, b * T / n, T)
    assert int(ga.sum()) == n // 2
    np.testing.assert_array_equal(gab, mod.shifted_gate(g, (a + b) * T / n, T))


@given(st.integers(0, 64), st.integers(1, 32))
def test_square_gates_match_roll(s, half):
    n = 2 * half
    np.testing.assert_array_equal(mod.square_gates(s, n), np.roll(mod.gate_reference(n), s))


def test_dc_gates_at_zero_crossing_cancel():
    pt = mod.modulation_point(90.0, 0.2 * T, V_HAT, 200.0, T)
    g1, g2 = mod.dc_gates(pt, 512)
    np.testing.assert_array_equal(g1, g2)


def test_dc_gates_full_width_window():
    pt = mod.ModulationPoint(theta=0.0, phi=0.0, d_x=T / 2, d_y=0.0, d_z=0.0, T_sw=T)
    g1, g2 = mod.dc_gates(pt, 64)
    pulse = g1.astype(int) - g2.astype(int)
    # full duty: the +1 window spans half the period, the rest is the -1 half
    assert np.count_nonzero(pulse == 1) == 32
    assert np.flatnonzero(pulse == 1).tolist() == list(range(np.argmax(pulse == 1), np.argmax(pulse == 1) + 32))


@given(st.floats(0, 360), st.integers(0, 100))
def test_dc_gates_shift_with_phi(theta, k):
    n = 256
    p0 = mod.modulation_point(theta, 0.0, V_HAT, 200.0, T)
    p1 = mod.modulation_point(theta, k * T / n, V_HAT, 200.0, T)
    for a, b in zip(mod.dc_gates(p0, n), mod.dc_gates(p1, n)):
        np.testing.assert_array_equal(np.roll(a, k), b)


@given(st.floats(0, 360), st.floats(0, 0.25))
def test_dc_gates_rotation_equivariant(theta, phi):
    n = 512
    py = mod.modulation_point(theta, phi * T, V_HAT, 200.0, T)
    px = mod.modulation_point(theta - 120.0, phi * T, V_HAT, 200.0, T)
    # the rotated duty agrees to float rounding; compare the rounded edge samples
    for ey, ex in zip(py.edges("y"), px.edges("x")):
        assert mod.sample_shift(ey, T, n) == mod.sample_shift(ex, T, n) or \
            abs((n * ey / T + 0.5) % 1) < 1e-6
    np.testing.assert_allclose(py.d_y, px.d_x, atol=1e-12 * T)


def test_phase_shift_schedule_examples():
    s = mod.phase_shift_schedule(0.0, (0.0, 0.0, 0.0), T)
    assert all(s[k] == pytest.approx(T / 4) for k in ("x1", "x2", "y1", "y2", "z1", "z2"))
    s = mod.phase_shift_schedule(0.2 * T, (0.9 * T / 2, 0.0, -0.9 * T / 2), T)
    assert s["x1"] == pytest.approx(0.225 * T) and s["x2"] == pytest.approx(0.675 * T)
    assert s["x2"] - s["x1"] == pytest.approx(0.9 * T / 2)


def test_schedule_matches_gate_edges():
    pt = mod.modulation_point(20.0, 0.13 * T, V_HAT, 230.0, T)
    s = mod.phase_shift_schedule(pt.phi, (pt.d_x, pt.d_y, pt.d_z), T)
    assert (s["x1"], s["x2"]) == pytest.approx(pt.edges("x"))
    g1, g2 = mod.dc_gates(pt, 1024)
    assert mod.rising_edges(g1) == mod.sample_shift(s["x1"], T, 1024)
    assert mod.rising_edges(g2) == mod.sample_shift(s["x2"], T, 1024)


def test_rising_edges_rejects_constant():
    with pytest.raises(ValueError):
        mod.rising_edges(np.zeros(8, dtype=np.int8))
