import numpy as np
import pytest
from hypothesis import given, strategies as st

from yabsim import modulation as mod
from yabsim.params import ConverterParams, Topology
from yabsim.waveforms import (ThreePhaseBridgeSet, ac_switch_voltage, bridge_voltage, dm_decompose,
                              inductor_voltage, primary_winding_voltage, switching_cycle, synthesize)

P = ConverterParams()
T = P.T_sw


def test_primary_winding_voltage_examples():
    g = mod.gate_reference(8)
    assert np.all(primary_winding_voltage(g, 0.0) == 0)
    # bipolar +-v_a/2: the blocking capacitor strips the v_a/2 offset of the half-bridge node
    np.testing.assert_allclose(primary_winding_voltage(g, 391.7), [195.85] * 4 + [-195.85] * 4)
    np.testing.assert_allclose(primary_winding_voltage(g, 2 * 391.7),
                               2 * primary_winding_voltage(g, 391.7))


def test_bridge_voltage_examples():
    g = mod.gate_reference(16)
    assert np.all(bridge_voltage(g, g, 200.0) == 0)
    pt = mod.ModulationPoint(0.0, 0.0, T / 2, 0.0, 0.0, T)
    v = bridge_voltage(*mod.dc_gates(pt, 16), 200.0)
    assert np.count_nonzero(v == 200.0) == 8
    neg = mod.ModulationPoint(0.0, 0.0, -T / 3, 0.0, 0.0, T)
    pos = mod.ModulationPoint(0.0, 0.0, T / 3, 0.0, 0.0, T)
    np.testing.assert_array_equal(bridge_voltage(*mod.dc_gates(neg, 48), 200.0),
                                  -bridge_voltage(*mod.dc_gates(pos, 48), 200.0))


def test_dm_decompose_trivial_cases():
    x = np.array([1.0, -2.0, 3.0])
    assert all(np.all(v == 0) for v in dm_decompose(ThreePhaseBridgeSet(x, x, x)))
    a, b = np.array([1.0, 2.0, -1.0]), np.array([-3.0, 0.5, 4.0])
    out = dm_decompose(ThreePhaseBridgeSet(a, b, -a - b))
    for got, want in zip(out, (a, b, -a - b)):
        np.testing.assert_allclose(got, want, atol=1e-15)
    with pytest.raises(ValueError):
        dm_decompose(ThreePhaseBridgeSet(a, b, np.zeros(4)))


def test_dm_cancellation_at_30_degrees():
    w = synthesize(P, [30.0], 0.2 * T)
    assert np.max(np.abs(w.v_dm[:, 0].sum(axis=0))) <= 1e-10
    assert set(np.unique(w.v_bridge)) <= {-200.0, 0.0, 200.0}


@given(st.floats(0, 360), st.floats(0, 0.5), st.floats(200, 400))
def test_cm_cancellation_and_cm_difference(theta, phi, v_dc):
    p = P.replace(v_dc=v_dc)
    yab = synthesize(p, [theta], phi * T, Topology.YAB)
    dab = synthesize(p, [theta], phi * T, Topology.ACDC_DAB)
    assert np.max(np.abs(yab.v_dm.sum(axis=0))) <= 1e-10
    np.testing.assert_allclose(yab.v_L - dab.v_L, np.broadcast_to(yab.v_cm_dc, yab.v_L.shape),
                               atol=1e-10)


def test_inductor_voltage_examples():
    v = np.linspace(-1, 1, 8)
    assert np.all(inductor_voltage(v, v) == 0)
    cyc = switching_cycle(P, 90.0, 0.2 * T, Topology.YAB)
    assert np.max(np.abs(cyc.v_AN)) < 1e-12  # cos(90 deg) in floating point
    np.testing.assert_allclose(cyc.v_L, -cyc.v_XN, atol=1e-12)
    with pytest.raises(ValueError):
        inductor_voltage(v, v, "buck")


@given(st.floats(0, 360), st.floats(0, 0.25))
def test_phase_b_is_phase_a_rotated(theta, phi):
    w = synthesize(P, [theta, theta - 120.0], phi * T)
    np.testing.assert_allclose(w.v_AN[1, 0], w.v_AN[0, 1], atol=1e-9)
    # pulse edges can round differently when a duty lands on a half-sample tie
    mismatch = np.count_nonzero(np.abs(w.v_L[1, 0] - w.v_L[0, 1]) > 1e-9)
    assert mismatch <= 4


def test_ac_switch_voltage_examples():
    assert ac_switch_voltage(180.0, 277.0, 200.0) == 0.0
    assert ac_switch_voltage(30.0, 277.0, 200.0) == pytest.approx(np.sqrt(6) * 277 / 200, rel=1e-12)
    assert ac_switch_voltage(30.0, 277.0, 200.0) == pytest.approx(3.392, abs=1e-3)
    assert ac_switch_voltage(30.0, 277.0, 200.0, mode="volts") == pytest.approx(678.5, abs=0.1)
    with pytest.raises(ValueError):
        ac_switch_voltage(30.0, 277.0, 200.0, mode="amps")


@given(st.floats(120.0, 240.0, exclude_min=True, exclude_max=True))
def test_ac_switch_voltage_clamped(theta):
    assert ac_switch_voltage(theta, 277.0, 200.0) == 0.0


def test_ac_switch_voltage_continuous_at_interval_ends():
    for edge in (120.0, 240.0):
        for side in (-1e-9, 1e-9):
            assert abs(ac_switch_voltage(edge + side, 277.0, 200.0)) < 1e-9
    assert ac_switch_voltage(120.0, 277.0, 200.0) == 0.0
    assert ac_switch_voltage(240.0, 277.0, 200.0) == 0.0
