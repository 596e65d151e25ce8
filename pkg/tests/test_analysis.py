import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.constants import atomic_mass
from scipy.linalg import expm

import oracles
from iondirac.analysis import (
    IonSpec,
    compare_nonrelativistic,
    electron_prediction,
    fit_signal,
    heisenberg_position_shift,
    klein_report,
    position_series,
    predict_zb,
    si_convert,
    wavepacket_position_shift,
    zb_amplitude,
    zb_frequency,
    zb_time_grid,
)
from iondirac.errors import InsufficientSampling, InvalidParameter
from iondirac.hamiltonian import ModelParams, PotentialProfile, dirac_1p1
from iondirac.states import WavepacketSpec, fock, internal_spinor, momentum_wavepacket


@pytest.mark.parametrize("p0", [0.0, 0.5, 1.0])
def test_closed_forms_match_hand_formulas(p0):
    prm = ModelParams(eta=0.05, omega=0.5)
    pred = predict_zb(prm, p0)
    assert pred.omega_zb == pytest.approx(oracles.zb_frequency(0.05, 0.5, p0))
    assert pred.r_zb == pytest.approx(oracles.zb_amplitude(0.05, 0.5, p0))
    assert zb_amplitude(prm.c, prm.rest_energy, p0) == pytest.approx(pred.r_zb)


def test_amplitude_equals_delta_at_balanced_coupling():
    prm = ModelParams(eta=0.05, omega=0.05, delta=0.7)
    assert predict_zb(prm, 0.0).r_zb == pytest.approx(0.7)


def test_massless_and_phonon_estimate():
    prm = ModelParams(eta=0.1, omega=0.0)
    pred = predict_zb(prm, 0.0)
    assert pred.r_zb == 0 and pred.omega_zb == 0 and pred.regime == "massless"
    assert predict_zb(ModelParams(eta=0.1, omega=0.5), 0.0, n_phonons=4).omega_zb_phonon == pytest.approx(
        2 * np.sqrt(4 * 0.01 + 0.25))


def test_electron_scale():
    pred = electron_prediction()
    assert 1e21 <= pred.omega_zb <= 2e21
    assert 1e-13 <= pred.r_zb <= 3e-13


def test_ion_scale_windows():
    prm = ModelParams(eta=0.05, omega=2 * np.pi * 50e3, omega_sb=2 * np.pi * 100e3)
    ion = IonSpec(mass=25 * atomic_mass, trap_frequency=2 * np.pi * 1e6)
    out = si_convert(prm, ion)
    assert out["frequency_in_window"] and out["amplitude_in_window"]
    assert out["f_zb_hz"] == pytest.approx(100e3)
    with pytest.raises(InvalidParameter):
        IonSpec(mass=-1.0, trap_frequency=1.0)


@pytest.mark.parametrize("mass", ["y", "z"])
def test_heisenberg_oracle_against_2x2_expm(mass):
    prm = ModelParams(eta=0.1, omega=0.4, mass_axis=mass)
    p = 0.6
    c = prm.c
    m = oracles.SY if mass == "y" else oracles.SZ
    h = c * p * oracles.SX + prm.rest_energy * m
    chi = np.array([0.6, 0.8j])
    ts = np.linspace(0, 12, 7)
    # velocity c sigma_x integrated numerically in the Heisenberg picture
    fine = np.linspace(0, 12, 24001)
    vel = [np.vdot(expm(-1j * h * t) @ chi, c * oracles.SX @ expm(-1j * h * t) @ chi).real for t in fine]
    integral = np.concatenate([[0], np.cumsum((np.array(vel[1:]) + vel[:-1]) / 2 * np.diff(fine))])
    assert np.allclose(heisenberg_position_shift(prm, p, ts, chi), integral[::4000], atol=1e-7)


def test_fit_recovers_synthetic_signal():
    t = np.linspace(0, 40, 801)
    y = 0.3 - 0.02 * t + 0.7 * np.cos(1.37 * t + 0.4)
    fit = fit_signal(t, y)
    assert fit.frequency == pytest.approx(1.37, rel=1e-9)
    assert fit.amplitude == pytest.approx(0.7, rel=1e-9)
    assert fit.slope == pytest.approx(-0.02, rel=1e-9)
    assert fit.converged and fit.oscillation_detected
    assert np.allclose(fit.model(t), y, atol=1e-9)


def test_fit_pure_line_reports_no_oscillation():
    t = np.linspace(0, 20, 401)
    fit = fit_signal(t, 1.0 + 0.5 * t)
    assert not fit.oscillation_detected
    assert fit.slope == pytest.approx(0.5, rel=1e-12)


def test_fit_refuses_undersampled_signal():
    t = np.linspace(0, 5, 200)
    with pytest.raises(InsufficientSampling):
        fit_signal(t, np.cos(2.0 * t))
    with pytest.raises(InsufficientSampling):
        fit_signal(t[:5], t[:5])


def test_zb_time_grid():
    grid = zb_time_grid(2.0)
    assert grid[-1] == pytest.approx(4.5 * np.pi)
    assert (grid.size - 1) / 4.5 == pytest.approx(64)


def test_wavepacket_oracle_reduces_to_sharp_momentum():
    prm = ModelParams(eta=0.05, omega=0.5, mass_axis="y")
    ts = np.linspace(0, 10, 5)
    narrow = wavepacket_position_shift(prm, WavepacketSpec(p0=0.3, sigma_p=1e-6), [1, 0], ts)
    assert np.allclose(narrow, heisenberg_position_shift(prm, 0.3, ts, [1, 0]), atol=1e-10)


def test_nonrelativistic_fidelity_and_scaling():
    ts = np.linspace(0, 10, 101)
    deficits = []
    for eta in (0.05, 0.025):
        prm = ModelParams(eta=eta, omega=1.0, n_max=(40,))
        psi = momentum_wavepacket(prm.space(), WavepacketSpec())
        fid = compare_nonrelativistic(prm, psi, ts)
        deficits.append(1 - fid.min())
    assert 1 - deficits[0] >= 0.99
    assert deficits[0] / deficits[1] == pytest.approx(4.0, rel=0.3)
    with pytest.raises(InvalidParameter):
        compare_nonrelativistic(ModelParams(omega=0.0), psi, ts)


def test_klein_uniform_and_linear():
    prm = ModelParams(eta=0.05, omega=0.5, n_max=(30,))
    psi = fock(prm.space(), 0)
    rep = klein_report(prm, PotentialProfile("uniform", 1.5), 2.0, 8.0, psi, n_samples=41)
    assert rep.population_invariant and rep.above_threshold
    assert rep.negative_weight_after == pytest.approx(rep.negative_weight_before, abs=1e-10)
    below = klein_report(prm, PotentialProfile("uniform", 0.5), 2.0, 8.0, psi, n_samples=41)
    assert not below.above_threshold
    massless = ModelParams(eta=0.1, omega=0.0, n_max=(60,))
    lin = klein_report(massless, PotentialProfile("linear", 0.05), 0.0, 20.0, fock(massless.space(), 0))
    assert lin.ehrenfest_max_rel_error < 1e-6
    with pytest.raises(InvalidParameter):
        klein_report(prm, PotentialProfile("uniform", 1.0), 5.0, 4.0, psi)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.3), st.floats(0.05, 2.0), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_closed_form_monotonicity(eta, omega, p_a, p_b):
    assume(p_a <= p_b)
    c = 2 * eta
    assert zb_frequency(c, omega, p_a) == pytest.approx(zb_frequency(c, omega, -p_a))
    assert zb_frequency(c, omega, p_a) <= zb_frequency(c, omega, p_b) * (1 + 1e-15)
    assert zb_amplitude(c, omega, p_a) >= zb_amplitude(c, omega, p_b) * (1 - 1e-15)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.05, 2.0), st.floats(-3.0, 3.0), st.floats(-0.5, 0.5))
def test_fit_recovers_random_sinusoids(omega, amp, phase, slope):
    t = np.linspace(0, 12 * np.pi / omega, 1201)
    fit = fit_signal(t, slope * t + amp * np.cos(omega * t + phase))
    assert fit.frequency == pytest.approx(omega, rel=1e-6)
    assert fit.amplitude == pytest.approx(amp, rel=1e-6)


@pytest.mark.parametrize("internal", ["a", "+y", "-x"])
@pytest.mark.parametrize("mass", ["y", "z"])
def test_momentum_space_oracle_matches_simulation(internal, mass):
    prm = ModelParams(eta=0.05, omega=0.5, n_max=(40,), mass_axis=mass)
    h = dirac_1p1(prm)
    spec = WavepacketSpec(p0=0.5, internal=internal)
    psi = momentum_wavepacket(h.space, spec)
    ts = np.linspace(0, 25, 101)
    x = position_series(h, psi, ts, prm)["x"]
    oracle = wavepacket_position_shift(prm, spec, internal_spinor(h.space, internal), ts)
    assert np.max(np.abs(x - x[0] - oracle)) < 1e-6
