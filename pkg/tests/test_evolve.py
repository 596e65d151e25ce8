import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from iondirac.errors import InvalidParameter, NotHermitian, SpaceMismatch
from iondirac.evolve import (
    Schedule,
    SpectralPropagator,
    TimeSeries,
    evolve_state,
    krylov_evolve,
    norm_observable,
    run,
    spectral_propagator,
)
from iondirac.fockspace import Operator, StateVector, VibronicSpace, annihilation, expect, mode_op, projector
from iondirac.hamiltonian import ModelParams, PotentialProfile, dirac_1p1, dirac_2p1, klein_hamiltonian
from iondirac.states import WavepacketSpec, fock, momentum_wavepacket


def _random_pair(seed, space):
    rng = np.random.default_rng(seed)
    h = Operator(space, oracles.random_hermitian(rng, space.dim), hermitian=True)
    return h, StateVector(space, oracles.random_state(rng, space.dim))


def test_spectral_matches_expm():
    space = VibronicSpace(2, (9,))
    h, psi = _random_pair(1, space)
    got = SpectralPropagator(h).evolve(psi, 0.7).amplitudes
    assert np.allclose(got, oracles.propagate(h.dense(), psi.amplitudes, 0.7), atol=1e-12)
    u = spectral_propagator(h, 1.3, hbar=2.0).dense()
    assert np.allclose(u, oracles.propagate(h.dense(), np.eye(space.dim), 1.3, hbar=2.0), atol=1e-12)


def test_krylov_matches_dense_on_dirac():
    prm = ModelParams(eta=0.1, omega=0.5, n_max=(12,))
    h = dirac_2p1(prm)
    psi = momentum_wavepacket(h.space, WavepacketSpec(p0=0.5))
    dense = SpectralPropagator(h).evolve(psi, 9.0)
    kry = krylov_evolve(h, psi, 9.0)
    assert np.max(np.abs(dense.amplitudes - kry.amplitudes)) < 1e-8
    back = krylov_evolve(h, kry, -9.0)
    assert np.allclose(back.amplitudes, psi.amplitudes, atol=1e-8)


def test_krylov_small_space_and_zero_time():
    space = VibronicSpace(2, (1,))
    h, psi = _random_pair(5, space)
    out = krylov_evolve(h, psi, 2.0)
    assert np.allclose(out.amplitudes, oracles.propagate(h.dense(), psi.amplitudes, 2.0), atol=1e-10)
    assert np.array_equal(krylov_evolve(h, psi, 0.0).amplitudes, psi.amplitudes)


def test_rejects_non_hermitian():
    space = VibronicSpace.oscillator(4)
    psi = StateVector(space, np.eye(5)[0])
    with pytest.raises(NotHermitian):
        evolve_state(annihilation(4), psi, 1.0)


def test_norm_and_energy_over_many_steps():
    prm = ModelParams(eta=0.05, omega=0.5, n_max=(30,))
    h = dirac_1p1(prm)
    psi = momentum_wavepacket(h.space, WavepacketSpec(p0=0.3))
    e0 = expect(h, psi).real
    scale = np.linalg.norm(h.dense(), 2)
    state = psi
    for _ in range(1000):
        state = krylov_evolve(h, state, 0.05)
    assert abs(state.norm() - 1) < 1e-10
    assert abs(expect(h, state).real - e0) < 1e-9 * scale


def test_run_samples_and_boundaries():
    prm = ModelParams(eta=0.05, omega=0.5, n_max=(20,))
    base = dirac_1p1(prm)
    kicked = klein_hamiltonian(base, PotentialProfile("linear", 0.3), prm)
    sched = Schedule(((base, 2.0), (kicked, 3.0)))
    assert np.allclose(sched.boundaries, [0, 2, 5])
    psi = fock(base.space, 0)
    times = np.linspace(0, 5, 11)
    obs = {"x": mode_op(base.space, "x"), "P_a": projector(base.space, "a"), "norm": norm_observable}
    dense = run(sched, psi, times, obs, backend="dense")
    kry = run(sched, psi, times, obs, backend="krylov")
    ref = oracles.propagate(base.dense(), psi.amplitudes, 2.0)
    ref = oracles.propagate(kicked.dense(), ref, 3.0)
    assert dense["x"][-1] == pytest.approx(np.vdot(ref, mode_op(base.space, "x").dense() @ ref).real, abs=1e-10)
    assert np.allclose(dense["x"], kry["x"], atol=1e-8)
    assert np.allclose(dense["norm"], 1, atol=1e-12)
    assert dense.trusted() and dense.metadata["trusted"]


def test_run_validation():
    prm = ModelParams(n_max=(5,))
    h = dirac_1p1(prm)
    psi = fock(h.space, 0)
    with pytest.raises(InvalidParameter):
        run(Schedule.single(h, 1.0), psi, [0.0, 2.0])
    with pytest.raises(InvalidParameter):
        run(Schedule.single(h, 1.0), psi, [0.5, 0.2])
    with pytest.raises(InvalidParameter):
        Schedule(((h, 0.0),))
    with pytest.raises(SpaceMismatch):
        Schedule(((h, 1.0), (dirac_1p1(prm.with_(n_max=(6,))), 1.0)))
    with pytest.raises(InvalidParameter):
        evolve_state(h, psi, 1.0, backend="euler")


def test_leakage_flags_untrusted_run():
    space = VibronicSpace(2, (12,))
    h = Operator(space, mode_op(space, "n").dense(), hermitian=True)
    psi = fock(space, 11)
    series = run(Schedule.single(h, 1.0), psi, [0.0, 1.0], backend="dense")
    assert series.max_leakage > 1e-6
    assert not series.metadata["trusted"]


def test_timeseries_validation():
    with pytest.raises(InvalidParameter):
        TimeSeries(np.array([0.0, 1.0]), {"x": np.zeros(3)}, np.zeros(2))


def test_hbar_scaling():
    space = VibronicSpace(2, (6,))
    h, psi = _random_pair(8, space)
    a = evolve_state(h, psi, 2.0, hbar=2.0).amplitudes
    b = evolve_state(h, psi, 1.0).amplitudes
    assert np.allclose(a, b, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(3,), (6,), (2, 3)]), st.floats(-4.0, 4.0))
def test_krylov_agrees_with_dense(seed, truncs, t):
    space = VibronicSpace(2, truncs)
    h, psi = _random_pair(seed, space)
    dense = SpectralPropagator(h).evolve(psi, t).amplitudes
    kry = krylov_evolve(h, psi, t, krylov_dim=8).amplitudes
    assert np.max(np.abs(dense - kry)) < 1e-8


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_propagator_group_law(seed, t1, t2):
    space = VibronicSpace(2, (4,))
    h, psi = _random_pair(seed, space)
    prop = SpectralPropagator(h)
    assert np.allclose(prop.evolve(prop.evolve(psi, t1), t2).amplitudes, prop.evolve(psi, t1 + t2).amplitudes)
