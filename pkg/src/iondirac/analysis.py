"""Closed-form Zitterbewegung predictions and their numerical checks.

Trajectory fits use the model offset + slope*t + A*cos(omega*t + phase): the
drift is the classical free-particle motion, the cosine the quivering term.
A wavepacket superposes frequencies 2E(p)/hbar over its momentum support, so
fitted values agree with the single-momentum formulas to a few percent only.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import constants
from scipy.optimize import least_squares, minimize_scalar

from .errors import InsufficientSampling, InvalidParameter
from .evolve import Schedule, SpectralPropagator, TimeSeries, run
from .fockspace import StateVector, inner, mode_op, pauli, projector
from .hamiltonian import ModelParams, PotentialProfile, dirac_1p1, effective_squeeze, klein_hamiltonian
from .states import WavepacketSpec, energy_decompose

NOISE_FLOOR = 1e-12
ANGSTROM = 1e-10

# Feasibility window for an ion-trap experiment: frequency in Hz, amplitude in metres.
ION_FREQUENCY_LIMIT_HZ = 1e6
ION_AMPLITUDE_LIMIT_M = 1e3 * ANGSTROM


# -- closed forms -------------------------------------------------------------

def zb_frequency(c: float, rest_energy: float, p0: float, hbar: float = 1.0) -> float:
    """2 sqrt(c^2 p0^2 + (mc^2)^2) / hbar."""
    return 2.0 * np.hypot(c * p0, rest_energy) / hbar


def zb_amplitude(c: float, rest_energy: float, p0: float, hbar: float = 1.0) -> float:
    """(hbar / 2mc) (mc^2 / E)^2 = hbar c mc^2 / (2 E^2)."""
    energy_sq = (c * p0) ** 2 + rest_energy**2
    if energy_sq == 0:
        return 0.0
    return hbar * c * rest_energy / (2.0 * energy_sq)


@dataclass(frozen=True)
class ZBPrediction:
    omega_zb: float
    r_zb: float
    regime: str
    omega_zb_phonon: float | None = None


def regime(params: ModelParams, p0: float) -> str:
    if params.omega == 0:
        return "massless"
    p_scale = max(abs(p0), params.hbar / (2 * params.delta))
    ratio = params.c * p_scale / params.rest_energy
    if ratio <= 0.1:
        return "nonrelativistic"
    if ratio >= 10:
        return "relativistic"
    return "intermediate"


def predict_zb(params: ModelParams, p0: float, n_phonons: float | None = None) -> ZBPrediction:
    """Zitterbewegung frequency and amplitude of <x(t)> for a packet peaked at p0.

    With ``n_phonons`` also returns the phonon-number estimate
    2 sqrt(N eta^2 omega_sb^2 + omega^2).
    """
    omega_zb = zb_frequency(params.c, params.rest_energy, p0, params.hbar)
    r_zb = params.eta * params.hbar**2 * params.omega_sb * params.omega * params.delta / (
        4 * params.eta**2 * params.omega_sb**2 * params.delta**2 * p0**2 + params.hbar**2 * params.omega**2
    ) if (params.omega > 0 or p0 != 0) else 0.0
    phonon = None
    if n_phonons is not None:
        phonon = 2.0 * np.sqrt(n_phonons * params.eta**2 * params.omega_sb**2 + params.omega**2)
    return ZBPrediction(omega_zb, r_zb, regime(params, p0), phonon)


def electron_prediction(p0: float = 0.0) -> ZBPrediction:
    """SI values for a free electron (rad/s, metres)."""
    rest = constants.m_e * constants.c**2
    return ZBPrediction(
        zb_frequency(constants.c, rest, p0, constants.hbar),
        zb_amplitude(constants.c, rest, p0, constants.hbar),
        "electron",
    )


def heisenberg_position_shift(params: ModelParams, p: float, t, spinor) -> np.ndarray:
    """<chi| x(t) - x(0) |chi> at sharp momentum p for the 1+1 Hamiltonian.

    Evaluates c^2 p H^-1 t + (i hbar c / 2)(sigma_x - c p H^-1) H^-1 (e^{-2iHt/hbar} - 1)
    with the 2x2 Hamiltonian H(p) = c p sigma_x + mc^2 sigma_mass.
    """
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    smass = np.diag([1.0 + 0j, -1.0]) if params.mass_axis == "z" else np.array([[0, -1j], [1j, 0]])
    c, hbar = params.c, params.hbar
    h = c * p * sx + params.rest_energy * smass
    energy = np.hypot(c * p, params.rest_energy)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    chi = np.asarray(spinor, dtype=complex)
    chi = chi / np.linalg.norm(chi)
    if energy == 0:
        # massless at p = 0: x(t) = x(0) + c sigma_x t
        return (c * np.vdot(chi, sx @ chi) * t).real
    h_inv = h / energy**2
    drift = np.vdot(chi, c**2 * p * h_inv @ chi)
    left = (1j * hbar * c / 2) * (sx - c * p * h_inv) @ h_inv
    out = np.empty(t.shape)
    eye = np.eye(2)
    for k, tk in enumerate(t):
        s = 2 * energy * tk / hbar
        expo = np.cos(s) * eye - 1j * np.sin(s) * h / energy
        out[k] = (drift * tk + np.vdot(chi, left @ (expo - eye) @ chi)).real
    return out


def wavepacket_position_shift(params: ModelParams, spec: WavepacketSpec, spinor, t,
                              n_nodes: int = 80) -> np.ndarray:
    """Gauss-Hermite average of :func:`heisenberg_position_shift` over a Gaussian momentum packet."""
    sigma_p = params.hbar / (2 * params.delta) if spec.sigma_p is None else spec.sigma_p
    nodes, weights = np.polynomial.hermite_e.hermegauss(n_nodes)
    weights = weights / weights.sum()
    total = 0.0
    for z, w in zip(nodes, weights):
        total = total + w * heisenberg_position_shift(params, spec.p0 + sigma_p * z, t, spinor)
    return total


# -- trajectory fit -----------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    offset: float
    slope: float
    amplitude: float
    frequency: float
    phase: float
    residual_rms: float
    converged: bool
    oscillation_detected: bool

    def model(self, t):
        t = np.asarray(t, dtype=float)
        return self.offset + self.slope * t + self.amplitude * np.cos(self.frequency * t + self.phase)


def _linear_design(t, omega):
    return np.column_stack([np.ones_like(t), t, np.cos(omega * t), np.sin(omega * t)])


def _project(t, y, omega):
    coef, *_ = np.linalg.lstsq(_linear_design(t, omega), y, rcond=None)
    resid = y - _linear_design(t, omega) @ coef
    return coef, float(resid @ resid)


def spectral_peak(t: np.ndarray, y: np.ndarray, pad: int = 16) -> float:
    """Angular frequency of the strongest nonzero periodogram bin (uniform grid assumed)."""
    dt = t[1] - t[0]
    n = pad * t.size
    spectrum = np.abs(np.fft.rfft((y - y.mean()) * np.hanning(t.size), n=n))
    freqs = 2 * np.pi * np.fft.rfftfreq(n, d=dt)
    spectrum[0] = 0.0
    return float(freqs[np.argmax(spectrum)])


def fit_signal(t, y, min_periods: float = 4.0, min_points_per_period: float = 16.0,
               noise_floor: float = NOISE_FLOOR, residual_fraction: float = 0.05) -> FitResult:
    """Least-squares fit of offset + slope*t + A cos(omega t + phase).

    omega starts at the periodogram peak of the detrended signal, is refined
    by variable projection (linear parameters solved exactly at each trial
    omega), then all five parameters are polished jointly.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size < 8:
        raise InsufficientSampling("need at least 8 samples")
    line = np.polyfit(t, y, 1)
    resid = y - np.polyval(line, t)
    scale = max(1.0, float(np.max(np.abs(y))))
    omega0 = spectral_peak(t, resid)
    if np.sqrt(np.mean(resid**2)) <= noise_floor * scale or omega0 == 0:
        coef, ss = _project(t, y, omega0) if omega0 > 0 else (np.r_[line[::-1], 0.0, 0.0], float(resid @ resid))
        amp = float(np.hypot(coef[2], coef[3]))
        return FitResult(float(coef[0]), float(coef[1]), amp, omega0, float(np.arctan2(-coef[3], coef[2])),
                         float(np.sqrt(ss / t.size)), True, False)

    span = t[-1] - t[0]
    periods = span * omega0 / (2 * np.pi)
    per_period = 2 * np.pi / (omega0 * (t[1] - t[0]))
    if periods < min_periods or per_period < min_points_per_period:
        raise InsufficientSampling(
            f"sampled {periods:.2f} periods at {per_period:.1f} points/period; "
            f"need >= {min_periods} and >= {min_points_per_period}")

    bin_width = 2 * np.pi / span
    bounds = (max(omega0 - bin_width, 1e-12), omega0 + bin_width)
    res = minimize_scalar(lambda w: _project(t, y, w)[1], bounds=bounds,
                          method="bounded", options={"xatol": 1e-13 * omega0})
    omega = float(res.x)
    coef, _ = _project(t, y, omega)
    amp0, phase0 = np.hypot(coef[2], coef[3]), np.arctan2(-coef[3], coef[2])

    def residuals(theta):
        off, slope, amp, w, ph = theta
        return off + slope * t + amp * np.cos(w * t + ph) - y

    sol = least_squares(residuals, [coef[0], coef[1], amp0, omega, phase0], method="lm",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    off, slope, amp, w, ph = sol.x
    if amp < 0:
        amp, ph = -amp, ph + np.pi
    ph = float(np.angle(np.exp(1j * ph)))
    rms = float(np.sqrt(np.mean(sol.fun**2)))
    converged = bool(rms <= residual_fraction * amp)
    return FitResult(float(off), float(slope), float(amp), float(w), ph, rms, converged, True)


def fit_trajectory(series: TimeSeries, key: str, **kw) -> FitResult:
    return fit_signal(series.times, np.real(series[key]), **kw)


# -- dynamical checks -------------------------------------------------------------

def position_series(h, psi0: StateVector, times, params: ModelParams, mode: int = 0,
                    extra: dict | None = None, backend: str = "auto") -> TimeSeries:
    observables = {"x": mode_op(h.space, "x", mode, params.delta)}
    observables.update(extra or {})
    return run(Schedule.single(h, float(times[-1])), psi0, times, observables, backend=backend, hbar=params.hbar)


def zb_time_grid(omega_zb: float, periods: float = 4.5, points_per_period: int = 64) -> np.ndarray:
    n = int(np.ceil(periods * points_per_period)) + 1
    return np.linspace(0.0, periods * 2 * np.pi / omega_zb, n)


def compare_nonrelativistic(params: ModelParams, psi0: StateVector, t_grid) -> np.ndarray:
    """Fidelity between full Dirac evolution and the dispersive effective Hamiltonian.

    The comparison is made in the frame rotating with the mass term
    hbar*omega*sigma_z: the effective Hamiltonian omits that fast phase.
    """
    if params.omega == 0:
        raise InvalidParameter("the nonrelativistic comparison needs omega > 0")
    params = params.with_(mass_axis="z")
    h_full = dirac_1p1(params)
    h_eff = effective_squeeze(params)
    h_ref = h_eff + pauli(h_full.space, ("a", "b"), "z") * params.rest_energy
    full, ref = SpectralPropagator(h_full, params.hbar), SpectralPropagator(h_ref, params.hbar)
    out = []
    for t in np.asarray(t_grid, dtype=float):
        out.append(abs(inner(ref.evolve(psi0, t), full.evolve(psi0, t))) ** 2)
    return np.array(out)


@dataclass
class KleinReport:
    profile: dict
    t0: float
    t_max: float
    times: np.ndarray
    population_b: np.ndarray
    population_b_baseline: np.ndarray
    momentum: np.ndarray
    max_population_deviation: float
    negative_weight_before: float
    negative_weight_after: float
    potential: float
    threshold: float
    above_threshold: bool
    population_invariant: bool
    ehrenfest_max_rel_error: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key, value in d.items():
            if isinstance(value, np.ndarray):
                d[key] = value.tolist()
        return d


def klein_report(params: ModelParams, profile: PotentialProfile, t0: float, t_max: float, psi0: StateVector,
                 n_samples: int = 201, invariance_tol: float = 1e-10) -> KleinReport:
    """Two-segment quench: free Dirac evolution until t0, then H_D + potential."""
    if not 0 <= t0 < t_max:
        raise InvalidParameter("need 0 <= t0 < t_max")
    params = params.with_(mass_axis="z")
    base = dirac_1p1(params)
    quenched = klein_hamiltonian(base, profile, params)
    segments = ((quenched, t_max),) if t0 == 0 else ((base, t0), (quenched, t_max - t0))
    times = np.linspace(0.0, t_max, n_samples)
    space = base.space
    obs = {"P_b": projector(space, "b"), "p": mode_op(space, "p", 0, params.delta, params.hbar)}
    quench_run = run(Schedule(segments), psi0, times, obs, hbar=params.hbar)
    baseline = run(Schedule.single(base, t_max), psi0, times, obs, hbar=params.hbar)

    base_prop = SpectralPropagator(base, params.hbar)
    eig = (base_prop.evals, base_prop.evecs)
    psi_t0 = base_prop.evolve(psi0, t0)
    psi_end = SpectralPropagator(quenched, params.hbar).evolve(psi_t0, t_max - t0)
    w_before = energy_decompose(base, psi_t0, eig).weights[1]
    w_after = energy_decompose(base, psi_end, eig).weights[1]

    deviation = float(np.max(np.abs(quench_run["P_b"] - baseline["P_b"])))
    threshold = 2 * params.rest_energy
    notes = []
    ehrenfest = None
    if profile.kind == "uniform":
        notes.append("uniform potential is proportional to the identity: it commutes with H_D and only adds a "
                     "global phase, so populations are unchanged")
    if profile.kind == "linear":
        after = times >= t0
        p_t0 = float(np.interp(t0, times, quench_run["p"]))
        expected = -profile.magnitude * (times[after] - t0)
        got = quench_run["p"][after] - p_t0
        if params.omega == 0 and np.any(expected != 0):
            denom = np.max(np.abs(expected))
            ehrenfest = float(np.max(np.abs(got - expected)) / denom)
        notes.append("linear potential pumps momentum at rate -qE (exact for a massless particle)")
    magnitude = profile.magnitude if profile.kind != "linear" else 0.0
    return KleinReport(
        profile=asdict(profile), t0=t0, t_max=t_max, times=times,
        population_b=quench_run["P_b"], population_b_baseline=baseline["P_b"], momentum=quench_run["p"],
        max_population_deviation=deviation, negative_weight_before=w_before, negative_weight_after=w_after,
        potential=magnitude, threshold=threshold, above_threshold=bool(magnitude > threshold),
        population_invariant=bool(deviation <= invariance_tol), ehrenfest_max_rel_error=ehrenfest, notes=notes,
    )


# -- SI conversion -----------------------------------------------------------------

@dataclass(frozen=True)
class IonSpec:
    """mass in kg, trap frequency in rad/s, optional laser wavenumber in 1/m."""

    mass: float
    trap_frequency: float
    wavenumber: float | None = None

    def __post_init__(self):
        if self.mass <= 0 or self.trap_frequency <= 0 or (self.wavenumber is not None and self.wavenumber <= 0):
            raise InvalidParameter("ion mass, trap frequency and wavenumber must be positive")


def si_convert(params: ModelParams, ion: IonSpec, p0: float = 0.0) -> dict:
    """Physical Dirac constants of an ion simulation.

    ``params.omega`` and ``params.omega_sb`` are read in rad/s; ``p0`` in
    kg m/s. If the ion spec carries a wavenumber, eta = k * delta replaces
    ``params.eta``.
    """
    hbar = constants.hbar
    delta = np.sqrt(hbar / (2 * ion.mass * ion.trap_frequency))
    eta = ion.wavenumber * delta if ion.wavenumber is not None else params.eta
    c = 2 * eta * delta * params.omega_sb
    rest = hbar * params.omega
    omega_zb = zb_frequency(c, rest, p0, hbar)
    r_zb = zb_amplitude(c, rest, p0, hbar)
    return {
        "delta_m": float(delta),
        "eta": float(eta),
        "c_m_per_s": float(c),
        "rest_energy_J": float(rest),
        "omega_zb_rad_per_s": float(omega_zb),
        "f_zb_hz": float(omega_zb / (2 * np.pi)),
        "r_zb_m": float(r_zb),
        "r_zb_angstrom": float(r_zb / ANGSTROM),
        "massless": bool(params.omega == 0),
        "frequency_in_window": bool(omega_zb <= 2 * np.pi * ION_FREQUENCY_LIMIT_HZ),
        "amplitude_in_window": bool(r_zb <= ION_AMPLITUDE_LIMIT_M),
    }
