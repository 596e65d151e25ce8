"""Scenario presets: build the Hamiltonian and initial state, evolve, analyse, check.

Each preset returns a time series plus a list of pass/fail checks; the exit
code follows the CLI contract (0 pass, 1 physics failure, 2 configuration
error, 3 numerical failure).
"""
from __future__ import annotations

import datetime as _dt
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    compare_nonrelativistic,
    fit_trajectory,
    klein_report,
    predict_zb,
    wavepacket_position_shift,
    zb_frequency,
    zb_time_grid,
)
from .config import ScenarioConfig
from .errors import ConvergenceError, InvalidTruncation
from .evolve import Schedule, TimeSeries, norm_observable, run
from .fockspace import Operator, mode_op, pauli, projector
from .hamiltonian import dirac_1p1, dirac_2p1, dirac_3p1, dirac_3p1_block, klein_hamiltonian
from .io import write_csv, write_report
from .states import internal_spinor, momentum_wavepacket

EXIT_OK, EXIT_PHYSICS, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    relation: str = "<="

    @classmethod
    def at_most(cls, name, value, tol):
        return cls(name, float(value), float(tol), bool(value <= tol), "<=")

    @classmethod
    def at_least(cls, name, value, tol):
        return cls(name, float(value), float(tol), bool(value >= tol), ">=")

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.value:.3e} {self.relation} {self.tolerance:.3e}"


@dataclass
class ScenarioResult:
    exit_code: int
    report: dict
    series: TimeSeries
    checks: list[Check] = field(default_factory=list)
    paths: dict = field(default_factory=dict)


def _observables(names, h: Operator, cfg: ScenarioConfig, mode: int) -> dict:
    space, params = h.space, cfg.params
    out = {}
    for name in names:
        if name == "x":
            out[name] = mode_op(space, "x", mode, params.delta)
        elif name == "p":
            out[name] = mode_op(space, "p", mode, params.delta, params.hbar)
        elif name == "n":
            out[name] = mode_op(space, "n", mode)
        elif name.startswith("P_"):
            if "abcd".index(name[2]) < space.internal_dim:
                out[name] = projector(space, name[2])
        elif name.startswith("sigma_"):
            if space.internal_dim == 2:
                out[name] = pauli(space, ("a", "b"), name[-1])
        elif name == "energy":
            out[name] = h
        elif name == "norm":
            out[name] = norm_observable
    return out


def _evolve(cfg: ScenarioConfig, schedule: Schedule, psi0, times, extra=(), mode: int = 0) -> TimeSeries:
    """Run ``schedule`` sampling the configured observables plus ``extra``."""
    names = dict.fromkeys((*extra, *cfg.observables))
    # "energy" refers to the last (post-quench) Hamiltonian
    observables = _observables(names, schedule.segments[-1][0], cfg, mode)
    return run(schedule, psi0, times, observables, backend=cfg.backend, hbar=cfg.params.hbar)


def _times(cfg: ScenarioConfig, default_t_max: float) -> np.ndarray:
    t_max = cfg.t_max if cfg.t_max is not None else default_t_max
    return np.linspace(0.0, t_max, cfg.n_samples)


def _zb_default_t_max(omega_zb: float) -> float:
    return zb_time_grid(omega_zb)[-1]


def _run_zitterbewegung(cfg: ScenarioConfig):
    params, tol = cfg.params, cfg.tolerances
    h = dirac_1p1(params)
    psi0 = momentum_wavepacket(h.space, cfg.wavepacket, 0, params.delta, params.hbar)
    pred = predict_zb(params, cfg.wavepacket.p0)
    times = _times(cfg, _zb_default_t_max(pred.omega_zb))
    series = _evolve(cfg, Schedule.single(h, times[-1]), psi0, times, ("x",))
    fit = fit_trajectory(series, "x")
    spinor = internal_spinor(h.space, cfg.wavepacket.internal)
    oracle = wavepacket_position_shift(params, cfg.wavepacket, spinor, times)
    oracle_err = float(np.max(np.abs(series["x"] - series["x"][0] - oracle)))
    checks = [
        Check.at_most("zb_frequency_rel_error", abs(fit.frequency / pred.omega_zb - 1), tol["frequency_rel"]),
        Check.at_most("zb_amplitude_rel_error", abs(fit.amplitude / pred.r_zb - 1), tol["amplitude_rel"]),
        Check.at_most("momentum_space_oracle_abs_error", oracle_err, tol["oracle_abs"]),
    ]
    return series, checks, {"prediction": asdict(pred), "fit": asdict(fit)}


def _run_massless(cfg: ScenarioConfig):
    params, tol = cfg.params, cfg.tolerances
    h = dirac_1p1(params)
    psi0 = momentum_wavepacket(h.space, cfg.wavepacket, 0, params.delta, params.hbar)
    times = _times(cfg, 20.0)
    series = _evolve(cfg, Schedule.single(h, times[-1]), psi0, times, ("x", "sigma_x"))
    fit = fit_trajectory(series, "x")
    expected = params.c * series["sigma_x"][0]
    slope_err = abs(fit.slope - expected) / abs(expected) if expected != 0 else abs(fit.slope)
    checks = [
        Check.at_most("classical_slope_rel_error", slope_err, tol["slope_rel"]),
        Check.at_most("oscillation_amplitude", fit.amplitude, tol["massless_amplitude"]),
        Check.at_most("sigma_x_drift", float(np.ptp(series["sigma_x"])), 1e-10),
    ]
    return series, checks, {"expected_slope": expected, "fit": asdict(fit)}


def _run_nonrelativistic(cfg: ScenarioConfig):
    params, tol = cfg.params, cfg.tolerances
    h = dirac_1p1(params.with_(mass_axis="z"))
    psi0 = momentum_wavepacket(h.space, cfg.wavepacket, 0, params.delta, params.hbar)
    times = _times(cfg, 10.0 / params.omega_sb)
    series = _evolve(cfg, Schedule.single(h, times[-1]), psi0, times)
    fidelity = compare_nonrelativistic(params, psi0, times)
    series.samples["fidelity"] = fidelity
    checks = [Check.at_least("min_interaction_frame_fidelity", float(fidelity.min()), tol["fidelity_min"])]
    ratio = params.eta * params.omega_sb / params.omega
    return series, checks, {"coupling_ratio": ratio, "min_fidelity": float(fidelity.min())}


def _quench_series(cfg: ScenarioConfig, base: Operator, times):
    quenched = klein_hamiltonian(base, cfg.potential, cfg.params)
    t0, t_max = cfg.quench_time, times[-1]
    segments = ((quenched, t_max),) if t0 == 0 else ((base, t0), (quenched, t_max - t0))
    psi0 = momentum_wavepacket(base.space, cfg.wavepacket, 0, cfg.params.delta, cfg.params.hbar)
    series = _evolve(cfg, Schedule(segments), psi0, times)
    return series, psi0


def _run_klein(cfg: ScenarioConfig):
    params, tol = cfg.params.with_(mass_axis="z"), cfg.tolerances
    base = dirac_1p1(params)
    times = _times(cfg, 20.0)
    series, psi0 = _quench_series(cfg, base, times)
    report = klein_report(params, cfg.potential, cfg.quench_time, times[-1], psi0, n_samples=times.size,
                          invariance_tol=tol["population_invariance"])
    checks = []
    if cfg.potential.kind == "uniform":
        checks.append(Check.at_most("population_invariance", report.max_population_deviation,
                                    tol["population_invariance"]))
    if report.ehrenfest_max_rel_error is not None:
        checks.append(Check.at_most("ehrenfest_momentum_drift_rel_error", report.ehrenfest_max_rel_error,
                                    tol["ehrenfest_rel"]))
    summary = report.to_dict()
    for key in ("times", "population_b", "population_b_baseline", "momentum"):
        summary.pop(key)
    return series, checks, {"klein": summary}


def _run_3p1(cfg: ScenarioConfig):
    params, tol = cfg.params, cfg.tolerances
    full = dirac_3p1(params)
    assembly = float(abs(full.sparse() - dirac_3p1_block(params).sparse()).max())
    rest = np.linalg.eigvalsh(dirac_3p1(params.with_(eta=0.0)).dense())
    expected = np.where(rest > 0, params.rest_energy, -params.rest_energy)
    doublet_err = float(np.max(np.abs(rest - expected)))
    balanced = int(np.sum(rest > 0)) == int(np.sum(rest < 0))

    # Zitterbewegung along z: only the z mode is coupled, x and y stay in vacuum
    h = dirac_3p1(params, axes="z")
    psi0 = momentum_wavepacket(h.space, cfg.wavepacket, 2, params.delta, params.hbar)
    omega_pred = zb_frequency(params.c, params.rest_energy, cfg.wavepacket.p0, params.hbar)
    times = _times(cfg, _zb_default_t_max(omega_pred))
    series = _evolve(cfg, Schedule.single(h, times[-1]), psi0, times, ("x",), mode=2)
    fit = fit_trajectory(series, "x")
    checks = [
        Check.at_most("eq_sum_vs_block_assembly", assembly, tol["assembly_abs"]),
        Check.at_most("rest_doublet_error", doublet_err if balanced else np.inf, tol["rest_doublet_abs"]),
        Check.at_most("zb_frequency_rel_error_3p1", abs(fit.frequency / omega_pred - 1), tol["frequency_rel_3p1"]),
    ]
    return series, checks, {"dimension": full.space.dim, "predicted_omega_zb": omega_pred, "fit": asdict(fit)}


def _run_custom(cfg: ScenarioConfig):
    params = cfg.params
    builders = {"dirac_1p1": dirac_1p1, "dirac_2p1": dirac_2p1, "dirac_3p1": dirac_3p1}
    base = builders[cfg.hamiltonian](params)
    times = _times(cfg, 10.0)
    if cfg.potential is not None:
        series, _ = _quench_series(cfg, base, times)
    else:
        psi0 = momentum_wavepacket(base.space, cfg.wavepacket, 0, params.delta, params.hbar)
        series = _evolve(cfg, Schedule.single(base, times[-1]), psi0, times)
    return series, [], {"dimension": base.space.dim}


RUNNERS = {
    "zitterbewegung_1p1": _run_zitterbewegung,
    "massless_1p1": _run_massless,
    "nonrelativistic_1p1": _run_nonrelativistic,
    "klein_quench": _run_klein,
    "axial_anomaly": _run_klein,
    "dirac_3p1_demo": _run_3p1,
    "custom": _run_custom,
}


def run_scenario(cfg: ScenarioConfig, out_dir=None, write: bool = True) -> ScenarioResult:
    """Run one preset; writes ``timeseries.csv`` and ``report.json`` under ``out_dir``."""
    try:
        series, checks, results = RUNNERS[cfg.scenario](cfg)
    except (InvalidTruncation, ConvergenceError) as exc:
        report = {"scenario": cfg.scenario, "config": cfg.snapshot(), "error": str(exc),
                  "exit_code": EXIT_NUMERICAL, "passed": False}
        return ScenarioResult(EXIT_NUMERICAL, report, TimeSeries(np.array([]), {}, np.array([])))

    leak_tol = cfg.tolerances["leakage"]
    trusted = series.max_leakage <= leak_tol
    if not trusted:
        code = EXIT_NUMERICAL
    elif all(c.passed for c in checks):
        code = EXIT_OK
    else:
        code = EXIT_PHYSICS
    series.metadata.update(params=asdict(cfg.params), trusted=trusted)
    report = {
        "scenario": cfg.scenario,
        "config": cfg.snapshot(),
        "checks": [asdict(c) for c in checks],
        "results": results,
        "leakage": {"max": series.max_leakage, "tolerance": leak_tol, "trusted": trusted},
        "exit_code": code,
        "passed": code == EXIT_OK,
        "metadata": {"created": _dt.datetime.now(_dt.timezone.utc).isoformat(), "version": __version__},
    }
    result = ScenarioResult(code, report, series, checks)
    if write:
        out = Path(out_dir if out_dir is not None else cfg.output_dir)
        result.paths = {
            "timeseries": str(write_csv(series, out / cfg.timeseries_name)),
            "report": str(write_report(report, out / cfg.report_name)),
        }
    return result
