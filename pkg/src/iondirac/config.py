"""Scenario configuration: YAML files validated into a :class:`ScenarioConfig`.

Unknown keys are errors. All validation problems are collected and reported
together rather than one at a time.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError, IonDiracError
from .hamiltonian import ModelParams, PotentialProfile
from .states import WavepacketSpec

SCENARIOS = (
    "zitterbewegung_1p1",
    "massless_1p1",
    "nonrelativistic_1p1",
    "klein_quench",
    "axial_anomaly",
    "dirac_3p1_demo",
    "custom",
)

OBSERVABLE_NAMES = ("x", "p", "n", "P_a", "P_b", "P_c", "P_d", "sigma_x", "sigma_y", "sigma_z", "energy", "norm")
INTERNAL_NAMES = ("a", "b", "c", "d", "+x", "-x", "+y", "-y")

DEFAULT_TOLERANCES = {
    "leakage": 1e-6,
    "frequency_rel": 0.02,
    "amplitude_rel": 0.10,
    "oracle_abs": 1e-6,
    "slope_rel": 1e-6,
    "massless_amplitude": 1e-8,
    "fidelity_min": 0.99,
    "population_invariance": 1e-10,
    "ehrenfest_rel": 1e-6,
    "frequency_rel_3p1": 0.03,
    "assembly_abs": 1e-13,
    "rest_doublet_abs": 1e-12,
}
STRICT_OVERRIDES = {"leakage": 1e-9}

# Per-scenario defaults layered under the user's file.
PRESET_DEFAULTS: dict[str, dict[str, Any]] = {
    "zitterbewegung_1p1": {
        "params": {"eta": 0.05, "omega": 0.5, "n_max": [40], "mass_axis": "y"},
        "wavepacket": {"p0": 0.0, "internal": "a"},
        "time": {"t_max": None, "n_samples": 401},
        "observables": ["x", "p", "P_a", "P_b", "sigma_x"],
    },
    "massless_1p1": {
        "params": {"eta": 0.1, "omega": 0.0, "n_max": [60]},
        "wavepacket": {"p0": 0.0, "internal": "+x"},
        "time": {"t_max": 20.0, "n_samples": 401},
        "observables": ["x", "sigma_x"],
    },
    "nonrelativistic_1p1": {
        "params": {"eta": 0.05, "omega": 1.0, "n_max": [40]},
        "wavepacket": {"p0": 0.0, "internal": "a"},
        "time": {"t_max": 10.0, "n_samples": 1001},
        "observables": ["x", "P_a", "energy"],
    },
    "klein_quench": {
        "params": {"eta": 0.05, "omega": 0.5, "n_max": [40]},
        "wavepacket": {"p0": 0.0, "internal": "a"},
        "potential": {"kind": "uniform", "magnitude": 1.5, "quench_time": 5.0},
        "time": {"t_max": 20.0, "n_samples": 201},
        "observables": ["P_a", "P_b", "p"],
    },
    "axial_anomaly": {
        "params": {"eta": 0.1, "omega": 0.0, "n_max": [60]},
        "wavepacket": {"p0": 0.0, "internal": "a"},
        "potential": {"kind": "linear", "magnitude": 0.05, "quench_time": 0.0},
        "time": {"t_max": 20.0, "n_samples": 201},
        "observables": ["x", "p", "sigma_x"],
    },
    "dirac_3p1_demo": {
        "params": {"eta": 0.05, "omega": 0.5, "n_max": [6, 6, 6]},
        "wavepacket": {"p0": 0.0, "internal": "a"},
        "time": {"t_max": None, "n_samples": 289},
        "observables": ["x", "P_a", "P_c"],
        # n_max = 6 is a desk-scale truncation; the z mode's top two levels reach ~1e-5
        "tolerances": {"leakage": 1e-4},
    },
    "custom": {
        "params": {},
        "wavepacket": {"p0": 0.0, "internal": "a"},
        "time": {"t_max": 10.0, "n_samples": 201},
        "observables": ["x", "P_a", "P_b"],
    },
}

_ALLOWED = {
    "scenario": None,
    "params": {"eta", "omega", "omega_sb", "delta", "hbar", "n_max", "mass_axis"},
    "wavepacket": {"p0", "sigma_p", "internal"},
    "potential": {"kind", "magnitude", "center", "width", "quench_time"},
    "time": {"t_max", "n_samples"},
    "observables": None,
    "hamiltonian": None,
    "backend": None,
    "output": {"dir", "timeseries", "report"},
    "tolerances": set(DEFAULT_TOLERANCES),
}
HAMILTONIANS = ("dirac_1p1", "dirac_2p1", "dirac_3p1")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    params: ModelParams
    wavepacket: WavepacketSpec
    t_max: float | None
    n_samples: int
    observables: tuple[str, ...]
    potential: PotentialProfile | None = None
    quench_time: float = 0.0
    hamiltonian: str = "dirac_1p1"
    backend: str = "auto"
    output_dir: str = "out"
    timeseries_name: str = "timeseries.csv"
    report_name: str = "report.json"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    source: str | None = None

    def snapshot(self) -> dict:
        """JSON-ready view of every setting (the source path excluded)."""
        d = asdict(self)
        d.pop("source")
        d["params"]["n_max"] = list(self.params.n_max)
        d["observables"] = list(self.observables)
        return d

    def with_profile(self, profile: str) -> "ScenarioConfig":
        if profile == "default":
            return self
        if profile != "strict":
            raise ConfigError(f"unknown tolerance profile {profile!r}")
        tol = dict(self.tolerances)
        for key, value in STRICT_OVERRIDES.items():
            tol[key] = min(tol[key], value)
        return replace(self, tolerances=tol)


def _merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for key, value in over.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _unknown_keys(raw: dict) -> list[str]:
    problems = []
    for key, value in raw.items():
        if key not in _ALLOWED:
            problems.append(f"unknown key {key!r}")
            continue
        allowed = _ALLOWED[key]
        if allowed is not None:
            if not isinstance(value, dict):
                problems.append(f"section {key!r} must be a mapping")
                continue
            problems.extend(f"unknown key {key}.{sub!r}" for sub in value if sub not in allowed)
    return problems


def parse_config(raw: Any, source: str | None = None) -> ScenarioConfig:
    """Validate a parsed YAML mapping, applying the scenario's defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping at top level")
    problems = _unknown_keys(raw)
    scenario = raw.get("scenario")
    if scenario not in SCENARIOS:
        problems.append(f"scenario must be one of {', '.join(SCENARIOS)}; got {scenario!r}")
    if problems:
        raise ConfigError("; ".join(problems))

    merged = _merge(PRESET_DEFAULTS[scenario], raw)
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(merged.get("tolerances", {}))
    params_raw = dict(merged["params"])
    if "n_max" in params_raw and isinstance(params_raw["n_max"], int):
        params_raw["n_max"] = [params_raw["n_max"]]

    params = wavepacket = potential = None
    try:
        params = ModelParams(**{k: (tuple(v) if k == "n_max" else v) for k, v in params_raw.items()})
    except (IonDiracError, TypeError) as exc:
        problems.append(f"params: {exc}")
    wp = merged.get("wavepacket", {})
    internal = wp.get("internal", "a")
    if isinstance(internal, str) and internal not in INTERNAL_NAMES:
        problems.append(f"wavepacket.internal must be one of {INTERNAL_NAMES}; got {internal!r}")
    try:
        wavepacket = WavepacketSpec(p0=float(wp.get("p0", 0.0)), sigma_p=wp.get("sigma_p"), internal=internal)
    except (IonDiracError, TypeError, ValueError) as exc:
        problems.append(f"wavepacket: {exc}")
    pot = merged.get("potential")
    quench_time = 0.0
    if pot is not None:
        pot = dict(pot)
        quench_time = float(pot.pop("quench_time", 0.0))
        try:
            potential = PotentialProfile(**pot)
        except (IonDiracError, TypeError) as exc:
            problems.append(f"potential: {exc}")

    time = merged.get("time", {})
    t_max = time.get("t_max")
    n_samples = time.get("n_samples", 201)
    if t_max is not None and not (isinstance(t_max, (int, float)) and t_max > 0):
        problems.append(f"time.t_max must be > 0; got {t_max!r}")
    if not isinstance(n_samples, int) or n_samples < 2:
        problems.append(f"time.n_samples must be an integer >= 2; got {n_samples!r}")
    if potential is not None and t_max is not None and not 0 <= quench_time < t_max:
        problems.append(f"potential.quench_time must lie in [0, t_max); got {quench_time!r}")

    observables = merged.get("observables", [])
    if not isinstance(observables, list):
        problems.append("observables must be a list")
        observables = []
    for name in observables:
        if name not in OBSERVABLE_NAMES:
            problems.append(f"unknown observable {name!r}")

    hamiltonian = merged.get("hamiltonian", "dirac_1p1")
    if hamiltonian not in HAMILTONIANS:
        problems.append(f"hamiltonian must be one of {HAMILTONIANS}; got {hamiltonian!r}")
    backend = merged.get("backend", "auto")
    if backend not in ("dense", "krylov", "auto"):
        problems.append(f"backend must be dense, krylov or auto; got {backend!r}")

    if params is not None:
        if scenario in ("massless_1p1", "axial_anomaly") and params.omega != 0:
            problems.append(f"{scenario} requires omega = 0")
        if scenario == "nonrelativistic_1p1" and params.omega == 0:
            problems.append("nonrelativistic_1p1 requires omega > 0")
        if scenario == "zitterbewegung_1p1" and params.omega == 0:
            problems.append("zitterbewegung_1p1 requires omega > 0")
    if scenario in ("klein_quench", "axial_anomaly") and pot is None:
        problems.append(f"{scenario} needs a potential section")
    if scenario == "axial_anomaly" and potential is not None and potential.kind != "linear":
        problems.append("axial_anomaly needs potential.kind = linear")
    for key, value in tolerances.items():
        if not isinstance(value, (int, float)) or value < 0:
            problems.append(f"tolerances.{key} must be a nonnegative number")

    if problems:
        raise ConfigError("; ".join(problems))

    out = merged.get("output", {})
    return ScenarioConfig(
        scenario=scenario, params=params, wavepacket=wavepacket,
        t_max=None if t_max is None else float(t_max), n_samples=n_samples,
        observables=tuple(observables), potential=potential, quench_time=quench_time,
        hamiltonian=hamiltonian, backend=backend, output_dir=out.get("dir", "out"),
        timeseries_name=out.get("timeseries", "timeseries.csv"), report_name=out.get("report", "report.json"),
        tolerances=tolerances, source=source,
    )


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark is not None else ""
        raise ConfigError(f"{path}: YAML parse error{where}: {getattr(exc, 'problem', exc)}") from exc
    try:
        return parse_config(raw, source=str(path))
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
