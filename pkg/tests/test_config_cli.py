import json
from dataclasses import replace

import numpy as np
import pytest
import yaml

from iondirac.cli import main
from iondirac.config import DEFAULT_TOLERANCES, PRESET_DEFAULTS, SCENARIOS, load_config, parse_config
from iondirac.errors import ConfigError
from iondirac.evolve import TimeSeries
from iondirac.io import emit, load_report, read_csv, write_csv, write_report
from iondirac.scenarios import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, EXIT_PHYSICS, run_scenario


def _write(tmp_path, data, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data) if isinstance(data, dict) else data)
    return path


def test_minimal_massless_config_gets_defaults(tmp_path):
    cfg = load_config(_write(tmp_path, {"scenario": "massless_1p1", "params": {"eta": 0.1}, "time": {"t_max": 20}}))
    assert cfg.params.omega == 0.0
    assert cfg.params.n_max == (60,)
    assert cfg.n_samples >= 2 and cfg.t_max == 20.0
    assert cfg.tolerances == DEFAULT_TOLERANCES


def test_unknown_key_is_named(tmp_path):
    path = _write(tmp_path, {"scenario": "zitterbewegung_1p1", "params": {"omega_zb": 1.0}})
    with pytest.raises(ConfigError, match="omega_zb"):
        load_config(path)
    with pytest.raises(ConfigError, match="colour"):
        parse_config({"scenario": "custom", "colour": "red"})


def test_all_problems_reported_together():
    with pytest.raises(ConfigError) as err:
        parse_config({"scenario": "massless_1p1", "params": {"omega": 0.5}, "time": {"n_samples": 1},
                      "observables": ["x", "spin"]})
    msg = str(err.value)
    for fragment in ("omega = 0", "n_samples", "'spin'"):
        assert fragment in msg


def test_yaml_error_has_position(tmp_path):
    path = _write(tmp_path, "scenario: custom\nparams: {eta: [\n")
    with pytest.raises(ConfigError, match="line"):
        load_config(path)
    with pytest.raises(ConfigError, match="does not exist"):
        load_config(tmp_path / "missing.yaml")


def test_scenario_specific_validation():
    with pytest.raises(ConfigError, match="linear"):
        parse_config({"scenario": "axial_anomaly", "potential": {"kind": "uniform", "magnitude": 1.0}})
    with pytest.raises(ConfigError, match="quench_time"):
        parse_config({"scenario": "klein_quench", "potential": {"quench_time": 50.0}})
    with pytest.raises(ConfigError, match="t_max"):
        parse_config({"scenario": "custom", "time": {"t_max": -1}})


def test_strict_profile_tightens_leakage():
    cfg = parse_config({"scenario": "massless_1p1"})
    assert cfg.with_profile("strict").tolerances["leakage"] == 1e-9
    with pytest.raises(ConfigError):
        cfg.with_profile("lenient")


def test_every_preset_has_a_committed_example(repo_root):
    for name in SCENARIOS:
        assert name in PRESET_DEFAULTS
        cfg = load_config(repo_root / "configs" / f"{name}.yaml")
        assert cfg.scenario == name


def test_csv_round_trip_and_shape(tmp_path):
    times = np.linspace(0, 1, 7)
    series = TimeSeries(times, {"x": np.sin(times) / 3, "z": np.exp(1j * times)}, np.full(7, 1e-20))
    path = write_csv(series, tmp_path / "ts.csv")
    raw = path.read_bytes()
    assert raw.count(b"\r\n") == 8
    data = read_csv(path)
    assert list(data) == ["time", "x", "z.re", "z.im", "leakage"]
    assert np.array_equal(data["x"], np.sin(times) / 3)
    empty = write_csv(TimeSeries(times, {}, np.zeros(7)), tmp_path / "empty.csv")
    assert empty.read_text().splitlines()[0] == "time,leakage"


def test_json_round_trip(tmp_path):
    report = {"a": 1.0 / 3.0, "b": [np.float64(2.5), np.bool_(True)], "nested": {"z": 1 + 2j}}
    path = write_report(report, tmp_path / "r.json")
    loaded = load_report(path)
    again = write_report({k: v for k, v in loaded.items() if k != "schema_version"}, tmp_path / "r2.json")
    assert path.read_bytes() == again.read_bytes()
    assert loaded["schema_version"] == 1 and loaded["a"] == 1.0 / 3.0
    with pytest.raises(ValueError):
        emit(report, tmp_path / "r.csv")


def test_massless_run_is_deterministic(tmp_path):
    cfg = parse_config({"scenario": "massless_1p1", "time": {"n_samples": 101}})
    first = run_scenario(cfg, out_dir=tmp_path / "one")
    run_scenario(cfg, out_dir=tmp_path / "two")
    assert first.exit_code == EXIT_OK
    one, two = (tmp_path / d / "timeseries.csv" for d in ("one", "two"))
    assert one.read_bytes() == two.read_bytes()
    assert len(one.read_text().splitlines()) == 101 + 1
    r1, r2 = (load_report(tmp_path / d / "report.json") for d in ("one", "two"))
    r1.pop("metadata"), r2.pop("metadata")
    assert r1 == r2
    names = {c["name"] for c in first.report["checks"]}
    assert {"classical_slope_rel_error", "oscillation_amplitude"} <= names
    assert first.report["config"]["params"]["omega"] == 0.0


def test_klein_report_flags(tmp_path):
    cfg = parse_config({"scenario": "klein_quench", "time": {"n_samples": 41}})
    result = run_scenario(cfg, write=False)
    assert result.exit_code == EXIT_OK
    klein = result.report["results"]["klein"]
    assert klein["population_invariant"] and klein["above_threshold"]
    assert any("identity" in note for note in klein["notes"])


def test_physics_failure_exit_code():
    cfg = parse_config({"scenario": "massless_1p1", "time": {"n_samples": 101}})
    cfg = replace(cfg, tolerances={**cfg.tolerances, "slope_rel": -1.0})
    assert run_scenario(cfg, write=False).exit_code == EXIT_PHYSICS


def test_leakage_exit_code():
    cfg = parse_config({"scenario": "custom", "params": {"n_max": 6}, "wavepacket": {"p0": 1.0},
                        "time": {"n_samples": 21}})
    result = run_scenario(cfg, write=False)
    assert result.exit_code == EXIT_NUMERICAL


def test_cli_run_and_errors(tmp_path, repo_root):
    out = tmp_path / "out"
    assert main(["run", str(repo_root / "configs" / "massless_1p1.yaml"), "--out", str(out), "-q"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"]
    bad = _write(tmp_path, {"scenario": "massless_1p1", "bogus": 1})
    assert main(["run", str(bad), "-q"]) == EXIT_CONFIG
    assert main(["run", str(tmp_path / "nope.yaml"), "-q"]) == EXIT_CONFIG
    # initial wavepacket too wide for the truncation
    wide = _write(tmp_path, {"scenario": "massless_1p1", "params": {"n_max": 4}, "wavepacket": {"p0": 3.0}},
                  "wide.yaml")
    assert main(["run", str(wide), "-q", "--out", str(out)]) == EXIT_NUMERICAL


def test_cli_sweep(tmp_path, monkeypatch):
    cfgs = tmp_path / "cfgs"
    cfgs.mkdir()
    _write(cfgs, {"scenario": "massless_1p1", "time": {"n_samples": 101}}, "a.yaml")
    _write(cfgs, {"scenario": "klein_quench", "time": {"n_samples": 41}}, "b.yaml")
    monkeypatch.setenv("IONDIRAC_WORKERS", "2")
    assert main(["sweep", str(cfgs), "--out", str(tmp_path / "o"), "-q", "--backend", "dense"]) == 0
    assert (tmp_path / "o" / "a" / "report.json").is_file()
    assert (tmp_path / "o" / "b" / "timeseries.csv").is_file()
    assert main(["sweep", str(tmp_path / "empty_dir"), "-q"]) == EXIT_CONFIG
