import math
import os

import numpy as np
import pandas as pd
import pytest

from harness.config import (
    OUTPUT_DIR_ENV,
    ScenarioConfig,
    config_hash,
    dump_config,
    load_config,
    with_override,
)
from harness.metrics import MULTI_LAW, MetricsReport, iae, switch_transients, window_selections
from harness.runner import control_laws, run_scenario, simulate, write_outputs
from harness.sweep import parse_values, run_sweep
from harness.trace import SimulationTrace, read_trace, trace_columns
from presets import PRESETS
from utils.exception_handler import ConfigException

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "trace_columns.txt")


def _minimal(**extra):
    return {"observers": [{"order": 3, "omega_o": 1500.0}], **extra}


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_round_trip(presets, name, tmp_path):
    cfg = presets.get(name)
    assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg

    path = tmp_path / "scenario.yaml"
    path.write_text(dump_config(cfg))
    assert load_config(str(path)) == cfg


def test_unknown_preset(presets):
    with pytest.raises(ConfigException) as err:
        presets.get("missing")
    assert err.value.field == "preset"


@pytest.mark.parametrize(
    "data, field",
    [
        (_minimal(bogus=1), "bogus"),
        ({"observers": [{"order": 3, "omega_o": -5.0}]}, "observers.0.omega_o"),
        ({"observers": [{"order": 2, "omega_o": 100.0}]}, "observers.0.order"),
        ({"observers": []}, "observers"),
        (_minimal(duration=0.00015), "duration"),
        (_minimal(poles=[[150.0, 1]]), "poles"),
        (_minimal(poles=[[150.0, 1], [150.0, 1]]), "poles"),
        (_minimal(measurement_hold="cubic"), "measurement_hold"),
        (_minimal(plant={"kind": "maglev"}), "plant.kind"),
        (_minimal(plant={"kind": "rfc", "params": {"stiffness": 0.0}}), "plant.stiffness"),
        (_minimal(reference={"kind": "square"}), "reference.kind"),
        (_minimal(window=0), "window"),
        (_minimal(friction_jitter=1.0), "friction_jitter"),
        (_minimal(hysteresis=1.0), "hysteresis"),
        (_minimal(initial_observer=1), "initial_observer"),
    ],
)
def test_config_errors_name_the_field(data, field):
    with pytest.raises(ConfigException) as err:
        ScenarioConfig.from_dict(data)
    assert err.value.field == field


def test_load_config_reports_missing_file(tmp_path):
    with pytest.raises(ConfigException) as err:
        load_config(str(tmp_path / "absent.yaml"))
    assert err.value.field == "path"


def test_omega_c_shorthand():
    cfg = ScenarioConfig.from_dict(_minimal(omega_c=100.0))
    assert cfg.poles == ((100.0, 2),)
    with pytest.raises(ConfigException):
        ScenarioConfig.from_dict(_minimal(omega_c=100.0, poles=[[100.0, 2]]))


def test_output_dir_precedence(tiny, monkeypatch, tmp_path):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    assert tiny.output_dir() == str(tmp_path)
    assert with_override(tiny, "output", "elsewhere").output_dir() == "elsewhere"


def test_with_override(tiny):
    cfg = with_override(tiny, "observers.0.omega_o", 1000.0)
    assert cfg.observers[0].omega_o == 1000.0
    assert tiny.observers[0].omega_o == 1500.0
    assert with_override(tiny, "omega_c", 100.0).poles == ((100.0, 2),)
    with pytest.raises(ConfigException):
        with_override(tiny, "observers.7.omega_o", 1.0)
    with pytest.raises(ConfigException):
        with_override(tiny, "nothing", 1.0)


def test_config_hash_tracks_content(tiny):
    assert config_hash(tiny) == config_hash(ScenarioConfig.from_dict(tiny.to_dict()))
    assert config_hash(tiny) != config_hash(with_override(tiny, "seed", 1))


def test_iae_examples():
    assert iae(np.zeros(11), dt=0.1) == 0.0
    assert iae(np.ones(101), dt=0.01) == pytest.approx(1.0)
    t = np.arange(10001) * 1e-3
    assert abs(iae(np.exp(-t), dt=1e-3) - 1.0) < 1e-3
    assert iae(np.exp(-t), dt=1e-3, method="trapezoid") == pytest.approx(1.0 - np.exp(-10.0), abs=1e-6)
    assert iae(np.array([4.0]), dt=0.1) == 0.0


def test_iae_rejects_bad_input():
    with pytest.raises(ConfigException):
        iae(np.array([]), dt=0.1)
    with pytest.raises(ConfigException):
        iae(np.ones(3), dt=0.1, method="simpson")
    with pytest.raises(ConfigException):
        iae(np.ones(3))


def test_switch_transients_and_selections():
    frame = pd.DataFrame(
        {
            "t": [0.0, 1.0, 2.0, 3.0, 4.0],
            "u": [0.0, 1.0, 5.0, 5.0, 5.0],
            "y": [0.0, 0.1, 0.2, 0.4, 0.45],
            "active": [0, 0, 1, 1, 1],
            "switched": [0, 0, 1, 0, 0],
        }
    )
    trace = SimulationTrace(frame=frame)
    transients = switch_transients(trace)
    assert transients["du_switch"] == 4.0
    assert transients["du_other"] == 1.0
    assert transients["dy_switch"] == pytest.approx(0.2)
    assert transients["dy_other"] == pytest.approx(0.1)
    assert window_selections(trace, 2) == [1, 1]


def test_metrics_report_iae_ratio():
    report = MetricsReport(trial_iae={MULTI_LAW: [1.0, 1.2], "eso3": [2.0, 2.0], "eso4": [1.05, 1.15]})
    assert report.iae[MULTI_LAW] == pytest.approx(1.1)
    multi, best, ratio = report.iae_ratio()
    assert best == pytest.approx(1.1)
    assert ratio == pytest.approx(1.0)
    assert "multi/best single IAE" in report.to_text()
    assert "per trial" in report.to_text()

    assert MetricsReport(trial_iae={MULTI_LAW: [1.0]}).iae_ratio() is None

    report.transients = {"du_switch": 3.0, "du_other": 2.0, "dy_switch": 0.0, "dy_other": 0.0}
    assert not report.transient_ok()
    report.switch_du_limit = 5.0
    assert report.transient_ok()


def test_tiny_trace_schema(tiny):
    trace = simulate(tiny, tiny.observer_configs())
    with open(GOLDEN) as handle:
        golden = handle.read().split()
    assert list(trace.frame.columns) == golden
    assert trace_columns(2) == golden
    assert len(trace) == tiny.steps + 1
    assert np.allclose(np.diff(trace["t"]), tiny.dt)
    assert trace.header["config_hash"] == config_hash(tiny)


def test_trace_file_round_trip(tiny, tmp_path):
    trace = simulate(tiny, tiny.observer_configs())
    path = tmp_path / "tiny.csv"
    text = trace.to_csv(str(path))
    assert text.startswith("# label: multi-eso\n")

    loaded = read_trace(str(path))
    assert loaded.label == MULTI_LAW
    assert loaded.bank_size == 2
    assert loaded.header["config"] == tiny.to_dict()
    pd.testing.assert_frame_equal(loaded.frame, trace.frame, check_dtype=False)


def test_long_format(tiny, tmp_path):
    trace = simulate(tiny, tiny.observer_configs())
    long = trace.long_format()
    assert list(long.columns) == ["t", "variable", "value"]
    assert len(long) == len(trace) * (len(trace.frame.columns) - 1)

    path = tmp_path / "long.csv"
    trace.to_csv(str(path), long=True)
    with pytest.raises(ConfigException):
        read_trace(str(path))


def test_reruns_are_byte_identical(tiny):
    first = simulate(tiny, tiny.observer_configs()).to_csv()
    second = simulate(tiny, tiny.observer_configs()).to_csv()
    assert first == second


def test_control_laws(tiny):
    assert [label for label, _ in control_laws(tiny)] == [MULTI_LAW]

    with_baselines = with_override(tiny, "baselines", True)
    assert [label for label, _ in control_laws(with_baselines)] == [MULTI_LAW, "eso3-w1500", "eso4-w1500"]

    twins = with_override(with_baselines, "observers.1", {"order": 3, "omega_o": 1500.0})
    assert [label for label, _ in control_laws(twins)] == [MULTI_LAW, "eso3-w1500", "eso3-w1500-1"]


def test_initial_observer_applies_to_the_bank_only(tiny):
    cfg = with_override(with_override(tiny, "baselines", True), "initial_observer", 1)
    result = run_scenario(cfg)
    assert result.multi["active"][0] == 1
    assert np.all(result.traces["eso3-w1500"]["active"] == 0)
    assert cfg.to_dict()["initial_observer"] == 1


def test_zero_disturbance_preset_has_zero_iae(presets):
    result = run_scenario(presets.get("zero-disturbance"))
    assert set(result.traces) == {MULTI_LAW, "eso3-w1500", "eso4-w1500"}
    for value in result.metrics.iae.values():
        assert value <= 1e-9
    assert result.metrics.switch_count == 0


def test_trials_share_noise_across_laws(tiny):
    cfg = with_override(with_override(tiny, "trials", 2), "noise_std", 1e-6)
    result = run_scenario(cfg)
    values = result.metrics.trial_iae[MULTI_LAW]
    assert len(values) == 2
    assert values[0] != values[1]


def test_write_outputs(tiny, tmp_path):
    result = run_scenario(tiny)
    paths = write_outputs(result, str(tmp_path))
    assert sorted(os.path.basename(path) for path in paths) == ["tiny-multi-eso.csv", "tiny-report.txt"]
    assert "switches" in (tmp_path / "tiny-report.txt").read_text()


def test_parse_values():
    assert parse_values("1000, 2000.5") == [1000, 2000.5]
    with pytest.raises(ConfigException):
        parse_values(" , ")


def test_sweep_keeps_value_order(tiny, tmp_path):
    results = run_sweep(tiny, "observers.0.omega_o", [1000.0, 2000.0, 1500.0], max_workers=2, out_dir=str(tmp_path))
    assert [result.config.observers[0].omega_o for result in results] == [1000.0, 2000.0, 1500.0]
    names = [result.config.name for result in results]
    assert len(set(names)) == 3
    for name in names:
        assert (tmp_path / f"{name}-multi-eso.csv").exists()
    assert all(math.isfinite(result.metrics.iae[MULTI_LAW]) for result in results)
