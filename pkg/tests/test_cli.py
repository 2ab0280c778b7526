import logging

import pytest
import yaml

import operations
from harness.config import load_config
from main import build_parser, main
from presets import ScenarioPresets
from utils.exception_handler import VerificationException


def _write_scenario(path, **extra):
    data = {
        "name": "cli",
        "plant": {"kind": "chain", "n": 2},
        "disturbance": {"kind": "sinusoid", "amplitude": 1.0, "frequency": 10.0},
        "observers": [{"order": 3, "omega_o": 1500.0}, {"order": 4, "omega_o": 1500.0}],
        "dt": 1.0e-4,
        "duration": 0.01,
        "baselines": False,
        **extra,
    }
    path.write_text(yaml.safe_dump(data))
    return str(path)


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_list_presets(caplog):
    with caplog.at_level(logging.INFO):
        assert main(["preset", "--list"]) == 0
    assert "Total Presets-" in caplog.text
    assert "p2p-r10" in caplog.text
    assert "p2p-repeat-r20" in caplog.text
    assert "Processing Done!!!" in caplog.text


def test_unknown_preset_is_a_config_error():
    assert main(["preset", "no-such-preset"]) == 1


def test_preset_writes_outputs(tmp_path):
    assert main(["--output", str(tmp_path), "preset", "tiny"]) == 0
    assert (tmp_path / "tiny-multi-eso.csv").exists()
    assert (tmp_path / "tiny-report.txt").exists()


def test_long_traces(tmp_path):
    assert main(["--output", str(tmp_path), "--long", "preset", "tiny"]) == 0
    assert (tmp_path / "tiny-multi-eso-long.csv").exists()


def test_run_config(tmp_path):
    config = _write_scenario(tmp_path / "cli.yaml")
    assert main(["--output", str(tmp_path / "out"), "run", config]) == 0
    assert (tmp_path / "out" / "cli-multi-eso.csv").exists()


def test_run_config_errors(tmp_path):
    assert main(["run", str(tmp_path / "missing.yaml")]) == 1
    assert main(["run", _write_scenario(tmp_path / "bad.yaml", window=0)]) == 1


def test_divergence_exit_code(tmp_path):
    config = _write_scenario(tmp_path / "inf.yaml", disturbance={"kind": "constant", "value": float("inf")})
    assert main(["--output", str(tmp_path), "run", config]) == 2


def test_sweep(tmp_path):
    config = _write_scenario(tmp_path / "cli.yaml")
    code = main(["--output", str(tmp_path), "sweep", config, "--param", "observers.0.omega_o", "--values", "1000,2000"])
    assert code == 0
    assert (tmp_path / "cli-observers.0.omega_o-1000-multi-eso.csv").exists()
    assert main(["sweep", config, "--param", "observers.0.nope", "--values", "1"]) == 1


def test_verify_exit_codes(monkeypatch):
    def failing(**kwargs):
        raise VerificationException("Verification failed: decay-rate", ["decay-rate"])

    monkeypatch.setattr(operations, "verify_suite", failing)
    assert main(["verify"]) == 3

    seen = {}
    monkeypatch.setattr(operations, "verify_suite", lambda **kwargs: seen.update(kwargs))
    assert main(["verify", "--omega-o", "300", "--typo-gains"]) == 0
    assert seen == {"omega_o": 300.0, "typo_gains": True}


def test_show_preset_prints_a_loadable_scenario(capsys, tmp_path):
    assert main(["preset", "p2p-repeat-r20", "--show"]) == 0
    text = capsys.readouterr().out
    data = yaml.safe_load(text)
    assert data["name"] == "p2p-repeat-r20"
    assert data["reference"]["value"] == 20.0
    assert data["trials"] == 5

    path = tmp_path / "shown.yaml"
    path.write_text(text)
    assert load_config(str(path)) == ScenarioPresets().get("p2p-repeat-r20")

    assert main(["preset", "no-such-preset", "--show"]) == 1
