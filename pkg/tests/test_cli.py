import json
from pathlib import Path

import pytest

from memenergy.cli import main
from memenergy.config import PRESETS, ConfigError, load_config, parse_config, preset_text

ROOT = Path(__file__).resolve().parents[1]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if code == 0 and out.startswith("{") else out), err


def small_config(tmp_path, **harvest):
    raw = json.loads(preset_text("paper-meminerter"))
    raw["harvest"].update({"budget": 300, "steps_per_period": 200, **harvest})
    path = tmp_path / "small.json"
    path.write_text(json.dumps(raw))
    return path


@pytest.mark.parametrize("name", PRESETS)
def test_dump_preset_matches_configs(capsys, name):
    assert main(["--dump-preset", name]) == 0
    assert capsys.readouterr().out == (ROOT / "configs" / f"{name}.json").read_text()


@pytest.mark.parametrize("name", PRESETS)
def test_presets_parse(name):
    cfg = load_config(preset=name)
    assert cfg.harvest is not None and cfg.signal is not None


def test_simulate_reference_preset(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", "--preset", "paper-meminerter", "--out", str(tmp_path))
    assert code == 0
    assert out["total_energy_j"] == pytest.approx(-0.05575, abs=1e-4)
    assert out["labels"] == ["z", "p", "F", "v"]
    header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
    assert header == "t,x1,x2,u,y,power,energy"
    assert [lp["quadrant"] for lp in out["lissajous"]["loops"]] == ["III", "I", "III"]


def test_simulate_cycles_override(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", "--preset", "paper-meminerter", "--cycles", "3",
                       "--step-s", str(4 * 3.141592653589793 / 8000), "--out", str(tmp_path))
    assert code == 0
    assert out["total_energy_j"] == pytest.approx(3 * -0.05575, rel=1e-2)


def test_negative_step_is_config_error(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--preset", "paper-meminerter", "--step-s", "-1",
                       "--out", str(tmp_path))
    assert code == 1 and "step" in err


@pytest.mark.parametrize("preset, verdict", [
    ("paper-meminerter", "cyclo-passivity-violated"),
    ("linear-capacitor", "consistent-with-cyclo-passivity"),
])
def test_audit_verdicts(capsys, tmp_path, preset, verdict):
    code, out, _ = run(capsys, "audit", "--preset", preset, "--out", str(tmp_path))
    assert code == 0 and out["verdict"] == verdict
    assert json.loads((tmp_path / "energy_report.json").read_text()) == out


@pytest.mark.parametrize("preset, passive", [
    ("paper-meminerter", False),
    ("linear-capacitor", True),
    ("cubic-memcapacitor", False),
    ("nonlinear-meminductor", False),
])
def test_falsify_verdicts(capsys, tmp_path, preset, passive):
    code, out, _ = run(capsys, "falsify", "--preset", preset, "--out", str(tmp_path))
    assert code == 0 and out["is_cyclo_passive"] is passive
    assert (out["witness"] is None) == passive
    assert (tmp_path / "verdict.json").exists()


def test_optimize_reproducible(capsys, tmp_path):
    cfg = small_config(tmp_path)
    outs = []
    for d in ("a", "b"):
        code, out, _ = run(capsys, "optimize", "--config", str(cfg), "--out", str(tmp_path / d),
                           "--seed", "5")
        assert code == 0 and out["seed"] == 5 and out["budget"] == 300
        outs.append((tmp_path / d / "harvest_result.json").read_bytes())
        assert (tmp_path / d / "best_signal.json").exists()
    assert outs[0] == outs[1]


def test_unknown_key_rejected(capsys, tmp_path):
    raw = json.loads(preset_text("linear-capacitor"))
    raw["integrator"]["stepsize"] = 0.1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(raw))
    code, _, err = run(capsys, "simulate", "--config", str(path))
    assert code == 1 and "stepsize" in err


def test_json_syntax_error_reports_line(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "model": {\n    "kind": "mem-inerter",\n  }\n}\n')
    code, _, err = run(capsys, "falsify", "--config", str(path))
    assert code == 1 and "line 4" in err


def test_missing_file_and_bad_flags(capsys, tmp_path):
    assert run(capsys, "audit", "--config", str(tmp_path / "nope.json"))[0] == 1
    assert run(capsys, "audit")[0] == 1
    assert run(capsys, "nonsense")[0] == 1
    assert run(capsys)[0] == 1


def test_simulation_error_exit_code(capsys, tmp_path):
    raw = json.loads(preset_text("paper-meminerter"))
    # a large force drives the displacement out of the inerter domain
    raw["signal"]["harmonics"] = [[1, 300.0, 0.0]]
    path = tmp_path / "wild.json"
    path.write_text(json.dumps(raw))
    code, _, err = run(capsys, "simulate", "--config", str(path), "--out", str(tmp_path))
    assert code == 2 and "simulation error" in err


def test_parse_config_exclusive_keys():
    raw = json.loads(preset_text("linear-capacitor"))
    raw["integrator"]["step_s"] = 0.01
    with pytest.raises(ConfigError, match="only one"):
        parse_config(raw)


def test_optimize_needs_harvest_section(capsys, tmp_path):
    raw = json.loads(preset_text("linear-capacitor"))
    del raw["harvest"]
    path = tmp_path / "nh.json"
    path.write_text(json.dumps(raw))
    code, _, err = run(capsys, "optimize", "--config", str(path))
    assert code == 1 and "harvest" in err


def test_audit_withholds_verdict_on_open_cycle(capsys, tmp_path):
    raw = json.loads(preset_text("linear-capacitor"))
    # a pure sine current leaves a net charge integral: the first state does not return
    raw["signal"]["harmonics"] = [[1, 1.0, 0.0]]
    path = tmp_path / "open.json"
    path.write_text(json.dumps(raw))
    code, out, _ = run(capsys, "audit", "--config", str(path), "--out", str(tmp_path))
    assert code == 0
    assert out["verdict"] is None and "closure residual" in out["warning"]
