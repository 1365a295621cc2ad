"""Strict JSON run configuration and built-in presets.

Every section rejects unknown keys.  Keys with a fixed physical unit carry it
as a suffix (``step_s``, ``omega_rad_s``, ``b0_kg``); keys whose unit follows
the model kind (``x0``, ``x2_max``, ``amplitude_bound``) are in the units of
the model's state/input labels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .harvest import HarvestProblem, problem_from_dict
from .models import MemelementModel, model_from_dict
from .signals import ExcitationSignal, signal_from_dict

__all__ = ["ConfigError", "RunConfig", "PRESETS", "preset_text", "load_config", "parse_config"]

PRESETS = ("paper-meminerter", "linear-capacitor", "cubic-memcapacitor", "nonlinear-meminductor")

_SECTIONS = {
    "model": None,
    "signal": None,
    "integrator": {"step_s", "steps_per_period", "duration_s", "cycles", "x0"},
    "audit": {"tol_state", "tol_energy_j", "period_s"},
    "falsify": {"x2_max", "grid_points"},
    "harvest": {"omega_rad_s", "harmonics", "amplitude_bound", "cycles", "steps_per_period",
                "penalty_weight", "budget", "seed"},
    "output": {"dir"},
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key or line."""


@dataclass(frozen=True)
class RunConfig:
    model: MemelementModel
    signal: ExcitationSignal | None
    step_s: float | None
    duration_s: float | None
    x0: tuple[float, float]
    tol_state: float
    tol_energy_j: float
    period_s: float | None
    x2_max: float
    grid_points: int
    harvest: HarvestProblem | None
    budget: int
    seed: int
    out_dir: str

    def require_signal(self) -> ExcitationSignal:
        if self.signal is None or self.step_s is None or self.duration_s is None:
            raise ConfigError("this command needs 'signal' and 'integrator' sections")
        return self.signal


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return resources.files("memenergy.presets").joinpath(f"{name}.json").read_text()


def load_config(path=None, preset=None, **overrides) -> RunConfig:
    """Read a config file or a preset and apply command-line overrides."""
    if (path is None) == (preset is None):
        raise ConfigError("give exactly one of --config or --preset")
    if preset is not None:
        text, where = preset_text(preset), f"preset {preset}"
    else:
        try:
            text, where = Path(path).read_text(), str(path)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{where}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(raw, where=where, **overrides)


def _number(sec, key, value, where, kind=float, positive=True):
    name = f"'{sec}.{key}'" if key else sec
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: {name} must be a number, got {value!r}")
    if kind is int and int(value) != value:
        raise ConfigError(f"{where}: {name} must be an integer, got {value!r}")
    value = kind(value)
    if not math.isfinite(value) or (positive and value <= 0):
        raise ConfigError(f"{where}: {name} must be positive and finite, got {value!r}")
    return value


def parse_config(raw: dict, where: str = "config", step_s=None, cycles=None, seed=None,
                 out=None) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: top level must be a JSON object")
    unknown = set(raw) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"{where}: unknown section(s) {sorted(unknown)}")
    for sec, keys in _SECTIONS.items():
        if keys is not None and sec in raw:
            if not isinstance(raw[sec], dict):
                raise ConfigError(f"{where}: section '{sec}' must be an object")
            bad = set(raw[sec]) - keys
            if bad:
                raise ConfigError(f"{where}: unknown key(s) in '{sec}': {sorted(bad)}")
    if "model" not in raw:
        raise ConfigError(f"{where}: missing section 'model'")
    try:
        model = model_from_dict(raw["model"])
    except ValueError as exc:
        raise ConfigError(f"{where}: model: {exc}") from None

    integ = raw.get("integrator", {})
    if "step_s" in integ and "steps_per_period" in integ:
        raise ConfigError(f"{where}: give only one of 'integrator.step_s' and 'integrator.steps_per_period'")
    if "duration_s" in integ and "cycles" in integ:
        raise ConfigError(f"{where}: give only one of 'integrator.duration_s' and 'integrator.cycles'")
    x0 = integ.get("x0", [0.0, 0.0])
    if not (isinstance(x0, list) and len(x0) == 2):
        raise ConfigError(f"{where}: 'integrator.x0' must be a two-element list")
    x0 = tuple(_number("integrator", "x0", v, where, positive=False) for v in x0)

    aud = raw.get("audit", {})
    period = _number("audit", "period_s", aud["period_s"], where) if "period_s" in aud else None

    signal = None
    step = duration = None
    if "signal" in raw:
        try:
            signal = signal_from_dict(raw["signal"])
        except ValueError as exc:
            raise ConfigError(f"{where}: signal: {exc}") from None
        period = period or signal.period
        if cycles is not None:
            n_cycles = _number("--cycles", "", cycles, where, kind=int)
        elif "cycles" in integ:
            n_cycles = _number("integrator", "cycles", integ["cycles"], where, kind=int)
        else:
            n_cycles = None
        if n_cycles is not None:
            if period is None:
                raise ConfigError(f"{where}: 'cycles' needs a periodic signal or 'audit.period_s'")
            duration = n_cycles * period
        elif "duration_s" in integ:
            duration = _number("integrator", "duration_s", integ["duration_s"], where)
        else:
            raise ConfigError(f"{where}: integrator needs 'cycles' or 'duration_s'")
        if step_s is not None:
            step = _number("--step-s", "", step_s, where)
        elif "step_s" in integ:
            step = _number("integrator", "step_s", integ["step_s"], where)
        elif "steps_per_period" in integ:
            if period is None:
                raise ConfigError(f"{where}: 'steps_per_period' needs a periodic signal")
            step = period / _number("integrator", "steps_per_period", integ["steps_per_period"],
                                    where, kind=int)
        else:
            raise ConfigError(f"{where}: integrator needs 'step_s' or 'steps_per_period'")
        signal = signal.with_duration(duration)
    elif step_s is not None or cycles is not None:
        raise ConfigError(f"{where}: --step-s/--cycles need a 'signal' section")

    harvest = None
    hv = dict(raw.get("harvest", {}))
    budget = _number("harvest", "budget", hv.pop("budget", 5000), where, kind=int)
    cfg_seed = hv.pop("seed", 42)
    if "harvest" in raw:
        try:
            harvest = problem_from_dict({**hv, "x0": list(x0)}, model=model)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{where}: harvest: {exc}") from None
    seed = seed if seed is not None else cfg_seed
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"{where}: seed must be a non-negative integer, got {seed!r}")

    fal = raw.get("falsify", {})
    return RunConfig(
        model=model,
        signal=signal,
        step_s=step,
        duration_s=duration,
        x0=x0,
        tol_state=_number("audit", "tol_state", aud.get("tol_state", 1e-4), where),
        tol_energy_j=_number("audit", "tol_energy_j", aud.get("tol_energy_j", 1e-3), where),
        period_s=period,
        x2_max=_number("falsify", "x2_max", fal.get("x2_max", 1.0), where),
        grid_points=_number("falsify", "grid_points", fal.get("grid_points", 256), where, kind=int),
        harvest=harvest,
        budget=budget,
        seed=seed,
        out_dir=out if out is not None else raw.get("output", {}).get("dir", "out"),
    )
