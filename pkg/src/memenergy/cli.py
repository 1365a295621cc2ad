"""Command-line front end: ``memenergy {simulate,audit,falsify,optimize}``.

Exit codes: 0 success, 1 configuration error, 2 simulation/runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harvest, passivity, sim
from .config import PRESETS, ConfigError, RunConfig, load_config, preset_text

__all__ = ["main", "cmd_simulate", "cmd_audit", "cmd_falsify", "cmd_optimize"]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write(out_dir: str, name: str, text: str) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    path = path / name
    path.write_text(text)
    return path


def _simulate(cfg: RunConfig) -> sim.Trajectory:
    signal = cfg.require_signal()
    return sim.integrate(cfg.model, signal, cfg.x0, cfg.step_s)


def cmd_simulate(cfg: RunConfig) -> dict:
    traj = _simulate(cfg)
    csv_path = _write(cfg.out_dir, "trajectory.csv", traj.to_csv())
    liss = sim.lissajous_export(traj, "x2", "y")
    return {
        "kind": cfg.model.kind,
        "labels": list(traj.labels),
        "step_s": traj.step,
        "duration_s": float(traj.t[-1]),
        "samples": len(traj),
        "total_energy_j": float(traj.energy[-1]),
        "final_state": [float(v) for v in traj.x[-1]],
        "lissajous": liss.to_dict(),
        "trajectory_csv": str(csv_path),
    }


def cmd_audit(cfg: RunConfig) -> dict:
    traj = _simulate(cfg)
    if cfg.period_s is None:
        raise ConfigError("audit needs a periodic signal or 'audit.period_s'")
    report = sim.audit(traj, cfg.period_s, cfg.tol_state, cfg.tol_energy_j)
    out = report.to_dict()
    _write(cfg.out_dir, "energy_report.json", _dump(out))
    return out


def cmd_falsify(cfg: RunConfig) -> dict:
    grid = passivity.state_grid(cfg.model, cfg.x2_max, cfg.grid_points)
    verdict = passivity.falsify(cfg.model, grid)
    out = verdict.to_dict()
    _write(cfg.out_dir, "verdict.json", _dump(out))
    return out


def cmd_optimize(cfg: RunConfig) -> dict:
    if cfg.harvest is None:
        raise ConfigError("optimize needs a 'harvest' section")
    result = harvest.optimize(cfg.harvest, budget=cfg.budget, seed=cfg.seed)
    out = result.to_dict()
    out["seed"] = cfg.seed
    out["budget"] = cfg.budget
    _write(cfg.out_dir, "best_signal.json", _dump(result.best_signal.to_dict()))
    _write(cfg.out_dir, "harvest_result.json", _dump(out))
    return out


COMMANDS = {"simulate": cmd_simulate, "audit": cmd_audit, "falsify": cmd_falsify,
            "optimize": cmd_optimize}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", help="JSON run configuration")
    src.add_argument("--preset", choices=PRESETS, help="built-in configuration")
    common.add_argument("--out", help="output directory (default: config output.dir or ./out)")
    common.add_argument("--seed", type=int, help="optimizer seed")
    common.add_argument("--step-s", type=float, dest="step_s", help="integrator step [s]")
    common.add_argument("--cycles", type=int, help="number of fundamental periods")

    parser = argparse.ArgumentParser(
        prog="memenergy",
        description="Energy audits and passivity falsification for ideal memelements.")
    parser.add_argument("--dump-preset", choices=PRESETS, metavar="NAME",
                        help=f"print a preset configuration ({', '.join(PRESETS)})")
    sub = parser.add_subparsers(dest="command")
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__name__.replace("cmd_", ""))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    if args.dump_preset:
        sys.stdout.write(preset_text(args.dump_preset))
        return 0
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    try:
        cfg = load_config(args.config, args.preset, step_s=args.step_s, cycles=args.cycles,
                          seed=args.seed, out=args.out)
        out = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # grid/step mismatches surface as ValueError from the library
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (sim.SimulationError, ArithmeticError, RuntimeError) as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(_dump(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
