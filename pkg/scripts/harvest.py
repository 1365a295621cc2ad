"""Run the extraction search on every preset and compare with its
passivity verdict."""

import argparse

from memenergy.config import PRESETS, load_config
from memenergy.harvest import optimize, resimulate
from memenergy.passivity import falsify, state_grid
from memenergy.sim import audit


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--fine-steps", type=int, default=40000, help="steps per period for re-simulation")
    args = ap.parse_args()

    for name in PRESETS:
        cfg = load_config(preset=name)
        verdict = falsify(cfg.model, state_grid(cfg.model, cfg.x2_max, cfg.grid_points))
        res = optimize(cfg.harvest, budget=args.budget, seed=args.seed)
        fine = audit(resimulate(cfg.harvest, res.best_signal, args.fine_steps), cfg.harvest.period)
        print(f"{name}: cyclo-passive={verdict.is_cyclo_passive} "
              f"extracted={res.extracted_energy_per_cycle:.6g} J "
              f"(fine {-fine.per_cycle_energy[0]:.6g} J) residual={res.closure_residual:.1e}")
        for k, a, b in res.best_signal.harmonics:
            print(f"    k={k}: sin {a:+.4f}  cos {b:+.4f}")


if __name__ == "__main__":
    main()
