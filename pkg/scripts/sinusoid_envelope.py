"""Per-cycle energy under single-tone forcing F = A cos(w t) across
amplitudes and frequencies, for the mem-inerter.

Each row lists the supplied energy next to the closure residual; an open
cycle says nothing about passivity either way.
"""

import math

from memenergy.models import SingularityError, mem_inerter
from memenergy.signals import fourier
from memenergy.sim import SimulationError, audit, integrate


def main():
    model = mem_inerter(9381.7, 0.1)
    print(f"{'w [rad/s]':>10} {'A [N]':>8} {'E/cycle [J]':>14} {'residual':>10}  verdict")
    for w in (0.25, 0.5, 1.0, 2.0):
        period = 2 * math.pi / w
        for amp in (0.5, 1.0, 2.0, 5.0):
            sig = fourier(w, [(1, 0.0, amp)]).with_duration(period)
            try:
                traj = integrate(model, sig, (0.0, 0.0), period / 8000)
            except (SimulationError, SingularityError) as exc:
                print(f"{w:>10.2f} {amp:>8.2f} {'-':>14} {'-':>10}  {exc}")
                continue
            rep = audit(traj, period)
            print(f"{w:>10.2f} {amp:>8.2f} {rep.per_cycle_energy[0]:>+14.3e} "
                  f"{rep.closure_residual[0]:>10.1e}  {rep.verdict}")


if __name__ == "__main__":
    main()
