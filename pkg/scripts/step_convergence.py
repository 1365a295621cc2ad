"""Per-cycle energy of the mem-inerter run versus step size, and the
observed RK4 order on the analytic linear-capacitor case."""

import math

import numpy as np

from memenergy.constitutive import affine
from memenergy.models import mem_inerter, memcapacitor_charge_controlled
from memenergy.signals import fourier, reference_force_profile
from memenergy.sim import integrate

T = 4 * math.pi


def main():
    model, force = mem_inerter(9381.7, 0.1), reference_force_profile()
    ref = integrate(model, force, (0.0, 0.0), T / 160000).energy[-1]
    print("steps/period   energy [J]          |E - E_ref|")
    for n in (100, 400, 1000, 4000, 10000, 40000, 80000):
        e = integrate(model, force, (0.0, 0.0), T / n).energy[-1]
        print(f"{n:>12d}   {e:+.12f}   {abs(e - ref):.2e}")

    cap = memcapacitor_charge_controlled(affine(0.0, 2.0, (-5, 5), "phi-of-rho"))
    sig = fourier(1.0, [(1, 0.0, 1.0)]).with_duration(2 * math.pi)
    prev = None
    print("\nlinear capacitor, u = cos t")
    for n in (16, 32, 64, 128, 256, 512):
        tr = integrate(cap, sig, (0.0, 0.0), 2 * math.pi / n)
        err = np.abs(tr.x - np.column_stack([1 - np.cos(tr.t), np.sin(tr.t)])).max()
        order = "" if prev is None else f"   order {math.log2(prev / err):.3f}"
        print(f"{n:>5d} steps: max state error {err:.3e}{order}")
        prev = err


if __name__ == "__main__":
    main()
