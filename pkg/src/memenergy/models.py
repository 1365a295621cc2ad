"""Input-affine state-space models of ideal memelements.

Every model has a two-dimensional state ``x = (x1, x2)``, input entering only
the second state equation, and an output that does not depend on the input::

    x1' = r(x1, x2)        x2' = u        y = h(x1, x2)

with ``r == h`` for the "dividing" kinds (voltage-controlled memcapacitor,
current-controlled meminductor, mem-inerter) and ``r = x2`` for the others.

The mem-inerter is realized through the Firestone (mobility) analogy, in
which velocity plays the role of voltage and force the role of current, so it
shares the voltage-controlled memcapacitor equations with C replaced by the
inertance B.  Under the Maxwell-Kelvin analogy it is equally a
current-controlled meminductor; that mapping has no separate constructor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constitutive import ConstitutiveCurve, DomainError, curve_from_dict, inertance_curve, polynomial

__all__ = [
    "KINDS",
    "SingularityError",
    "MemelementModel",
    "memcapacitor_voltage_controlled",
    "memcapacitor_charge_controlled",
    "meminductor_current_controlled",
    "meminductor_flux_controlled",
    "mem_inerter",
    "firestone_memcapacitor",
    "model_from_dict",
    "drift",
    "output",
    "input_direction",
]


class KindSpec(NamedTuple):
    role: str
    states: tuple[tuple[str, str], tuple[str, str]]
    input: tuple[str, str]
    output: tuple[str, str]
    divides: bool          # first-state rate is x2 / coefficient
    coefficient: str       # name of the element coefficient
    from_value: bool = False  # coefficient is the curve itself, not its derivative


KINDS: dict[str, KindSpec] = {
    "memcap-voltage-controlled": KindSpec(
        "rho-of-phi", (("phi", "Wb"), ("q", "C")), ("I", "A"), ("V", "V"), True, "C"),
    "memcap-charge-controlled": KindSpec(
        "phi-of-rho", (("rho", "C*s"), ("q", "C")), ("I", "A"), ("V", "V"), False, "K"),
    "memind-current-controlled": KindSpec(
        "sigma-of-q", (("q", "C"), ("phi", "Wb")), ("V", "V"), ("I", "A"), True, "L"),
    "memind-flux-controlled": KindSpec(
        "q-of-sigma", (("sigma", "Wb*s"), ("phi", "Wb")), ("V", "V"), ("I", "A"), False, "Gamma"),
    "mem-inerter": KindSpec(
        "inertance-displacement", (("z", "m"), ("p", "N*s")), ("F", "N"), ("v", "m/s"),
        True, "B", from_value=True),
}


class SingularityError(ArithmeticError):
    """State left the guarded domain or hit a non-positive divisor."""

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class MemelementModel:
    kind: str
    curve: ConstitutiveCurve

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {tuple(KINDS)}")
        need = KINDS[self.kind].role
        if self.curve.role != need:
            raise ValueError(f"{self.kind} needs a curve with role {need!r}, got {self.curve.role!r}")

    @property
    def spec(self) -> KindSpec:
        return KINDS[self.kind]

    @property
    def state_labels(self):
        return self.spec.states

    @property
    def input_label(self):
        return self.spec.input

    @property
    def output_label(self):
        return self.spec.output

    @property
    def divides(self) -> bool:
        return self.spec.divides

    # -- coefficient (C, K, L, Gamma or B) and its slope -----------------

    def _coef(self, x1):
        c = self.curve
        return c._value(x1) if self.spec.from_value else c._slope(x1)

    def _coef_slope(self, x1):
        c = self.curve
        return c._slope(x1) if self.spec.from_value else c._curvature(x1)

    def coefficient(self, x1):
        self.curve._check(x1)
        return self._coef(x1)

    def coefficient_slope(self, x1):
        self.curve._check(x1)
        return self._coef_slope(x1)

    def admissible(self, x1):
        """Mask of first-state values where drift and output are defined."""
        ok = self.curve.contains(x1)
        if not self.divides:
            return ok
        if np.ndim(x1) == 0:
            return bool(ok) and self._coef(x1) > 0
        safe = np.where(ok, x1, self.curve.domain[0])
        return ok & (self._coef(safe) > 0)

    # -- dynamics -------------------------------------------------------

    def rates(self, x1, x2, check: bool = True):
        """Return ``(x1', y)`` at the state; both are floats or arrays.

        With ``check=False`` the caller guarantees admissibility.
        """
        if check:
            try:
                self.curve._check(x1)
            except DomainError as exc:
                raise SingularityError(str(exc), state=(x1, x2)) from None
        coef = self._coef(x1)
        if self.divides:
            if check and np.any(coef <= 0):
                raise SingularityError(
                    f"{self.spec.coefficient}({self.state_labels[0][0]}={x1!r}) = {coef!r} is not positive",
                    state=(x1, x2))
            y = x2 / coef
            return y, y
        return x2, coef * x2

    def drift(self, x) -> np.ndarray:
        r, _ = self.rates(x[0], x[1])
        return np.array([r, 0.0 * r])

    def output(self, x):
        return self.rates(x[0], x[1])[1]

    def input_direction(self) -> np.ndarray:
        return np.array([0.0, 1.0])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "curve": self.curve.to_dict()}


def drift(model: MemelementModel, x) -> np.ndarray:
    return model.drift(x)


def output(model: MemelementModel, x):
    return model.output(x)


def input_direction(model: MemelementModel) -> np.ndarray:
    return model.input_direction()


def memcapacitor_voltage_controlled(curve: ConstitutiveCurve) -> MemelementModel:
    """``phi' = q/C(phi)``, ``q' = I``, ``V = q/C(phi)`` with ``C = d rho/d phi``."""
    return MemelementModel("memcap-voltage-controlled", curve)


def memcapacitor_charge_controlled(curve: ConstitutiveCurve) -> MemelementModel:
    """``rho' = q``, ``q' = I``, ``V = K(rho) q`` with ``K = d phi/d rho``."""
    return MemelementModel("memcap-charge-controlled", curve)


def meminductor_current_controlled(curve: ConstitutiveCurve) -> MemelementModel:
    return MemelementModel("memind-current-controlled", curve)


def meminductor_flux_controlled(curve: ConstitutiveCurve) -> MemelementModel:
    return MemelementModel("memind-flux-controlled", curve)


def mem_inerter(b0: float, w: float) -> MemelementModel:
    """Mem-inerter with inertance ``B(z) = b0 (w/2 - z)``.

    State is (displacement z [m], momentum p [N s]); input force F [N];
    output velocity v = p / B(z) [m/s].
    """
    return MemelementModel("mem-inerter", inertance_curve(b0, w))


def firestone_memcapacitor(model: MemelementModel) -> MemelementModel:
    """Voltage-controlled memcapacitor equivalent to an affine mem-inerter.

    The returned constitutive polynomial is the antiderivative of B, so that
    its derivative coefficients (hence C(phi)) coincide exactly with B.
    """
    if model.kind != "mem-inerter" or model.curve.form != "affine":
        raise ValueError("firestone mapping needs a mem-inerter with an affine inertance")
    b_off, b_slope = model.curve.coeffs
    rho = polynomial((0.0, b_off, b_slope / 2), model.curve.domain, role="rho-of-phi")
    return memcapacitor_voltage_controlled(rho)


def model_from_dict(d: dict) -> MemelementModel:
    """``{"kind": ..., "curve": {...}}``, or for the mem-inerter
    ``{"kind": "mem-inerter", "b0_kg": ..., "w_m": ...}``."""
    if not isinstance(d, dict):
        raise ValueError("model specification must be a mapping")
    kind = d.get("kind")
    if kind not in KINDS:
        raise ValueError(f"model 'kind' must be one of {tuple(KINDS)}, got {kind!r}")
    if kind == "mem-inerter" and "curve" not in d:
        extra = set(d) - {"kind", "b0_kg", "w_m"}
        if extra:
            raise ValueError(f"unknown key(s) in mem-inerter model: {sorted(extra)}")
        try:
            return mem_inerter(float(d["b0_kg"]), float(d["w_m"]))
        except KeyError as exc:
            raise ValueError(f"mem-inerter model is missing key {exc.args[0]!r}") from None
    extra = set(d) - {"kind", "curve"}
    if extra:
        raise ValueError(f"unknown key(s) in model: {sorted(extra)}")
    if "curve" not in d:
        raise ValueError("model is missing key 'curve'")
    return MemelementModel(kind, curve_from_dict(d["curve"], role=KINDS[kind].role))
