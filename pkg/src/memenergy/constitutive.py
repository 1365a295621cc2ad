"""Constitutive relations of energy-storing memelements.

A :class:`ConstitutiveCurve` is a scalar function on a closed interval,
together with its first and second derivatives.  Three forms are supported:
polynomial (ascending coefficients), affine (offset + slope) and tabulated
(monotone piecewise-cubic Hermite interpolation through sample pairs).

Evaluation outside the interval raises :class:`DomainError`; curves never
extrapolate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = [
    "ROLES",
    "DomainError",
    "ConstitutiveCurve",
    "polynomial",
    "affine",
    "table",
    "inertance_curve",
    "evaluate",
    "derivative",
    "curve_from_dict",
]

# role -> name of the independent variable
ROLES = {
    "rho-of-phi": "phi",
    "phi-of-rho": "rho",
    "sigma-of-q": "q",
    "q-of-sigma": "sigma",
    "inertance-displacement": "z",
}

FORMS = ("polynomial", "affine", "table")

# fraction of the working width cut from the upper end of the inertance domain
INERTANCE_MARGIN = 1e-3


class DomainError(ValueError):
    """Raised when a curve is evaluated outside its closed domain."""


def _horner(coeffs, x):
    # coeffs in ascending order; works for floats and arrays alike
    acc = coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * x + c
    if len(coeffs) == 1:
        return acc + 0.0 * x
    return acc


def _poly_deriv(coeffs: tuple[float, ...]) -> tuple[float, ...]:
    if len(coeffs) <= 1:
        return (0.0,)
    return tuple(k * c for k, c in enumerate(coeffs) if k > 0)


@dataclass(frozen=True)
class ConstitutiveCurve:
    """Immutable scalar curve with exact (analytic forms) derivatives.

    Parameters
    ----------
    form : {"polynomial", "affine", "table"}
    domain : (lo, hi)
        Closed interval of the independent variable.
    role : str or None
        One of :data:`ROLES`, or ``None`` for a free function (e.g. the
        additive term of a storage function).
    coeffs : tuple of float
        Ascending polynomial coefficients.  For the affine form this is
        ``(offset, slope)``.
    points : tuple of (x, y)
        Sorted sample pairs, table form only.
    """

    form: str
    domain: tuple[float, float]
    role: str | None = None
    coeffs: tuple[float, ...] = ()
    points: tuple[tuple[float, float], ...] = ()
    _d1: Any = field(default=None, init=False, repr=False, compare=False)
    _d2: Any = field(default=None, init=False, repr=False, compare=False)
    _interp: Any = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown curve form {self.form!r}; expected one of {FORMS}")
        if self.role is not None and self.role not in ROLES:
            raise ValueError(f"unknown curve role {self.role!r}; expected one of {tuple(ROLES)}")
        lo, hi = (float(v) for v in self.domain)
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError(f"curve domain must be a finite interval lo < hi, got {self.domain}")
        object.__setattr__(self, "domain", (lo, hi))

        if self.form == "table":
            pts = np.asarray(self.points, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
                raise ValueError("table curve needs at least two (x, y) pairs")
            if np.any(np.diff(pts[:, 0]) <= 0):
                raise ValueError("table abscissae must be strictly increasing")
            if not np.all(np.isfinite(pts)):
                raise ValueError("table points must be finite")
            if pts[0, 0] != lo or pts[-1, 0] != hi:
                raise ValueError("table domain must span exactly the first and last abscissae")
            interp = PchipInterpolator(pts[:, 0], pts[:, 1], extrapolate=False)
            object.__setattr__(self, "points", tuple(map(tuple, pts.tolist())))
            object.__setattr__(self, "_interp", interp)
            object.__setattr__(self, "_d1", interp.derivative(1))
            object.__setattr__(self, "_d2", interp.derivative(2))
            return

        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs or not all(np.isfinite(coeffs)):
            raise ValueError("analytic curve needs finite coefficients")
        if self.form == "affine" and len(coeffs) != 2:
            raise ValueError("affine curve takes exactly (offset, slope)")
        object.__setattr__(self, "coeffs", coeffs)
        d1 = _poly_deriv(coeffs)
        object.__setattr__(self, "_d1", d1)
        object.__setattr__(self, "_d2", _poly_deriv(d1))

    # -- domain ---------------------------------------------------------

    @property
    def variable(self) -> str:
        return ROLES.get(self.role, "x")

    @property
    def width(self) -> float:
        return self.domain[1] - self.domain[0]

    def contains(self, x):
        lo, hi = self.domain
        return (x >= lo) & (x <= hi)

    def _check(self, x):
        lo, hi = self.domain
        if np.ndim(x) == 0:
            if not lo <= x <= hi:
                raise DomainError(
                    f"{self.variable}={float(x)!r} outside curve domain [{lo!r}, {hi!r}]")
            return
        x = np.asarray(x)
        bad = ~self.contains(x)
        if bad.any():
            first = float(x[bad].flat[0])
            raise DomainError(
                f"{self.variable}={first!r} outside curve domain [{lo!r}, {hi!r}]"
                f" ({int(bad.sum())} offending points)")

    # -- unchecked kernels (callers guarantee the domain) ---------------

    def _value(self, x):
        if self.form == "affine":
            return self.coeffs[0] + self.coeffs[1] * x
        if self.form == "polynomial":
            return _horner(self.coeffs, x)
        return self._table(self._interp, x)

    def _slope(self, x):
        if self.form == "affine":
            return self.coeffs[1] + 0.0 * x
        if self.form == "polynomial":
            return _horner(self._d1, x)
        return self._table(self._d1, x)

    def _curvature(self, x):
        if self.form == "affine":
            return 0.0 * x
        if self.form == "polynomial":
            return _horner(self._d2, x)
        return self._table(self._d2, x)

    @staticmethod
    def _table(pp, x):
        out = pp(x)
        return float(out) if np.ndim(x) == 0 else out

    # -- public evaluation ----------------------------------------------

    def evaluate(self, x):
        """Curve value at ``x`` (scalar or array)."""
        self._check(x)
        return self._value(x)

    __call__ = evaluate

    def derivative(self, x):
        """First derivative at ``x``: C, K, L, Gamma, or dB/dz by role."""
        self._check(x)
        return self._slope(x)

    def second_derivative(self, x):
        self._check(x)
        return self._curvature(x)

    def is_affine_form(self) -> bool:
        return self.form == "affine" or (
            self.form == "polynomial" and all(c == 0.0 for c in self.coeffs[2:]))

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"form": self.form}
        if self.role is not None:
            d["role"] = self.role
        if self.form == "table":
            d["points"] = [list(p) for p in self.points]
        elif self.form == "affine":
            d["offset"], d["slope"] = self.coeffs
            d["domain"] = list(self.domain)
        else:
            d["coeffs"] = list(self.coeffs)
            d["domain"] = list(self.domain)
        return d


def polynomial(coeffs: Sequence[float], domain, role: str | None = None) -> ConstitutiveCurve:
    """Polynomial curve, coefficients in ascending order of power."""
    return ConstitutiveCurve("polynomial", tuple(domain), role, coeffs=tuple(coeffs))


def affine(offset: float, slope: float, domain, role: str | None = None) -> ConstitutiveCurve:
    return ConstitutiveCurve("affine", tuple(domain), role, coeffs=(offset, slope))


def table(points, role: str | None = None) -> ConstitutiveCurve:
    """Monotone cubic (PCHIP) interpolant through sorted ``(x, y)`` pairs."""
    pts = tuple(tuple(map(float, p)) for p in points)
    if len(pts) < 2:
        raise ValueError("table curve needs at least two (x, y) pairs")
    return ConstitutiveCurve("table", (pts[0][0], pts[-1][0]), role, points=pts)


def inertance_curve(b0: float, w: float) -> ConstitutiveCurve:
    """Displacement-dependent inertance ``B(z) = b0 * (w/2 - z)``.

    The domain stops ``INERTANCE_MARGIN * w`` short of ``z = w/2`` where the
    inertance vanishes, so ``B`` stays strictly positive on it.
    """
    if not (b0 > 0 and np.isfinite(b0)):
        raise ValueError(f"base inertance b0 must be positive, got {b0!r}")
    if not (w > 0 and np.isfinite(w)):
        raise ValueError(f"working width w must be positive, got {w!r}")
    domain = (-w / 2, w / 2 - INERTANCE_MARGIN * w)
    return affine(b0 * (w / 2), -b0, domain, role="inertance-displacement")


def evaluate(curve: ConstitutiveCurve, x):
    return curve.evaluate(x)


def derivative(curve: ConstitutiveCurve, x):
    return curve.derivative(x)


_CURVE_KEYS = {
    "polynomial": {"form", "role", "coeffs", "domain"},
    "affine": {"form", "role", "offset", "slope", "domain"},
    "table": {"form", "role", "points"},
}


def curve_from_dict(d: dict, role: str | None = None) -> ConstitutiveCurve:
    """Build a curve from its configuration mapping.

    ``role`` fills in the role when the mapping does not name one; a
    mapping that names a different role is rejected.
    """
    if not isinstance(d, dict):
        raise ValueError("curve specification must be a mapping")
    form = d.get("form")
    if form not in _CURVE_KEYS:
        raise ValueError(f"curve 'form' must be one of {tuple(_CURVE_KEYS)}, got {form!r}")
    extra = set(d) - _CURVE_KEYS[form]
    if extra:
        raise ValueError(f"unknown key(s) in {form} curve: {sorted(extra)}")
    given = d.get("role")
    if given is not None and role is not None and given != role:
        raise ValueError(f"curve role {given!r} does not match required role {role!r}")
    role = given if given is not None else role
    try:
        if form == "table":
            return table(d["points"], role)
        if form == "affine":
            return affine(d["offset"], d["slope"], d["domain"], role)
        return polynomial(d["coeffs"], d["domain"], role)
    except KeyError as exc:
        raise ValueError(f"{form} curve is missing key {exc.args[0]!r}") from None
