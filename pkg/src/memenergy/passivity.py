"""Storage-function checks and (cyclo-)passivity falsification.

For an input-affine system ``x' = f(x) + g(x) u, y = h(x)`` a differentiable
storage function ``S`` certifies cyclo-passivity with respect to ``y u`` iff

    h(x) = g(x)^T dS/dx(x)      and      dS/dx(x)^T f(x) <= 0.

With ``g = (0, 1)`` the equality forces ``dS/dx2 = h``, so every candidate
storage for the memelement models is

    S(x1, x2) = 1/2 * c(x1) * x2**2 + G(x1)

with ``c = K`` or ``Gamma`` for the non-dividing kinds and ``c = 1/C``,
``1/L`` or ``1/B`` for the dividing ones.  The drift term then contains
``1/2 * c'(x1) * x2**2 * r(x1, x2)``, which is cubic in ``x2`` and cannot be
cancelled by ``G'`` unless ``c'`` vanishes, i.e. unless the constitutive
relation is affine.  :func:`falsify` turns this into an explicit witness.

The available-storage style quantities (required supply, available storage
relative to a ground state) are existence-level characterizations and are
not computed here.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .constitutive import ConstitutiveCurve
from .models import MemelementModel

__all__ = [
    "StorageAnsatz",
    "StateGrid",
    "ConditionCheck",
    "Witness",
    "PassivityVerdict",
    "storage_ansatz",
    "state_grid",
    "check_output_condition",
    "check_drift_condition",
    "drift_supply",
    "falsify",
    "AFFINE_TOL",
    "MIN_GRID",
]

AFFINE_TOL = 1e-9
MIN_GRID = 16
GRID_POINTS = 256


@dataclass(frozen=True)
class StorageAnsatz:
    """``S = 1/2 * quadratic(x1) * x2**2 + free_term(x1)``.

    ``quadratic`` and ``quadratic_slope`` are callables of the first state;
    ``free_term`` is a curve (polynomial or table) or ``None`` for a constant.
    """

    quadratic: Callable
    quadratic_slope: Callable
    free_term: ConstitutiveCurve | None = None

    def value(self, x1, x2):
        s = 0.5 * self.quadratic(x1) * x2**2
        if self.free_term is not None:
            s = s + self.free_term._value(x1)
        return s

    def gradient(self, x1, x2):
        """``(dS/dx1, dS/dx2)``."""
        d1 = 0.5 * self.quadratic_slope(x1) * x2**2
        if self.free_term is not None:
            d1 = d1 + self.free_term._slope(x1)
        return d1, self.quadratic(x1) * x2


def storage_ansatz(model: MemelementModel, free_term: ConstitutiveCurve | None = None) -> StorageAnsatz:
    """The only storage family compatible with the output condition for ``model``."""
    if model.divides:
        def quad(x1):
            return 1.0 / model._coef(x1)

        def quad_slope(x1):
            c = model._coef(x1)
            return -model._coef_slope(x1) / (c * c)
    else:
        quad, quad_slope = model._coef, model._coef_slope
    return StorageAnsatz(quad, quad_slope, free_term)


@dataclass(frozen=True)
class StateGrid:
    """Tensor grid of first-state values ``x1`` and second-state values ``x2``."""

    x1: np.ndarray
    x2: np.ndarray

    def points(self):
        a, b = np.meshgrid(self.x1, self.x2, indexing="ij")
        return a.ravel(), b.ravel()


def state_grid(model: MemelementModel, x2_max: float, n: int = GRID_POINTS,
               n2: int | None = None) -> StateGrid:
    """``n`` points over the curve domain times a symmetric ``[-x2_max, x2_max]``.

    For dividing kinds the points where the coefficient is not positive are
    dropped.
    """
    if x2_max <= 0:
        raise ValueError("x2_max must be positive")
    lo, hi = model.curve.domain
    x1 = np.linspace(lo, hi, n)
    x1 = x1[model.admissible(x1)]
    return StateGrid(x1, np.linspace(-x2_max, x2_max, n2 or n))


def _check_grid(model, grid):
    if np.any(~model.admissible(np.asarray(grid.x1))):
        lo, hi = model.curve.domain
        raise ValueError(f"grid leaves the model domain [{lo!r}, {hi!r}]")


@dataclass(frozen=True)
class ConditionCheck:
    value: float
    state: tuple[float, float]


def check_output_condition(model: MemelementModel, storage, grid: StateGrid) -> ConditionCheck:
    """Largest ``|h(x) - g(x)^T dS/dx(x)|`` on the grid and where it occurs."""
    _check_grid(model, grid)
    x1, x2 = grid.points()
    _, h = model.rates(x1, x2)
    _, ds2 = storage.gradient(x1, x2)
    res = np.abs(h - ds2)  # g = (0, 1)
    i = int(np.argmax(res))
    return ConditionCheck(float(res[i]), (float(x1[i]), float(x2[i])))


def drift_supply(model: MemelementModel, storage, x1, x2):
    """``dS/dx(x)^T f(x)``; positive values violate the dissipation inequality."""
    r, _ = model.rates(x1, x2)
    ds1, _ = storage.gradient(x1, x2)
    return ds1 * r  # f = (r, 0)


def check_drift_condition(model: MemelementModel, storage, grid: StateGrid) -> ConditionCheck:
    """Grid point maximizing ``dS/dx^T f`` and that maximum."""
    _check_grid(model, grid)
    x1, x2 = grid.points()
    vals = drift_supply(model, storage, x1, x2)
    i = int(np.argmax(vals))
    return ConditionCheck(float(vals[i]), (float(x1[i]), float(x2[i])))


@dataclass(frozen=True)
class Witness:
    state: tuple[float, float]
    value: float        # model output at the state (V, I or v)
    violation: float    # dS/dx^T f at the state, > 0


@dataclass(frozen=True)
class PassivityVerdict:
    is_cyclo_passive: bool
    witness: Witness | None
    affine_check: bool
    tolerances: dict

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def falsify(model: MemelementModel, grid: StateGrid | None = None,
            free_term: ConstitutiveCurve | None = None, x2_start: float | None = None,
            affine_tol: float = AFFINE_TOL, max_doublings: int = 200) -> PassivityVerdict:
    """Decide cyclo-passivity of a memelement model from its constitutive curve.

    The curve is affine on the grid when
    ``max|c'| * W**2 < affine_tol * max|c| * W`` (``c`` the element
    coefficient, ``W`` the domain width).  Otherwise a witness is built at
    the grid point with the largest ``|c'|``: the second state starts at
    ``x2_start`` (default: the largest grid magnitude), takes the sign that
    makes the cubic term positive and is doubled until ``dS/dx^T f > 0`` for
    the ansatz with ``free_term``.
    """
    if grid is None:
        grid = state_grid(model, 1.0)
    x1 = np.asarray(grid.x1, dtype=float)
    if len(x1) < MIN_GRID:
        raise ValueError(f"grid too coarse: {len(x1)} first-state points, need >= {MIN_GRID}")
    _check_grid(model, grid)
    width = float(x1.max() - x1.min()) or model.curve.width
    coef = np.abs(model._coef(x1))
    slope = np.abs(model._coef_slope(x1))
    affine = bool(slope.max() * width**2 < affine_tol * coef.max() * width)
    tolerances = {"affine_tol": affine_tol, "grid_points": int(len(x1))}
    if affine:
        return PassivityVerdict(True, None, True, tolerances)

    storage = storage_ansatz(model, free_term)
    order = np.argsort(-slope, kind="stable")
    for i in order[: max(1, len(order) // 4)]:
        a = float(x1[i])
        if slope[i] == 0:
            break
        s = float(x2_start if x2_start is not None else np.max(np.abs(grid.x2)))
        for _ in range(max_doublings):
            best = None
            for b in (s, -s):
                v = float(drift_supply(model, storage, a, b))
                if v > 0 and (best is None or v > best[1]):
                    best = (b, v)
            if best is not None:
                b, v = best
                y = float(model.rates(a, b)[1])
                return PassivityVerdict(False, Witness((a, b), y, v), False, tolerances)
            s *= 2.0
    raise RuntimeError("non-affine curve but no violating state found; widen the grid")
