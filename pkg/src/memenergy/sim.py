"""Fixed-step RK4 simulation, energy audit and Lissajous loop analysis.

Supplied energy ``E(t) = int_0^t y u dt`` is carried as a third state and
advanced by the same Runge-Kutta stages as the model state, so the power is
sampled at the step ends and at the RK midpoints (Simpson weights) and the
quadrature is fourth-order consistent with the integrator.

Sign convention: positive energy is supplied *to* the device, negative energy
has been extracted from it.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .models import MemelementModel, SingularityError
from .signals import ExcitationSignal

__all__ = [
    "SimulationError",
    "Trajectory",
    "EnergyReport",
    "Loop",
    "LissajousData",
    "BatchResult",
    "integrate",
    "integrate_batch",
    "audit",
    "closure_residual",
    "lissajous_export",
    "signed_area",
    "CSV_HEADER",
]

CSV_HEADER = "t,x1,x2,u,y,power,energy"
VERDICT_OK = "consistent-with-cyclo-passivity"
VERDICT_VIOLATED = "cyclo-passivity-violated"


class SimulationError(RuntimeError):
    """Integration stopped early.

    ``trajectory`` holds the samples up to the last valid state; ``time``
    and ``state`` describe that state and ``step_index`` the failing step.
    """

    def __init__(self, message, trajectory=None, time=None, state=None, step_index=None):
        super().__init__(message)
        self.trajectory = trajectory
        self.time = time
        self.state = state
        self.step_index = step_index


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    x: np.ndarray          # (n, 2)
    u: np.ndarray
    y: np.ndarray
    power: np.ndarray
    energy: np.ndarray
    step: float
    labels: tuple[str, ...] = ("x1", "x2", "u", "y")

    def __len__(self):
        return len(self.t)

    def field(self, name: str) -> np.ndarray:
        """Column by generic name (``x1``, ``y``, ...) or physical label (``p``, ``v``, ...)."""
        cols = {"t": self.t, "x1": self.x[:, 0], "x2": self.x[:, 1], "u": self.u, "y": self.y,
                "power": self.power, "energy": self.energy}
        if name in cols:
            return cols[name]
        aliases = dict(zip(self.labels, ("x1", "x2", "u", "y")))
        if name in aliases:
            return cols[aliases[name]]
        raise KeyError(f"unknown trajectory field {name!r}; known: {sorted(cols) + list(self.labels)}")

    def to_csv(self, path=None) -> str:
        """Write ``t,x1,x2,u,y,power,energy`` rows at 17 significant digits."""
        data = np.column_stack([self.t, self.x, self.u, self.y, self.power, self.energy])
        buf = io.StringIO()
        np.savetxt(buf, data, fmt="%.17g", delimiter=",", header=CSV_HEADER, comments="")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path, labels=("x1", "x2", "u", "y")) -> "Trajectory":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        t = data[:, 0]
        step = float(t[1] - t[0]) if len(t) > 1 else 0.0
        return cls(t, data[:, 1:3], data[:, 3], data[:, 4], data[:, 5], data[:, 6], step, tuple(labels))


def _labels(model: MemelementModel):
    (s1, _), (s2, _) = model.state_labels
    return (s1, s2, model.input_label[0], model.output_label[0])


def _grid(duration: float, step: float) -> int:
    if not (step > 0 and math.isfinite(step)):
        raise ValueError(f"step must be positive and finite, got {step!r}")
    if not math.isfinite(duration):
        raise ValueError("signal has no finite duration")
    n = round(duration / step)
    if n < 1 or abs(n * step - duration) > 1e-9 * duration:
        raise ValueError(f"duration {duration!r} s is not an integer multiple of step {step!r} s")
    return n


def integrate(model: MemelementModel, signal: ExcitationSignal, x0, step: float) -> Trajectory:
    """Classical RK4 trajectory on ``[0, signal.duration]`` with uniform ``step``.

    Raises :class:`SimulationError` (carrying the partial trajectory) when the
    state leaves the model's guarded domain or becomes non-finite.
    """
    n = _grid(signal.duration, step)
    h = signal.duration / n
    # input at step ends and midpoints, exact times k*h/2
    uu = np.asarray(signal.evaluate(np.arange(2 * n + 1) * (h / 2)), dtype=float)
    u_end = uu[0::2].tolist()
    u_mid = uu[1::2].tolist()

    x1, x2 = float(x0[0]), float(x0[1])
    xs = np.empty((n + 1, 2))
    ys = np.empty(n + 1)
    es = np.empty(n + 1)
    rates = model.rates
    try:
        r, y = rates(x1, x2)
    except SingularityError as exc:
        raise SimulationError(f"initial state inadmissible: {exc}", time=0.0, state=(x1, x2),
                              step_index=0) from None
    xs[0] = x1, x2
    ys[0] = y
    es[0] = e = 0.0
    h2, h6 = h / 2, h / 6
    i = 0
    try:
        for i in range(n):
            ua, um, ub = u_end[i], u_mid[i], u_end[i + 1]
            r2, y2 = rates(x1 + h2 * r, x2 + h2 * ua)
            r3, y3 = rates(x1 + h2 * r2, x2 + h2 * um)
            r4, y4 = rates(x1 + h * r3, x2 + h * um)
            e += h6 * (y * ua + 2 * (y2 + y3) * um + y4 * ub)
            x1 += h6 * (r + 2 * (r2 + r3) + r4)
            x2 += h6 * (ua + 4 * um + ub)
            r, y = rates(x1, x2)
            if not math.isfinite(x1 + x2 + e + y):
                raise SimulationError(f"non-finite state at step {i + 1}", step_index=i + 1)
            xs[i + 1] = x1, x2
            ys[i + 1] = y
            es[i + 1] = e
    except (SingularityError, SimulationError) as exc:
        partial = _trajectory(model, h, xs[: i + 1], ys[: i + 1], es[: i + 1], uu[0::2][: i + 1])
        last = tuple(xs[i])
        raise SimulationError(f"integration stopped at t={i * h!r} s: {exc}", trajectory=partial,
                              time=i * h, state=last, step_index=i + 1) from None
    return _trajectory(model, h, xs, ys, es, uu[0::2])


def _trajectory(model, h, xs, ys, es, us):
    t = np.arange(len(xs)) * h
    return Trajectory(t, xs, us, ys, ys * us, es, h, _labels(model))


@dataclass(frozen=True)
class BatchResult:
    final_state: np.ndarray        # (m, 2)
    energy: np.ndarray             # (m,)
    closure_residual: np.ndarray   # (m,)
    failed: np.ndarray             # (m,) bool


def integrate_batch(model: MemelementModel, u_half: np.ndarray, x0, step: float) -> BatchResult:
    """Integrate ``m`` input sequences at once with the same RK4/energy scheme.

    ``u_half`` has shape ``(m, 2n + 1)``: input sampled every ``step / 2``.
    Members whose first state leaves the curve domain at any RK stage, or
    whose coefficient turns non-positive for a dividing kind, are flagged in
    ``failed`` rather than raising.  The closure residual is measured at the
    end of the horizon relative to ``x0`` (see :func:`closure_residual`).
    """
    u_half = np.atleast_2d(np.asarray(u_half, dtype=float))
    m, nn = u_half.shape
    n = (nn - 1) // 2
    h, h2, h6 = step, step / 2, step / 6
    x10, x20 = float(x0[0]), float(x0[1])
    x1 = np.full(m, x10)
    x2 = np.full(m, x20)
    e = np.zeros(m)
    lo, hi = model.curve.domain
    x1min = x1.copy()
    x1max = x1.copy()
    cmin = np.full(m, np.inf)
    exc1 = np.zeros(m)
    exc2 = np.zeros(m)
    coef = model._coef
    divides = model.divides

    def rates(a, b):
        np.minimum(x1min, a, out=x1min)
        np.maximum(x1max, a, out=x1max)
        c = coef(a)
        if divides:
            np.minimum(cmin, c, out=cmin)
            y = b / c
            return y, y
        return b, c * b

    with np.errstate(all="ignore"):
        r, y = rates(x1, x2)
        for i in range(n):
            ua, um, ub = u_half[:, 2 * i], u_half[:, 2 * i + 1], u_half[:, 2 * i + 2]
            r2, y2 = rates(x1 + h2 * r, x2 + h2 * ua)
            r3, y3 = rates(x1 + h2 * r2, x2 + h2 * um)
            r4, y4 = rates(x1 + h * r3, x2 + h * um)
            e = e + h6 * (y * ua + 2 * (y2 + y3) * um + y4 * ub)
            x1 = x1 + h6 * (r + 2 * (r2 + r3) + r4)
            x2 = x2 + h6 * (ua + 4 * um + ub)
            r, y = rates(x1, x2)
            np.maximum(exc1, np.abs(x1 - x10), out=exc1)
            np.maximum(exc2, np.abs(x2 - x20), out=exc2)
        failed = ~np.isfinite(x1 + x2 + e) | (x1min < lo) | (x1max > hi)
        if divides:
            failed |= ~(cmin > 0)
        res = np.maximum(_relative(np.abs(x1 - x10), exc1), _relative(np.abs(x2 - x20), exc2))
    final = np.column_stack([x1, x2])
    return BatchResult(final, e, np.where(failed, np.inf, res), failed)


def _relative(dev, scale):
    return np.where(scale > 0, dev / np.where(scale > 0, scale, 1.0), 0.0)


def closure_residual(x: np.ndarray, ref) -> float:
    """Return residual ``max_i |x_i(end) - ref_i| / max_t |x_i(t) - ref_i|``.

    Each state component is normalized by its largest excursion from the
    reference over the stretch ``x``; a component that never moves counts as
    closed.
    """
    dev = np.abs(np.asarray(x) - np.asarray(ref))
    scale = dev.max(axis=0)
    return float(np.max(_relative(dev[-1], scale)))


@dataclass(frozen=True)
class EnergyReport:
    per_cycle_energy: list[float]
    closure_residual: list[float]
    total_energy: float
    verdict: str | None
    tol_state: float
    tol_energy: float
    period: float
    warning: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def audit(traj: Trajectory, period: float, tol_state: float = 1e-4,
          tol_energy: float = 1e-3) -> EnergyReport:
    """Slice ``traj`` into whole periods and judge each cycle's energy balance.

    The verdict is ``cyclo-passivity-violated`` iff some cycle closes
    (residual < ``tol_state``) with supplied energy below ``-tol_energy``.
    When no closed cycle violates but some cycle fails to close, the verdict
    is withheld (``None``) and ``warning`` explains why.
    """
    m = period / traj.step
    k = round(m)
    if k < 1 or abs(k - m) > 1e-6 * m:
        raise ValueError(
            f"period {period!r} s is not an integer number of steps of {traj.step!r} s; "
            "choose the step as period / N")
    cycles = (len(traj) - 1) // k
    if cycles < 1:
        raise ValueError("trajectory is shorter than one period")
    x0 = traj.x[0]
    energies, residuals = [], []
    for c in range(cycles):
        a, b = c * k, (c + 1) * k
        energies.append(float(traj.energy[b] - traj.energy[a]))
        residuals.append(closure_residual(traj.x[a : b + 1], x0))
    closed = [r < tol_state for r in residuals]
    violated = any(ok and en < -tol_energy for en, ok in zip(energies, closed))
    warning = None
    if violated:
        verdict = VERDICT_VIOLATED
    elif all(closed):
        verdict = VERDICT_OK
    else:
        verdict = None
        bad = [i for i, ok in enumerate(closed) if not ok]
        warning = (f"closure residual >= {tol_state:g} on cycle(s) {bad}; "
                   "supplied energy over an open trajectory says nothing about cyclo-passivity")
    return EnergyReport(energies, residuals, float(traj.energy[cycles * k] - traj.energy[0]),
                        verdict, tol_state, tol_energy, period, warning)


def signed_area(x, y) -> float:
    """Shoelace area of the closed polygon through ``(x, y)``; counter-clockwise > 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True)
class Loop:
    start: int
    stop: int
    signed_area: float
    quadrant: str | None


@dataclass(frozen=True)
class LissajousData:
    axis_x: str
    axis_y: str
    x: np.ndarray
    y: np.ndarray
    loops: list[Loop] = field(default_factory=list)

    def pairs(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def to_dict(self) -> dict:
        return {"axis_x": self.axis_x, "axis_y": self.axis_y,
                "loops": [asdict(lp) for lp in self.loops]}


def _quadrant(x, y):
    mx, my = float(np.mean(x)), float(np.mean(y))
    if mx > 0 and my > 0:
        return "I"
    if mx < 0 and my > 0:
        return "II"
    if mx < 0 and my < 0:
        return "III"
    if mx > 0 and my < 0:
        return "IV"
    return None


def lissajous_export(traj: Trajectory, axis_x: str, axis_y: str,
                     pinch_tol: float = 1e-3) -> LissajousData:
    """Plot-ready ``(x, y)`` pairs plus the signed area of every loop.

    Loops are delimited by pinch points: sign changes of ``x`` at which the
    curve passes through the origin (``|y|`` at the interpolated crossing
    within ``pinch_tol`` of its range).  Without pinch points the whole
    curve is one loop.  Each loop is closed by a straight chord.
    """
    xs = np.asarray(traj.field(axis_x), dtype=float)
    ys = np.asarray(traj.field(axis_y), dtype=float)
    yscale = float(np.max(np.abs(ys))) or 1.0
    sx = np.sign(xs)
    for i in range(1, len(sx)):
        if sx[i] == 0:
            sx[i] = sx[i - 1]
    cuts = []
    for i in np.nonzero(sx[:-1] * sx[1:] < 0)[0]:
        f = xs[i] / (xs[i] - xs[i + 1])
        yc = ys[i] + f * (ys[i + 1] - ys[i])
        if abs(yc) <= pinch_tol * yscale:
            cuts.append((int(i), float(yc)))
    pieces = []
    a, head = 0, None
    for i, yc in cuts:
        pieces.append((a, i, head, yc))
        a, head = i + 1, yc
    pieces.append((a, len(xs) - 1, head, None))
    loops = []
    for a, b, head, tail in pieces:
        px, py = list(xs[a : b + 1]), list(ys[a : b + 1])
        if head is not None:
            px.insert(0, 0.0)
            py.insert(0, head)
        if tail is not None:
            px.append(0.0)
            py.append(tail)
        if len(px) >= 3:
            loops.append(Loop(a, b, signed_area(px, py), _quadrant(px, py)))
    return LissajousData(axis_x, axis_y, xs, ys, loops)
