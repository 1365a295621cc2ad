"""Scalar excitation signals: finite Fourier series, constants, piecewise-linear."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = ["ExcitationSignal", "fourier", "constant", "piecewise_linear", "fourier_eval",
           "signal_from_dict", "reference_force_profile", "REFERENCE_HARMONICS", "REFERENCE_OMEGA"]

SIGNAL_FORMS = ("fourier", "constant", "piecewise-linear")

# (k, sine coefficient, cosine coefficient) [N] of the mem-inerter force profile
REFERENCE_HARMONICS = ((1, 2.5, -0.25), (2, -5.0, -1.25), (3, 0.0, 2.75), (4, 0.0, -1.25))
REFERENCE_OMEGA = 0.5


@dataclass(frozen=True)
class ExcitationSignal:
    """Time-parameterized scalar input on ``[0, duration]``.

    Fourier form: ``u(t) = sum_k a_k sin(k w t) + b_k cos(k w t)`` with
    ``harmonics = ((k, a_k, b_k), ...)``.  Without a ``k = 0`` term the mean
    over any whole number of periods ``2 pi / w`` is exactly zero.
    """

    form: str
    duration: float = math.inf
    omega: float = 0.0
    harmonics: tuple[tuple[int, float, float], ...] = ()
    value: float = 0.0
    points: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.form not in SIGNAL_FORMS:
            raise ValueError(f"unknown signal form {self.form!r}; expected one of {SIGNAL_FORMS}")
        if not self.duration > 0:
            raise ValueError(f"signal duration must be positive, got {self.duration!r}")
        if self.form == "fourier":
            if not (self.omega > 0 and math.isfinite(self.omega)):
                raise ValueError(f"base frequency must be positive, got {self.omega!r}")
            h = []
            for term in self.harmonics:
                k, a, b = term
                if int(k) != k or k < 0:
                    raise ValueError(f"harmonic index must be a non-negative integer, got {k!r}")
                h.append((int(k), float(a), float(b)))
            object.__setattr__(self, "harmonics", tuple(h))
        elif self.form == "piecewise-linear":
            pts = tuple((float(t), float(u)) for t, u in self.points)
            if len(pts) < 2 or any(t1 <= t0 for (t0, _), (t1, _) in zip(pts, pts[1:])):
                raise ValueError("piecewise-linear signal needs >= 2 points with increasing times")
            object.__setattr__(self, "points", pts)

    @property
    def period(self) -> float | None:
        return 2 * math.pi / self.omega if self.form == "fourier" else None

    @property
    def is_zero_mean(self) -> bool:
        return self.form == "fourier" and all(k > 0 or b == 0.0 for k, _, b in self.harmonics)

    def with_duration(self, duration: float) -> "ExcitationSignal":
        return replace(self, duration=float(duration))

    def _check(self, t):
        tol = 1e-9 * max(1.0, self.duration if math.isfinite(self.duration) else 1.0)
        tmin, tmax = np.min(t), np.max(t)
        if tmin < -tol or tmax > self.duration + tol:
            raise ValueError(f"t outside signal horizon [0, {self.duration!r}]")

    def evaluate(self, t):
        """Signal value at ``t`` (scalar or array)."""
        self._check(t)
        if self.form == "constant":
            return self.value + 0.0 * np.asarray(t) if np.ndim(t) else self.value
        if self.form == "piecewise-linear":
            ts, us = zip(*self.points)
            out = np.interp(t, ts, us)
            return float(out) if np.ndim(t) == 0 else out
        tt = np.asarray(t, dtype=float)
        out = np.zeros_like(tt)
        for k, a, b in self.harmonics:
            arg = k * self.omega * tt
            if a:
                out = out + a * np.sin(arg)
            if b:
                out = out + b * np.cos(arg)
        return float(out) if np.ndim(t) == 0 else out

    __call__ = evaluate

    def integral(self, t):
        """Exact ``int_0^t u(s) ds`` for the Fourier and constant forms."""
        if self.form == "constant":
            return self.value * np.asarray(t, dtype=float)
        if self.form != "fourier":
            raise NotImplementedError("closed-form integral only for fourier and constant signals")
        tt = np.asarray(t, dtype=float)
        out = np.zeros_like(tt)
        for k, a, b in self.harmonics:
            if k == 0:
                out = out + b * tt
                continue
            kw = k * self.omega
            out = out + a * (1 - np.cos(kw * tt)) / kw + b * np.sin(kw * tt) / kw
        return float(out) if np.ndim(t) == 0 else out

    def to_dict(self) -> dict:
        if self.form == "fourier":
            return {"form": "fourier", "omega_rad_s": self.omega,
                    "harmonics": [[k, a, b] for k, a, b in self.harmonics]}
        if self.form == "constant":
            return {"form": "constant", "value": self.value}
        return {"form": "piecewise-linear", "points": [list(p) for p in self.points]}


def fourier(omega: float, harmonics, duration: float = math.inf) -> ExcitationSignal:
    return ExcitationSignal("fourier", duration, omega=omega, harmonics=tuple(map(tuple, harmonics)))


def constant(value: float, duration: float = math.inf) -> ExcitationSignal:
    return ExcitationSignal("constant", duration, value=float(value))


def piecewise_linear(points, duration: float | None = None) -> ExcitationSignal:
    pts = tuple(map(tuple, points))
    return ExcitationSignal("piecewise-linear", duration if duration is not None else pts[-1][0],
                            points=pts)


def fourier_eval(signal: ExcitationSignal, t):
    return signal.evaluate(t)


def reference_force_profile(cycles: int = 1) -> ExcitationSignal:
    """The zero-mean four-harmonic force [N] driving the mem-inerter, w = 0.5 rad/s."""
    sig = fourier(REFERENCE_OMEGA, REFERENCE_HARMONICS)
    return sig.with_duration(cycles * sig.period)


_SIGNAL_KEYS = {
    "fourier": {"form", "omega_rad_s", "harmonics"},
    "constant": {"form", "value"},
    "piecewise-linear": {"form", "points"},
}


def signal_from_dict(d: dict, duration: float = math.inf) -> ExcitationSignal:
    if not isinstance(d, dict):
        raise ValueError("signal specification must be a mapping")
    form = d.get("form")
    if form not in _SIGNAL_KEYS:
        raise ValueError(f"signal 'form' must be one of {tuple(_SIGNAL_KEYS)}, got {form!r}")
    extra = set(d) - _SIGNAL_KEYS[form]
    if extra:
        raise ValueError(f"unknown key(s) in {form} signal: {sorted(extra)}")
    try:
        if form == "fourier":
            terms = d["harmonics"]
            if any(not isinstance(h, (list, tuple)) or len(h) != 3 for h in terms):
                raise ValueError("each harmonic is [k, sine_coefficient, cosine_coefficient]")
            return fourier(float(d["omega_rad_s"]), terms, duration)
        if form == "constant":
            return constant(d["value"], duration)
        return piecewise_linear(d["points"], duration if math.isfinite(duration) else None)
    except KeyError as exc:
        raise ValueError(f"{form} signal is missing key {exc.args[0]!r}") from None
