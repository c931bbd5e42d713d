"""Explicit ODE integration: fixed-step RK4 and adaptive Dormand-Prince 5(4).

Right-hand sides have the signature ``rhs(t, y) -> array``. Both integrators
return a :class:`Trajectory` holding accepted states, the derivative at each
node (for cubic Hermite dense output) and any monitor channels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np

from .core import DomainError, SingularityError

Monitor = Callable[[float, np.ndarray], float]


class IntegrationError(RuntimeError):
    """Integration stopped early; ``t`` and ``y`` hold the last valid state."""

    def __init__(self, message: str, t: float, y: np.ndarray, trajectory: "Trajectory | None" = None):
        super().__init__(f"{message} (t = {t:.17g})")
        self.t = t
        self.y = y
        self.trajectory = trajectory


class StepUnderflowError(IntegrationError):
    pass


@dataclass(frozen=True)
class EventSpec:
    """Zero crossing of a monitor channel, or of ``channel - threshold``.

    ``direction`` +1 keeps only rising crossings, -1 only falling, 0 both.
    """

    monitor: str
    trigger: str = "sign-change"
    threshold: float = 0.0
    direction: int = 0
    tol: float = 1e-12
    terminal: bool = False

    def __post_init__(self):
        if self.trigger not in ("sign-change", "threshold"):
            raise ValueError(f"unknown trigger {self.trigger!r}")
        if not self.tol > 0:
            raise ValueError("event tolerance must be positive")

    def level(self) -> float:
        return self.threshold if self.trigger == "threshold" else 0.0


@dataclass(frozen=True)
class Event:
    name: str
    t: float
    y: np.ndarray
    direction: int


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    derivs: np.ndarray
    labels: List[str]
    monitors: Dict[str, np.ndarray] = field(default_factory=dict)
    events: List[Event] = field(default_factory=list)
    meta: Dict[str, object] = field(default_factory=dict)
    monitor_fns: Dict[str, Monitor] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float).reshape(len(self.times), -1)
        self.derivs = np.asarray(self.derivs, dtype=float).reshape(self.states.shape)
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if len(self.labels) != self.states.shape[1]:
            raise ValueError("one label per state component required")
        for name, vals in self.monitors.items():
            if len(vals) != len(self.times):
                raise ValueError(f"monitor {name!r} has the wrong length")

    def __len__(self):
        return len(self.times)

    def __getitem__(self, name: str) -> np.ndarray:
        if name in self.labels:
            return self.states[:, self.labels.index(name)]
        if name in self.monitors:
            return self.monitors[name]
        raise KeyError(name)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def interpolate(self, t) -> np.ndarray:
        """Cubic Hermite dense output; exact at the nodes."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(ts < self.times[0] - 1e-12 * abs(self.times[0] + 1)) or np.any(
            ts > self.times[-1] + 1e-12 * abs(self.times[-1] + 1)
        ):
            raise DomainError("dense output requested outside the integrated span")
        idx = np.clip(np.searchsorted(self.times, ts, side="right") - 1, 0, len(self.times) - 2)
        out = np.array([_hermite(self, i, tv) for i, tv in zip(idx, ts)])
        return out[0] if np.ndim(t) == 0 else out

    def resample(self, times: Sequence[float]) -> "Trajectory":
        """New trajectory on ``times`` via dense output, monitors recomputed."""
        times = np.asarray(times, dtype=float)
        states = self.interpolate(times).reshape(len(times), -1)
        rhs = self.meta.get("rhs")
        if rhs is not None:
            derivs = np.array([rhs(t, s) for t, s in zip(times, states)])
        else:
            derivs = np.zeros_like(states)
        mons = {n: np.array([fn(t, s) for t, s in zip(times, states)]) for n, fn in self.monitor_fns.items()}
        return Trajectory(times, states, derivs, list(self.labels), mons, list(self.events), dict(self.meta), dict(self.monitor_fns))

    def columns(self) -> Dict[str, np.ndarray]:
        cols = {"t": self.times}
        for i, name in enumerate(self.labels):
            cols[name] = self.states[:, i]
        cols.update(self.monitors)
        return cols


def _hermite(traj: Trajectory, i: int, t: float) -> np.ndarray:
    t0, t1 = traj.times[i], traj.times[i + 1]
    h = t1 - t0
    s = (t - t0) / h
    y0, y1 = traj.states[i], traj.states[i + 1]
    f0, f1 = traj.derivs[i], traj.derivs[i + 1]
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def _call(rhs, t, y, last_t, last_y):
    try:
        f = np.asarray(rhs(t, y), dtype=float)
    except (SingularityError, DomainError, ZeroDivisionError, FloatingPointError) as exc:
        raise IntegrationError(f"right-hand side failed: {exc}", last_t, last_y) from exc
    return f


def _eval_monitors(monitors: Mapping[str, Monitor], t, y, store):
    for name, fn in monitors.items():
        store[name].append(float(fn(t, y)))


def _labels(labels, n):
    if labels is None:
        return [f"y{i}" for i in range(n)]
    labels = list(labels)
    if len(labels) != n:
        raise ValueError("label count does not match state size")
    return labels


def rk4_fixed(rhs, y0, t_span, n_steps: int, monitors: Optional[Mapping[str, Monitor]] = None, labels=None) -> Trajectory:
    """Classical fourth-order Runge-Kutta with ``n_steps`` equal steps."""
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    t0, t1 = map(float, t_span)
    h = (t1 - t0) / n_steps
    y = np.array(y0, dtype=float).ravel()
    monitors = dict(monitors or {})
    mstore = {n: [] for n in monitors}
    ts, ys, fs = [t0], [y.copy()], []
    _eval_monitors(monitors, t0, y, mstore)
    t = t0
    for i in range(n_steps):
        k1 = _call(rhs, t, y, t, y)
        k2 = _call(rhs, t + h / 2, y + h / 2 * k1, t, y)
        k3 = _call(rhs, t + h / 2, y + h / 2 * k2, t, y)
        k4 = _call(rhs, t + h, y + h * k3, t, y)
        fs.append(k1)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (i + 1) * h
        if not np.all(np.isfinite(y)):
            raise IntegrationError("state became non-finite", ts[-1], ys[-1])
        ts.append(t)
        ys.append(y.copy())
        _eval_monitors(monitors, t, y, mstore)
    fs.append(_call(rhs, t, y, t, y))
    return Trajectory(
        np.array(ts), np.array(ys), np.array(fs), _labels(labels, len(y)),
        {n: np.array(v) for n, v in mstore.items()},
        meta={"method": "rk4", "n_steps": n_steps, "rhs": rhs, "termination": "completed"},
        monitor_fns=monitors,
    )


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _initial_step(rhs, t0, y0, f0, direction, rel_tol, abs_tol, span):
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = np.max(np.abs(y0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + direction * h0 * f0
    f1 = np.asarray(rhs(t0 + direction * h0, y1), dtype=float)
    d2 = np.max(np.abs(f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def _locate(spec: EventSpec, monitor: Monitor, ta, ya, tb, yb, fa, fb):
    """Bisection for the event root on the Hermite interpolant of one step."""
    h = tb - ta
    level = spec.level()

    def g(t):
        s = (t - ta) / h
        y = (
            (2 * s**3 - 3 * s**2 + 1) * ya
            + (s**3 - 2 * s**2 + s) * h * fa
            + (-2 * s**3 + 3 * s**2) * yb
            + (s**3 - s**2) * h * fb
        )
        return monitor(t, y) - level, y

    lo, hi = ta, tb
    glo = g(lo)[0]
    while hi - lo > spec.tol:
        mid = 0.5 * (lo + hi)
        gm = g(mid)[0]
        if gm == 0:
            lo = hi = mid
            break
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    t_root = 0.5 * (lo + hi)
    return t_root, g(t_root)[1]


def adaptive_integrate(
    rhs,
    y0,
    t_span,
    rel_tol: float = 1e-9,
    abs_tol: float = 1e-12,
    events: Sequence[EventSpec] = (),
    monitors: Optional[Mapping[str, Monitor]] = None,
    labels=None,
    max_steps: int = 1_000_000,
    max_step: Optional[float] = None,
) -> Trajectory:
    """Adaptive Dormand-Prince 5(4) with local error control in the max norm.

    Events refer to entries of ``monitors`` and are located by bisection on
    the Hermite dense output. A step shrinking below ``1e-14`` times the span
    raises :class:`StepUnderflowError`, which usually signals a singularity.
    """
    if not (rel_tol > 0 and abs_tol > 0):
        raise ValueError("tolerances must be positive")
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    direction = 1.0
    span = abs(t1 - t0)
    h_min = 1e-14 * span
    max_step = span if max_step is None else max_step
    monitors = dict(monitors or {})
    for ev in events:
        if ev.monitor not in monitors:
            raise ValueError(f"event refers to unknown monitor {ev.monitor!r}")

    y = np.array(y0, dtype=float).ravel()
    t = t0
    f = _call(rhs, t, y, t, y)
    ts, ys, fs = [t], [y.copy()], [f.copy()]
    mstore = {n: [] for n in monitors}
    _eval_monitors(monitors, t, y, mstore)
    found: List[Event] = []
    labels = _labels(labels, len(y))

    def partial(reason):
        return Trajectory(
            np.array(ts), np.array(ys), np.array(fs), labels,
            {n: np.array(v) for n, v in mstore.items()}, found,
            {"method": "dopri5", "rhs": rhs, "termination": reason, "rel_tol": rel_tol, "abs_tol": abs_tol},
            monitors,
        )

    h = _initial_step(rhs, t, y, f, direction, rel_tol, abs_tol, span)
    n_accept = n_reject = 0
    K = np.empty((7, len(y)))
    terminated = None
    while direction * (t1 - t) > 0:
        if n_accept + n_reject >= max_steps:
            raise IntegrationError("maximum step count exceeded", t, y, partial("max-steps"))
        h = min(h, max_step)
        if h < h_min:
            raise StepUnderflowError("step size underflow", t, y, partial("step-underflow"))
        if direction * (t + direction * h - t1) > 0:
            h = abs(t1 - t)
        hs = direction * h
        K[0] = f
        ok = True
        try:
            for i in range(1, 7):
                yi = y + hs * np.dot(_A[i], K[:i])
                K[i] = np.asarray(rhs(t + _C[i] * hs, yi), dtype=float)
        except (SingularityError, DomainError, ZeroDivisionError, FloatingPointError):
            ok = False
        if ok:
            y_new = y + hs * np.dot(_B5, K)
            err_vec = hs * np.dot(_E, K)
            scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            with np.errstate(invalid="ignore", over="ignore"):
                err = np.max(np.abs(err_vec) / scale)
            ok = bool(np.isfinite(err)) and np.all(np.isfinite(y_new))
        if not ok:
            n_reject += 1
            h *= 0.25
            continue
        if err > 1.0:
            n_reject += 1
            h *= max(0.2, 0.9 * err ** -0.2)
            continue

        t_new = t1 if h == abs(t1 - t) else t + hs
        f_new = K[6]
        for ev in events:
            mon = monitors[ev.monitor]
            ga = mon(t, y) - ev.level()
            gb = mon(t_new, y_new) - ev.level()
            if (ga < 0 < gb or ga > 0 > gb) or (gb == 0 and ga != 0):
                sign = 1 if gb > ga else -1
                if ev.direction and sign != ev.direction:
                    continue
                te, ye = _locate(ev, mon, t, y, t_new, y_new, f, f_new)
                found.append(Event(ev.monitor, te, ye, sign))
                if ev.terminal:
                    terminated = (te, ye)
        n_accept += 1
        if terminated is not None:
            te, ye = terminated
            t, y = te, ye
            f = _call(rhs, t, y, t, y)
            if te > ts[-1]:
                ts.append(t)
                ys.append(y.copy())
                fs.append(f.copy())
                _eval_monitors(monitors, t, y, mstore)
            break
        t, y, f = t_new, y_new, f_new.copy()
        ts.append(t)
        ys.append(y.copy())
        fs.append(f.copy())
        _eval_monitors(monitors, t, y, mstore)
        factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        h *= factor

    traj = partial("event" if terminated is not None else "completed")
    traj.meta.update(n_accept=n_accept, n_reject=n_reject)
    return traj
