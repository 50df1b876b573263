"""Time integration for second-order oscillators in first-order form
(x', v') = (v, f(t, x, v)).

Two engines share one trajectory format: a fixed-step classical RK4 and an
adaptive Dormand-Prince 5(4) pair with PI step control.  Both record
accelerations at every knot, so trajectories support dense output through
quintic Hermite interpolation.  A method-of-steps variant integrates
delay equations whose right-hand side reads the velocity at t - tau.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import State, Trajectory, _hermite5

__all__ = ["StepControl", "HistoryBuffer", "IntegrationError", "integrate", "integrate_delayed"]

Rhs = Callable[[float, float, float], float]
DelayedRhs = Callable[[float, float, float, float], float]

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 5.0
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


class IntegrationError(RuntimeError):
    """Integration could not continue; carries the failure time."""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class StepControl:
    """Step policy: fixed step dt for method="rk4", tolerances for "dp54"."""

    dt: float | None = None
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    max_steps: int = 5_000_000
    method: str = "dp54"  # "dp54" | "rk4"

    def __post_init__(self) -> None:
        if self.method not in ("dp54", "rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "rk4" and (self.dt is None or self.dt <= 0):
            raise ValueError("rk4 needs a positive fixed step dt")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.abs_tol <= 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


class HistoryBuffer:
    """Growing record of (t, x, v, accel) knots with interpolated reads.

    Backs the delayed-velocity lookups of :func:`integrate_delayed`; reads
    before the first knot fall back to the supplied history function.
    """

    def __init__(self, history_v: Callable[[float], float]):
        self._history_v = history_v
        self.ts: list[float] = []
        self.xs: list[float] = []
        self.vs: list[float] = []
        self.accs: list[float] = []

    def append(self, t: float, x: float, v: float, acc: float) -> None:
        if self.ts and t <= self.ts[-1]:
            raise ValueError("history knots must advance in time")
        self.ts.append(t)
        self.xs.append(x)
        self.vs.append(v)
        self.accs.append(acc)

    def velocity(self, t: float) -> float:
        if not self.ts or t < self.ts[0]:
            return float(self._history_v(t))
        if t >= self.ts[-1]:
            if t <= self.ts[-1] + 1e-12:
                return self.vs[-1]
            raise ValueError(f"delayed read at t={t} beyond recorded history t={self.ts[-1]}")
        i = bisect_right(self.ts, t) - 1
        h = self.ts[i + 1] - self.ts[i]
        s = (t - self.ts[i]) / h
        _, v = _hermite5(
            s, h,
            self.xs[i], self.vs[i], self.accs[i],
            self.xs[i + 1], self.vs[i + 1], self.accs[i + 1],
        )
        return v


def _check_finite(t: float, x: float, v: float) -> None:
    if not (math.isfinite(x) and math.isfinite(v)):
        raise IntegrationError(f"non-finite state (x={x}, v={v}) at t={t}", t)


def _run_rk4(f: Rhs, t0: float, x: float, v: float, t_end: float, dt: float,
             max_steps: int, sink) -> None:
    """Classical RK4 with a fixed step; a shorter final step lands on t_end."""
    n_full = int(math.floor((t_end - t0) / dt + 1e-9))
    acc = f(t0, x, v)
    sink(t0, x, v, acc)
    t = t0
    if n_full > max_steps:
        raise IntegrationError(f"max_steps={max_steps} exceeded at t={t0 + max_steps * dt}", t0)
    for i in range(1, n_full + 1):
        t = t0 + (i - 1) * dt
        x, v, acc = _rk4_step(f, t, x, v, dt, acc)
        t = t0 + i * dt
        _check_finite(t, x, v)
        sink(t, x, v, acc)
    t = t0 + n_full * dt
    if t_end - t > 1e-12 * max(1.0, abs(t_end)):
        x, v, acc = _rk4_step(f, t, x, v, t_end - t, acc)
        _check_finite(t_end, x, v)
        sink(t_end, x, v, acc)


def _rk4_step(f: Rhs, t: float, x: float, v: float, dt: float,
              a1: float) -> tuple[float, float, float]:
    """One RK4 step from a known accel a1 = f(t, x, v); returns the new
    (x, v) and the accel at the new point (reusable as the next a1)."""
    h2 = 0.5 * dt
    a2 = f(t + h2, x + h2 * v, v + h2 * a1)
    v2 = v + h2 * a1
    a3 = f(t + h2, x + h2 * v2, v + h2 * a2)
    v3 = v + h2 * a2
    a4 = f(t + dt, x + dt * v3, v + dt * a3)
    x_new = x + dt / 6.0 * (v + 2.0 * (v2 + v3) + (v + dt * a3))
    v_new = v + dt / 6.0 * (a1 + 2.0 * (a2 + a3) + a4)
    return x_new, v_new, f(t + dt, x_new, v_new)


def _initial_dt(f: Rhs, t0: float, x: float, v: float, t_end: float, ctrl: StepControl) -> float:
    if ctrl.dt is not None:
        return min(ctrl.dt, t_end - t0)
    a0 = f(t0, x, v)
    scale = max(abs(v), abs(a0), 1e-8)
    guess = (ctrl.abs_tol + ctrl.rel_tol * max(abs(x), abs(v))) ** 0.2 / scale ** 0.5
    return min(max(guess, 1e-8), (t_end - t0) / 10.0, 0.1)


def _run_dp54(f: Rhs, t0: float, x: float, v: float, t_end: float, ctrl: StepControl,
              sink, dt_cap: float = math.inf) -> tuple[int, int]:
    """Adaptive Dormand-Prince 5(4) with PI step-size control (FSAL)."""
    t = t0
    kx = [0.0] * 7
    kv = [0.0] * 7
    acc = f(t, x, v)
    sink(t, x, v, acc)
    kx[0], kv[0] = v, acc
    dt = min(_initial_dt(f, t0, x, v, t_end, ctrl), dt_cap)
    err_prev = 1.0
    n_accept = n_reject = 0
    steps = 0
    while t < t_end - 1e-13 * max(1.0, abs(t_end)):
        if steps >= ctrl.max_steps:
            raise IntegrationError(f"max_steps={ctrl.max_steps} exceeded at t={t}", t)
        steps += 1
        dt = min(dt, t_end - t, dt_cap)
        for i in range(1, 7):
            xi = x
            vi = v
            row = _A[i]
            for j, aij in enumerate(row):
                xi += dt * aij * kx[j]
                vi += dt * aij * kv[j]
            ti = t + _C[i] * dt
            kx[i] = vi
            kv[i] = f(ti, xi, vi)
        # 5th-order solution is stage 7's state (FSAL)
        x_new, v_new = xi, vi
        a_new = kv[6]
        ex = dt * sum(e * k for e, k in zip(_E, kx))
        ev = dt * sum(e * k for e, k in zip(_E, kv))
        sx = ctrl.abs_tol + ctrl.rel_tol * max(abs(x), abs(x_new))
        sv = ctrl.abs_tol + ctrl.rel_tol * max(abs(v), abs(v_new))
        err = math.sqrt(0.5 * ((ex / sx) ** 2 + (ev / sv) ** 2))
        if err <= 1.0:
            t = t + dt
            x, v = x_new, v_new
            _check_finite(t, x, v)
            sink(t, x, v, a_new)
            kx[0], kv[0] = kx[6], kv[6]
            fac = _SAFETY * (err + 1e-16) ** (-_PI_ALPHA) * (err_prev + 1e-16) ** _PI_BETA
            err_prev = max(err, 1e-16)
            n_accept += 1
        else:
            fac = max(_FAC_MIN, _SAFETY * err ** (-0.2))
            n_reject += 1
        dt *= min(_FAC_MAX, max(_FAC_MIN, fac))
        if dt <= 1e-14 * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow (dt={dt}) at t={t}", t)
    return n_accept, n_reject


class _KnotSink:
    def __init__(self):
        self.ts: list[float] = []
        self.xs: list[float] = []
        self.vs: list[float] = []
        self.accs: list[float] = []

    def __call__(self, t, x, v, acc):
        self.ts.append(t)
        self.xs.append(x)
        self.vs.append(v)
        self.accs.append(acc)


def integrate(rhs: Rhs, s0: State, t_end: float, ctrl: StepControl | None = None) -> Trajectory:
    """Integrate (x', v') = (v, rhs(t, x, v)) from s0 up to t_end.

    Returns a densely evaluable trajectory; raises IntegrationError naming
    the failure time when the state blows up or max_steps is hit.
    """
    ctrl = ctrl or StepControl()
    if not s0.is_finite():
        raise ValueError(f"non-finite initial state {s0}")
    if t_end <= s0.t:
        raise ValueError(f"t_end={t_end} must exceed the initial time {s0.t}")
    sink = _KnotSink()
    meta = {"integrator": ctrl.method, "dense": "hermite5"}
    if ctrl.method == "rk4":
        _run_rk4(rhs, s0.t, s0.x, s0.v, t_end, ctrl.dt, ctrl.max_steps, sink)
        meta["dt"] = ctrl.dt
    else:
        n_acc, n_rej = _run_dp54(rhs, s0.t, s0.x, s0.v, t_end, ctrl, sink)
        meta.update(abs_tol=ctrl.abs_tol, rel_tol=ctrl.rel_tol,
                    n_accepted=n_acc, n_rejected=n_rej)
    return Trajectory(
        np.array(sink.ts), np.array(sink.xs), np.array(sink.vs), np.array(sink.accs), meta
    )


def integrate_delayed(
    rhs_with_delay: DelayedRhs,
    s0: State,
    history_v: Callable[[float], float],
    tau: float,
    t_end: float,
    ctrl: StepControl | None = None,
) -> Trajectory:
    """Method-of-steps integration of x'' = rhs(t, x, v, v(t - tau)).

    The delayed velocity is read from the accumulated knots by Hermite
    interpolation; for times before s0.t the history function supplies it.
    Steps never exceed tau, so every delayed read is already recorded.
    """
    if tau <= 0:
        raise ValueError(f"delay tau must be positive, got {tau}")
    ctrl = ctrl or StepControl()
    if not s0.is_finite():
        raise ValueError(f"non-finite initial state {s0}")
    if t_end <= s0.t:
        raise ValueError(f"t_end={t_end} must exceed the initial time {s0.t}")
    buf = HistoryBuffer(history_v)
    t0 = s0.t

    def f(t: float, x: float, v: float) -> float:
        td = t - tau
        vd = buf.velocity(td) if td > t0 else float(history_v(td))
        return rhs_with_delay(t, x, v, vd)

    meta = {"integrator": f"{ctrl.method}+delay", "dense": "hermite5", "tau": tau}
    if ctrl.method == "rk4":
        dt = min(ctrl.dt, tau)
        _run_rk4(f, t0, s0.x, s0.v, t_end, dt, ctrl.max_steps, buf.append)
        meta["dt"] = dt
    else:
        n_acc, n_rej = _run_dp54(f, t0, s0.x, s0.v, t_end, ctrl, buf.append, dt_cap=tau)
        meta.update(abs_tol=ctrl.abs_tol, rel_tol=ctrl.rel_tol,
                    n_accepted=n_acc, n_rejected=n_rej)
    return Trajectory(
        np.array(buf.ts), np.array(buf.xs), np.array(buf.vs), np.array(buf.accs), meta
    )
