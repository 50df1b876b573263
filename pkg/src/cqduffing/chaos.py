"""Stroboscopic Poincare maps, largest-Lyapunov-exponent estimation, the
chaos-onset forcing scan, and bifurcation-diagram data.

The chaos classifier is fixed and reproducible: a forcing amplitude is
called chaotic when the Benettin two-trajectory exponent exceeds a
threshold (default 0.01) at two consecutive grid amplitudes; the reported
onset is then refined by bisection.  Scans are deterministic functions of
the grid, the start state, and the step policy, and each (omega, gamma)
cell is independent, so callers may evaluate cells in parallel and merge
by index without changing results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import OscillatorParams, State
from .odeint import StepControl, integrate

__all__ = [
    "PoincareSeries",
    "ChaosScanRow",
    "NoOnset",
    "poincare_map",
    "lyapunov_max",
    "gamma_scan",
    "bifurcation_data",
    "cluster_count",
]

_STEPS_PER_PERIOD = 200
_TRANSIENT_PERIODS = 100
_MEASURE_PERIODS = 400


@dataclass(frozen=True)
class PoincareSeries:
    """Stroboscopic samples (P_n, Q_n) at t = n 2pi/omega, n starting
    after the discarded transient prefix."""

    points: np.ndarray  # shape (n, 2): displacement, velocity
    omega: float
    n_transient: int
    metadata: dict | None = None


@dataclass(frozen=True)
class ChaosScanRow:
    """One scan result: onset amplitude gamma_c and the exponent there."""

    omega: float
    gamma_c: float
    lyapunov: float


@dataclass(frozen=True)
class NoOnset:
    """Scan outcome when no amplitude in range classifies as chaotic."""

    omega: float
    gamma_range: tuple[float, float]
    max_lyapunov: float


def _strobe_ctrl(omega: float, steps_per_period: int = _STEPS_PER_PERIOD) -> StepControl:
    return StepControl(dt=(2.0 * math.pi / omega) / steps_per_period, method="rk4")


def poincare_map(
    p: OscillatorParams,
    s0: State,
    n_points: int,
    n_transient: int = _TRANSIENT_PERIODS,
    ctrl: StepControl | None = None,
) -> PoincareSeries:
    """Strobe one trajectory at integer multiples of the forcing period.

    Continuing a single trajectory is equivalent to the restart
    construction (re-posing the i.v.p. from each period's end state) by
    uniqueness of solutions; dense output supplies the exact strobe times.
    """
    if p.omega <= 0.0:
        raise ValueError("poincare_map needs omega > 0")
    T = 2.0 * math.pi / p.omega
    ctrl = ctrl or _strobe_ctrl(p.omega)
    t_end = s0.t + (n_transient + n_points) * T

    def f(t: float, x: float, v: float) -> float:
        x2 = x * x
        return (p.a * x - p.b * x * x2 - p.c * x * x2 * x2
                + p.epsilon * (p.gamma * math.cos(p.omega * t) - p.delta * v))

    traj = integrate(f, s0, t_end, ctrl)
    pts = np.empty((n_points, 2))
    for j in range(n_points):
        tn = s0.t + (n_transient + j + 1) * T
        pts[j] = traj.eval(min(tn, traj.t[-1]))
    meta = {"params": p, "ctrl": ctrl, "s0": s0}
    return PoincareSeries(points=pts, omega=p.omega, n_transient=n_transient, metadata=meta)


def lyapunov_max(
    p: OscillatorParams,
    s0: State,
    t_total: float,
    renorm_interval: float | None = None,
    *,
    d0: float = 1e-8,
    steps_per_period: int = _STEPS_PER_PERIOD,
    t_transient: float | None = None,
) -> float:
    """Largest Lyapunov exponent by the Benettin two-trajectory method.

    A companion trajectory starts offset d0 in displacement; both are
    advanced with the same fixed RK4 steps, the separation is renormalized
    to d0 after every interval, and the exponent is the mean log stretch
    per unit time after the transient discard.
    """
    T = 2.0 * math.pi / p.omega if p.omega > 0.0 else 2.0 * math.pi
    if renorm_interval is None:
        renorm_interval = T
    if t_transient is None:
        t_transient = _TRANSIENT_PERIODS * T
    if t_total <= t_transient + renorm_interval:
        raise ValueError("t_total must exceed the transient plus one interval")
    n_steps = max(2, int(round(steps_per_period * renorm_interval / T)))
    dt = renorm_interval / n_steps
    a_, b_, c_ = p.a, p.b, p.c
    g_ = p.epsilon * p.gamma
    d_ = p.epsilon * p.delta
    w_ = p.omega
    cos = math.cos
    log = math.log
    sqrt = math.sqrt

    x1, v1 = s0.x, s0.v
    x2, v2 = s0.x + d0, s0.v
    t_base = s0.t
    n_int = int(math.ceil(t_total / renorm_interval))
    total = 0.0
    t_measured = 0.0
    for interval in range(n_int):
        for i in range(n_steps):
            t = t_base + i * dt
            cos0 = cos(w_ * t) if g_ != 0.0 else 0.0
            cosh_ = cos(w_ * (t + 0.5 * dt)) if g_ != 0.0 else 0.0
            cos1 = cos(w_ * (t + dt)) if g_ != 0.0 else 0.0
            h2 = 0.5 * dt
            # advance both trajectories with shared forcing samples
            for sel in (0, 1):
                x, v = (x1, v1) if sel == 0 else (x2, v2)
                a1 = a_ * x - b_ * x ** 3 - c_ * x ** 5 + g_ * cos0 - d_ * v
                xb, vb = x + h2 * v, v + h2 * a1
                a2 = a_ * xb - b_ * xb ** 3 - c_ * xb ** 5 + g_ * cosh_ - d_ * vb
                xc, vc = x + h2 * vb, v + h2 * a2
                a3 = a_ * xc - b_ * xc ** 3 - c_ * xc ** 5 + g_ * cosh_ - d_ * vc
                xd, vd = x + dt * vc, v + dt * a3
                a4 = a_ * xd - b_ * xd ** 3 - c_ * xd ** 5 + g_ * cos1 - d_ * vd
                x_new = x + dt / 6.0 * (v + 2.0 * (vb + vc) + vd)
                v_new = v + dt / 6.0 * (a1 + 2.0 * (a2 + a3) + a4)
                if sel == 0:
                    x1, v1 = x_new, v_new
                else:
                    x2, v2 = x_new, v_new
        if not (math.isfinite(x1) and math.isfinite(v1) and math.isfinite(x2) and math.isfinite(v2)):
            raise ValueError(f"trajectory diverged near t={t_base}")
        t_base += renorm_interval
        dx, dv = x2 - x1, v2 - v1
        d = sqrt(dx * dx + dv * dv)
        if d == 0.0:
            d = 1e-300
        if t_base - s0.t > t_transient:
            total += log(d / d0)
            t_measured += renorm_interval
        scale = d0 / d
        x2, v2 = x1 + dx * scale, v1 + dv * scale
    return total / t_measured


def gamma_scan(
    a: float,
    b: float,
    c: float,
    delta: float,
    omega: float,
    gamma_range: tuple[float, float],
    resolution: float,
    *,
    coarse_step: float | None = None,
    lyap_threshold: float = 0.01,
    s0: State = State(0.0, 0.0, 0.0),
    steps_per_period: int = _STEPS_PER_PERIOD,
    transient_periods: int = _TRANSIENT_PERIODS,
    measure_periods: int = _MEASURE_PERIODS,
) -> ChaosScanRow | NoOnset:
    """Smallest forcing amplitude classified chaotic at this omega.

    Grid search at coarse_step (chaotic = exponent above threshold at two
    consecutive amplitudes), then bisection down to `resolution` inside
    the bracketing interval.  Deterministic for fixed inputs.
    """
    lo, hi = gamma_range
    if not (0.0 <= lo < hi):
        raise ValueError(f"gamma_range must be ordered and nonnegative, got {gamma_range}")
    if resolution <= 0.0:
        raise ValueError("resolution must be positive")
    if coarse_step is None:
        coarse_step = max(resolution, 0.01)
    T = 2.0 * math.pi / omega
    t_total = (transient_periods + measure_periods) * T
    t_transient = transient_periods * T

    def exponent(gamma: float) -> float:
        p = OscillatorParams(a=a, b=b, c=c, delta=delta, gamma=gamma, omega=omega, epsilon=1.0)
        return lyapunov_max(p, s0, t_total, T, steps_per_period=steps_per_period,
                            t_transient=t_transient)

    grid = [lo + i * coarse_step for i in range(int(math.floor((hi - lo) / coarse_step)) + 1)]
    if grid[-1] < hi - 1e-12:
        grid.append(hi)
    exps: list[float] = [exponent(g) if g > 0.0 else -math.inf for g in grid]
    onset_i = None
    for i in range(len(grid) - 1):
        if exps[i] > lyap_threshold and exps[i + 1] > lyap_threshold:
            onset_i = i
            break
    if onset_i is None:
        return NoOnset(omega=omega, gamma_range=(lo, hi), max_lyapunov=float(max(exps)))
    g_hi = grid[onset_i]
    e_hi = exps[onset_i]
    g_lo = grid[onset_i - 1] if onset_i > 0 else max(lo, 0.0)
    while g_hi - g_lo > resolution:
        mid = 0.5 * (g_lo + g_hi)
        e_mid = exponent(mid)
        if e_mid > lyap_threshold:
            g_hi, e_hi = mid, e_mid
        else:
            g_lo = mid
    return ChaosScanRow(omega=omega, gamma_c=g_hi, lyapunov=e_hi)


def bifurcation_data(
    p: OscillatorParams,
    gamma_sweep,
    n_points: int = 120,
    n_transient: int = _TRANSIENT_PERIODS,
    s0: State = State(0.0, 0.0, 0.0),
) -> list[tuple[float, np.ndarray]]:
    """Post-transient strobe displacements for each forcing amplitude."""
    out = []
    for gamma in gamma_sweep:
        pg = OscillatorParams(a=p.a, b=p.b, c=p.c, delta=p.delta, gamma=float(gamma),
                              omega=p.omega, epsilon=p.epsilon)
        series = poincare_map(pg, s0, n_points, n_transient)
        out.append((float(gamma), series.points[:, 0].copy()))
    return out


def cluster_count(points: np.ndarray, radius: float = 1e-3) -> int:
    """Greedy count of distinct clusters at the given radius (diagnostic
    for period-k orbits versus scattered chaotic sections)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] == 1:
        pts = np.column_stack([pts[:, 0], np.zeros(len(pts))])
    centers: list[np.ndarray] = []
    for q in pts:
        if not any(np.hypot(*(q - c)) <= radius for c in centers):
            centers.append(q)
    return len(centers)
