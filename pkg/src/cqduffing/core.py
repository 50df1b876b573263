"""Parameter/state types and conservative diagnostics for the driven
cubic-quintic oscillator

    x'' - a x + b x^3 + c x^5 = eps * (gamma cos(omega t) - delta x').

The unperturbed (eps = 0) system is Hamiltonian with energy
E = v^2/2 - a x^2/2 + b x^4/4 + c x^6/6; its equilibria and separatrix
geometry live here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "OscillatorParams",
    "State",
    "Trajectory",
    "EnergyReport",
    "Equilibrium",
    "rhs",
    "acceleration",
    "equilibria",
    "energy",
    "energy_report",
    "separatrix_velocity",
    "hamiltonian_fields",
]


@dataclass(frozen=True)
class OscillatorParams:
    """Coefficients of the driven equation.

    a: linear stiffness (1/time^2), sign as written above (a > 0 makes the
       origin a saddle of the unperturbed flow).
    b: cubic coefficient, c: quintic coefficient.
    delta: damping, gamma: forcing amplitude, omega: forcing frequency,
    epsilon: perturbation scale multiplying both damping and forcing.
    """

    a: float
    b: float
    c: float
    delta: float = 0.0
    gamma: float = 0.0
    omega: float = 0.0
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        vals = (self.a, self.b, self.c, self.delta, self.gamma, self.omega, self.epsilon)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite oscillator parameter in {vals}")
        if self.epsilon * self.gamma != 0.0 and self.omega <= 0.0:
            raise ValueError("omega must be > 0 when forcing is active (epsilon*gamma != 0)")

    def forcing(self, t: float) -> float:
        """eps * gamma * cos(omega t)."""
        if self.epsilon * self.gamma == 0.0:
            return 0.0
        return self.epsilon * self.gamma * math.cos(self.omega * t)


@dataclass(frozen=True)
class State:
    """Phase-space sample (time, displacement, velocity)."""

    t: float
    x: float
    v: float

    def is_finite(self) -> bool:
        return math.isfinite(self.t) and math.isfinite(self.x) and math.isfinite(self.v)


class Trajectory:
    """Time-ordered (t, x, v) knots from an integrator.

    When per-knot accelerations are available (all integrators in
    :mod:`cqduffing.odeint` record them), the trajectory is densely
    evaluable at arbitrary times inside its span through two-point quintic
    Hermite interpolation of x (velocity is the interpolant's derivative).
    """

    def __init__(
        self,
        t: np.ndarray,
        x: np.ndarray,
        v: np.ndarray,
        accel: np.ndarray | None = None,
        metadata: dict | None = None,
    ) -> None:
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if not (t.shape == x.shape == v.shape) or t.ndim != 1 or t.size < 1:
            raise ValueError("t, x, v must be equal-length 1-d arrays")
        if np.any(np.diff(t) <= 0):
            raise ValueError("knot times must be strictly increasing")
        for name, arr in (("t", t), ("x", x), ("v", v)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite values in trajectory array {name!r}")
        self.t = t
        self.x = x
        self.v = v
        self.accel = None if accel is None else np.asarray(accel, dtype=float)
        self.metadata = dict(metadata or {})

    def __len__(self) -> int:
        return self.t.size

    @property
    def samples(self) -> list[State]:
        return [State(float(ti), float(xi), float(vi)) for ti, xi, vi in zip(self.t, self.x, self.v)]

    @property
    def t_span(self) -> tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    def final_state(self) -> State:
        return State(float(self.t[-1]), float(self.x[-1]), float(self.v[-1]))

    def _interval(self, t: float) -> int:
        t0, t1 = self.t[0], self.t[-1]
        if not (t0 - 1e-12 <= t <= t1 + 1e-12):
            raise ValueError(f"t={t} outside trajectory span [{t0}, {t1}]")
        i = int(np.searchsorted(self.t, t, side="right")) - 1
        return min(max(i, 0), self.t.size - 2)

    def eval(self, t: float) -> tuple[float, float]:
        """Densely interpolated (x, v) at time t inside the span."""
        if self.accel is None:
            raise ValueError("trajectory has no acceleration knots; dense output unavailable")
        if self.t.size == 1:
            return float(self.x[0]), float(self.v[0])
        i = self._interval(t)
        h = self.t[i + 1] - self.t[i]
        s = (t - self.t[i]) / h
        return _hermite5(
            s,
            h,
            self.x[i],
            self.v[i],
            self.accel[i],
            self.x[i + 1],
            self.v[i + 1],
            self.accel[i + 1],
        )

    def eval_x(self, t: float) -> float:
        return self.eval(t)[0]

    def eval_v(self, t: float) -> float:
        return self.eval(t)[1]


def _hermite5(s, h, x0, v0, a0, x1, v1, a1):
    """Quintic two-point Hermite interpolation on normalized s in [0, 1].

    Matches value, first and second derivative at both endpoints; returns
    (x(s), x'(s)/h), i.e. the interpolated displacement and velocity.
    """
    # basis in the monomial form p(s) = x0 + h v0 s + h^2 a0 s^2/2 + c3 s^3 + c4 s^4 + c5 s^5
    r = x1 - x0 - h * v0 - 0.5 * h * h * a0
    q = h * (v1 - v0) - h * h * a0
    w = h * h * (a1 - a0)
    c3 = 10.0 * r - 4.0 * q + 0.5 * w
    c4 = -15.0 * r + 7.0 * q - w
    c5 = 6.0 * r - 3.0 * q + 0.5 * w
    s2 = s * s
    x = x0 + h * v0 * s + 0.5 * h * h * a0 * s2 + s2 * s * (c3 + s * (c4 + s * c5))
    dx = h * v0 + h * h * a0 * s + s2 * (3.0 * c3 + s * (4.0 * c4 + 5.0 * s * c5))
    return float(x), float(dx / h)


@dataclass(frozen=True)
class EnergyReport:
    """Energy constant K of a run plus the sampled energy series."""

    K: float
    series: np.ndarray  # shape (n, 2): columns (t, E)

    @property
    def max_drift(self) -> float:
        return float(np.abs(self.series[:, 1] - self.K).max())


@dataclass(frozen=True)
class Equilibrium:
    """Rest point of the unperturbed flow with its linearization type."""

    x: float
    kind: str  # "center" | "saddle" | "degenerate"


def acceleration(p: OscillatorParams, t: float, x: float, v: float) -> float:
    """Right-hand side a x - b x^3 - c x^5 + eps (gamma cos(omega t) - delta v)."""
    x2 = x * x
    out = x * (p.a - x2 * (p.b + p.c * x2))
    if p.epsilon != 0.0:
        out += p.epsilon * (p.gamma * math.cos(p.omega * t) if p.gamma != 0.0 else 0.0)
        out -= p.epsilon * p.delta * v
    return out


def rhs(p: OscillatorParams, s: State) -> float:
    """Acceleration at a state; rejects non-finite input."""
    if not s.is_finite():
        raise ValueError(f"non-finite state {s}")
    return acceleration(p, s.t, s.x, s.v)


def _stiffness(p: OscillatorParams, x: float) -> float:
    """d/dx of the conservative force a x - b x^3 - c x^5."""
    x2 = x * x
    return p.a - 3.0 * p.b * x2 - 5.0 * p.c * x2 * x2


def _classify(p: OscillatorParams, x: float) -> str:
    # eigenvalues of the eps=0 linearization are +-sqrt(stiffness)
    st = _stiffness(p, x)
    if st > 0.0:
        return "saddle"
    if st < 0.0:
        return "center"
    return "degenerate"


def equilibria(p: OscillatorParams) -> list[Equilibrium]:
    """Real rest points of x'' = a x - b x^3 - c x^5, classified by the
    sign structure of the linearization, sorted by displacement."""
    roots = [0.0]
    if p.c != 0.0:
        disc = p.b * p.b + 4.0 * p.a * p.c
        if disc >= 0.0:
            sq = math.sqrt(disc)
            for num in (-p.b + sq, -p.b - sq):
                x2 = num / (2.0 * p.c)
                if x2 > 0.0:
                    r = math.sqrt(x2)
                    roots.extend([r, -r])
                elif x2 == 0.0:
                    pass  # coincides with the origin
    elif p.b != 0.0:
        x2 = p.a / p.b
        if x2 > 0.0:
            r = math.sqrt(x2)
            roots.extend([r, -r])
    roots = sorted(set(roots))
    return [Equilibrium(x, _classify(p, x)) for x in roots]


def energy(p: OscillatorParams, x, v):
    """E = v^2/2 - a x^2/2 + b x^4/4 + c x^6/6 (scalar or array)."""
    x2 = x * x
    return v * v / 2.0 - p.a * x2 / 2.0 + p.b * x2 * x2 / 4.0 + p.c * x2 * x2 * x2 / 6.0


def energy_report(p: OscillatorParams, traj: Trajectory) -> EnergyReport:
    """Energy series along a trajectory; K is the initial energy."""
    E = energy(p, traj.x, traj.v)
    series = np.column_stack([traj.t, E])
    return EnergyReport(K=float(E[0]), series=series)


def separatrix_velocity(p: OscillatorParams, x0: float) -> tuple[float, float]:
    """Velocities (+v, -v) placing (x0, v) on the zero-energy level set.

    v = x0 * sqrt((6a - 3b x0^2 - 2c x0^4) / 6); a negative radicand means
    the zero level set has no point above x0.
    """
    x2 = x0 * x0
    radicand = (6.0 * p.a - 3.0 * p.b * x2 - 2.0 * p.c * x2 * x2) / 6.0
    if radicand < 0.0:
        raise ValueError(
            f"x0={x0} is outside the separatrix reach: (6a - 3b x0^2 - 2c x0^4)/6 = {radicand} < 0"
        )
    v = x0 * math.sqrt(radicand)
    return v, -v


def hamiltonian_fields(p: OscillatorParams, q: float, pm: float) -> tuple[float, float]:
    """Canonical field (dq/dt, dp/dt) = (p, a q - b q^3 - c q^5) of the
    unperturbed flow (damping and forcing stripped)."""
    q2 = q * q
    return pm, q * (p.a - q2 * (p.b + p.c * q2))
