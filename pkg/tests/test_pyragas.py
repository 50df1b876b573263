import math

import numpy as np
import pytest

from cqduffing import OscillatorParams, State, StepControl, Trajectory, rhs
from cqduffing.pyragas import (
    ControllerConfig,
    chebyshev_fit_orbit,
    controlled_rhs,
    run_controlled,
    search_mu_tau,
)

# chaotic reference oscillator and the published gain/delay pair
CHAOTIC = OscillatorParams(1, 1, 0.2, delta=0.1, gamma=0.35, omega=1.4, epsilon=1.0)
MU_REF, TAU_REF = 2.25311, 3.73093
T_FORCING = 2 * math.pi / 1.4

# published fit of the stabilized window, for shape comparison only
REF_POLY = np.array([0.0, -14 / 4985, 514 / 2927, -517 / 4498, 8 / 337, -3 / 2038])


class TestControlledRhs:
    def test_zero_gain_matches_plain(self):
        cfg = ControllerConfig(mu=0.0, tau=1.0)
        s = State(0.3, 0.7, -0.2)
        assert controlled_rhs(CHAOTIC, cfg, s, 5.0) == rhs(CHAOTIC, s)

    def test_matched_velocity_cancels(self):
        cfg = ControllerConfig(mu=2.0, tau=1.0)
        s = State(0.3, 0.7, -0.2)
        assert controlled_rhs(CHAOTIC, cfg, s, -0.2) == rhs(CHAOTIC, s)

    def test_reference_start(self):
        cfg = ControllerConfig(mu=MU_REF, tau=TAU_REF)
        assert controlled_rhs(CHAOTIC, cfg, State(0, 0, 0), 0.0) == pytest.approx(0.35)

    def test_config_validation(self):
        with pytest.raises(ValueError, match="tau"):
            ControllerConfig(mu=1.0, tau=0.0)
        with pytest.raises(ValueError, match="history"):
            ControllerConfig(mu=1.0, tau=1.0, history_policy="mirror")


class TestRunControlled:
    def test_uncontrolled_chaos_is_not_periodic(self):
        cfg = ControllerConfig(mu=0.0, tau=TAU_REF)
        _, rep = run_controlled(CHAOTIC, cfg, State(0, 0, 0), 260.0)
        assert not rep.is_periodic
        assert rep.residual > 0.1

    def test_published_pair_suppresses_chaos_onto_forcing_period(self):
        """The published (mu, tau) tames the chaos, but onto an orbit locked
        to the forcing period, not to tau: an exactly tau-periodic response
        of a cos(omega t)-driven equation would need a tau-periodic
        right-hand side, and tau is incommensurate with 2 pi / omega.  The
        controller therefore keeps a finite residual output."""
        cfg = ControllerConfig(mu=MU_REF, tau=TAU_REF)
        traj, rep = run_controlled(CHAOTIC, cfg, State(0, 0, 0), 500.0)
        assert not rep.is_periodic            # against period tau
        assert rep.residual == pytest.approx(0.105, abs=0.02)
        assert rep.controller_norm == pytest.approx(0.143, abs=0.02)
        # forcing-period residual on the same final window is tiny
        t1 = traj.t[-1]
        ts = np.linspace(t1 - 5 * cfg.tau, t1 - T_FORCING, 300)
        res_T = max(abs(traj.eval_x(t + T_FORCING) - traj.eval_x(t)) for t in ts)
        assert res_T < 1e-2

    def test_delay_at_forcing_period_vanishing_control(self):
        cfg = ControllerConfig(mu=MU_REF, tau=T_FORCING)
        _, rep = run_controlled(CHAOTIC, cfg, State(0, 0, 0), 500.0)
        assert rep.is_periodic
        assert rep.controller_norm < 1e-3
        assert rep.residual < 1e-4

    def test_quiet_system_trivially_periodic(self):
        p = OscillatorParams(1, 1, 1, delta=0.3, gamma=0.0, omega=1.4, epsilon=1.0)
        cfg = ControllerConfig(mu=0.2, tau=2.0)
        x_e = math.sqrt((math.sqrt(5) - 1) / 2)
        traj, rep = run_controlled(p, cfg, State(0.0, x_e + 0.1, 0.0), 200.0)
        assert rep.is_periodic
        assert rep.residual < 1e-6
        assert abs(traj.x[-1] - x_e) < 1e-6

    def test_stable_orbit_left_unchanged_when_delay_matches_period(self):
        # settle the uncontrolled flow onto its forcing-periodic orbit, then
        # switch the controller on with tau = period and the orbit's own
        # history: the feedback stays silent and the orbit continues
        from cqduffing.core import acceleration
        from cqduffing.odeint import integrate, integrate_delayed

        p = OscillatorParams(1, 1, 0, delta=0.1, gamma=0.20, omega=1.4, epsilon=1.0)
        ctrl = StepControl(dt=T_FORCING / 200, method="rk4")
        f_plain = lambda t, x, v: acceleration(p, t, x, v)
        settle = integrate(f_plain, State(0, 0, 0), 400.0, ctrl)
        s_on = settle.final_state()
        free = integrate(f_plain, s_on, s_on.t + 30.0, ctrl)
        mu = 1.5
        f_ctl = lambda t, x, v, vd: acceleration(p, t, x, v) + mu * (vd - v)
        fed = integrate_delayed(f_ctl, s_on, settle.eval_v, T_FORCING, s_on.t + 30.0, ctrl)
        for t in np.linspace(s_on.t + 1.0, s_on.t + 29.0, 57):
            assert fed.eval_x(t) == pytest.approx(free.eval_x(t), abs=1e-6)

    def test_vanishing_control_power_on_periodic_orbit(self):
        cfg = ControllerConfig(mu=MU_REF, tau=T_FORCING)
        traj, rep = run_controlled(CHAOTIC, cfg, State(0, 0, 0), 500.0)
        assert rep.is_periodic
        t1 = traj.t[-1]
        ts = np.linspace(t1 - cfg.tau, t1, 500)
        vals = [cfg.mu * (traj.eval_v(t - cfg.tau) - traj.eval_v(t)) for t in ts]
        integral = float(np.trapezoid(vals, ts))
        assert abs(integral) < 10 * rep.residual + 1e-12


class TestSearch:
    def test_published_cell_leads_containing_grid(self):
        cells = search_mu_tau(CHAOTIC, (0.75311, 2.25311), (1.73093, 5.73093), (4, 5))
        best = cells[0]
        assert best[0] == pytest.approx(MU_REF, abs=1e-9)
        assert best[1] == pytest.approx(TAU_REF, abs=1e-9)
        # lowest decile of 20 cells = rank 1
        assert len(cells) == 20

    def test_zero_gain_never_periodic_on_chaotic_params(self):
        cells = search_mu_tau(CHAOTIC, (0.0, 0.0), (2.0, 5.0), (1, 4))
        assert all(not periodic for *_, periodic in cells)

    def test_quiet_system_passes_everywhere(self):
        p = OscillatorParams(1, 1, 1, delta=0.4, gamma=0.0, omega=1.4, epsilon=1.0)
        cells = search_mu_tau(p, (0.1, 0.5), (1.0, 3.0), (2, 3),
                              s0=State(0.0, 0.6, 0.0))
        assert all(periodic for *_, periodic in cells)

    def test_order_invariance(self):
        grid = ((0.5, 2.5), (2.0, 5.0), (2, 2))
        forward = search_mu_tau(CHAOTIC, *grid)
        reordered = search_mu_tau(CHAOTIC, *grid,
                                  map_fn=lambda f, jobs: reversed([f(j) for j in jobs]))
        assert forward == reordered


class TestChebyshevFitOrbit:
    @staticmethod
    def _traj_from(fn, dfn, ddfn, t0, t1, n=800):
        ts = np.linspace(t0, t1, n)
        return Trajectory(ts, fn(ts), dfn(ts), ddfn(ts))

    def test_constant_orbit(self):
        tr = self._traj_from(lambda t: np.full_like(t, 0.7), lambda t: np.zeros_like(t),
                             lambda t: np.zeros_like(t), 0.0, 2.0)
        coeffs, resid = chebyshev_fit_orbit(tr, (0.0, 2.0), 1)
        assert resid < 1e-12
        assert coeffs[0] == pytest.approx(0.7, abs=1e-12)
        assert abs(coeffs[1]) < 1e-12

    def test_sine_window(self):
        tr = self._traj_from(np.sin, np.cos, lambda t: -np.sin(t), 0.0, math.pi)
        coeffs, resid = chebyshev_fit_orbit(tr, (0.0, math.pi), 5)
        assert resid < 1e-3
        dense = np.linspace(0, math.pi, 200)
        fitted = sum(c * dense**i for i, c in enumerate(coeffs))
        assert np.abs(fitted - np.sin(dense)).max() < 1e-3

    def test_degenerate_window_rejected(self):
        tr = self._traj_from(np.sin, np.cos, lambda t: -np.sin(t), 0.0, math.pi)
        with pytest.raises(ValueError, match="window"):
            chebyshev_fit_orbit(tr, (1.0, 0.5), 3)

    def test_stabilized_window_fit_reported(self, capsys):
        cfg = ControllerConfig(mu=MU_REF, tau=TAU_REF)
        traj, _ = run_controlled(CHAOTIC, cfg, State(0, 0, 0), 320.0)
        w1 = traj.t[-1]
        coeffs, resid = chebyshev_fit_orbit(traj, (w1 - TAU_REF, w1), 5)
        assert resid < 0.05
        # shape comparison against the published window polynomial (whose
        # window starts at its own phase); reported, not asserted
        ts = np.linspace(0, TAU_REF, 100)
        ref = sum(c * ts**i for i, c in enumerate(REF_POLY))
        fit = sum(c * (ts + w1 - TAU_REF) ** i for i, c in enumerate(coeffs))
        print(f"stabilized-orbit fit vs published shape: span_fit="
              f"[{fit.min():.3f},{fit.max():.3f}] span_ref=[{ref.min():.3f},{ref.max():.3f}]")
