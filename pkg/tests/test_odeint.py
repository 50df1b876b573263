import math

import numpy as np
import pytest

from cqduffing import IntegrationError, OscillatorParams, State, StepControl, integrate, integrate_delayed
from cqduffing.core import acceleration, energy
from cqduffing.odeint import HistoryBuffer


def harmonic(t, x, v):
    return -x


class TestAdaptive:
    def test_harmonic_round_trip(self):
        tr = integrate(harmonic, State(0, 1, 0), 2 * math.pi,
                       StepControl(abs_tol=1e-10, rel_tol=1e-10))
        assert abs(tr.x[-1] - 1.0) < 1e-8 and abs(tr.v[-1]) < 1e-8

    def test_energy_drift(self):
        p = OscillatorParams(1, 1, 1, epsilon=0)
        tr = integrate(lambda t, x, v: acceleration(p, t, x, v), State(0, 0.5, 0),
                       100.0, StepControl(abs_tol=1e-10, rel_tol=1e-10))
        E = energy(p, tr.x, tr.v)
        assert np.abs(E - E[0]).max() < 1e-8

    def test_dense_output_matches_direct_landing(self):
        ctrl = StepControl(abs_tol=1e-9, rel_tol=1e-9)
        long = integrate(harmonic, State(0, 1, 0), 3.0, ctrl)
        for tq in (0.7137, 1.9533, 2.718):
            short = integrate(harmonic, State(0, 1, 0), tq, ctrl)
            xd, vd = long.eval(tq)
            assert abs(xd - short.x[-1]) < 1e-8
            assert abs(vd - short.v[-1]) < 1e-8

    def test_eval_outside_span_raises(self):
        tr = integrate(harmonic, State(0, 1, 0), 1.0, StepControl())
        with pytest.raises(ValueError, match="outside"):
            tr.eval(2.0)

    def test_max_steps_names_time(self):
        with pytest.raises(IntegrationError, match="max_steps"):
            integrate(harmonic, State(0, 1, 0), 100.0, StepControl(max_steps=10))

    def test_blowup_names_time(self):
        with pytest.raises(IntegrationError) as err:
            integrate(lambda t, x, v: x**3, State(0, 2.0, 1.0), 10.0,
                      StepControl(abs_tol=1e-6, rel_tol=1e-6, max_steps=100000))
        assert math.isfinite(err.value.t) or err.value.t > 0

    def test_requires_forward_time(self):
        with pytest.raises(ValueError, match="exceed"):
            integrate(harmonic, State(1.0, 1, 0), 0.5, StepControl())


class TestRk4:
    def test_convergence_order(self):
        dts = [0.1, 0.05, 0.025, 0.0125]
        errs = []
        for dt in dts:
            tr = integrate(harmonic, State(0, 1, 0), 2 * math.pi,
                           StepControl(dt=dt, method="rk4"))
            errs.append(math.hypot(tr.x[-1] - 1.0, tr.v[-1]))
        slopes = np.diff(np.log(errs)) / np.diff(np.log(dts))
        assert np.all(np.abs(slopes - 4.0) < 0.2), slopes

    def test_partial_final_step_lands_exactly(self):
        tr = integrate(harmonic, State(0, 1, 0), 1.05, StepControl(dt=0.1, method="rk4"))
        assert tr.t[-1] == pytest.approx(1.05, abs=1e-14)

    def test_fixed_step_requires_dt(self):
        with pytest.raises(ValueError, match="rk4"):
            StepControl(method="rk4")


class TestDelayed:
    def test_zero_gain_matches_undelayed_bitwise(self):
        p = OscillatorParams(1, 1, 0.2, delta=0.1, gamma=0.35, omega=1.4, epsilon=1)

        def f_plain(t, x, v):
            return acceleration(p, t, x, v)

        def f_delayed(t, x, v, vd):
            return acceleration(p, t, x, v) + 0.0 * (vd - v)

        ctrl = StepControl(dt=0.02, method="rk4")
        tr1 = integrate(f_plain, State(0, 0.1, 0.0), 8.0, ctrl)
        tr2 = integrate_delayed(f_delayed, State(0, 0.1, 0.0), lambda t: 0.0, 1.0, 8.0, ctrl)
        assert np.array_equal(tr1.x, tr2.x) and np.array_equal(tr1.v, tr2.v)

    def test_linear_dde_analytic_value(self):
        # v'(t) = -v(t-1), v = 1 on [-1, 0]; piecewise-polynomial steps give
        # v(t) = 1 - t on [0,1] and v(2) = -1/2 exactly.
        tr = integrate_delayed(lambda t, x, v, vd: -vd, State(0, 0.0, 1.0),
                               lambda t: 1.0, 1.0, 2.0,
                               StepControl(abs_tol=1e-10, rel_tol=1e-10))
        assert abs(tr.eval_v(1.0) - 0.0) < 1e-6
        assert abs(tr.v[-1] + 0.5) < 1e-6

    def test_long_delay_consults_policy(self):
        calls = []

        def history(t):
            calls.append(t)
            return 0.0

        tr = integrate_delayed(lambda t, x, v, vd: -x + vd, State(0, 1.0, 0.0),
                               history, 50.0, 5.0, StepControl(dt=0.05, method="rk4"))
        assert calls and all(t <= 0.0 for t in calls)
        assert np.all(np.isfinite(tr.x))

    def test_chaotic_feedback_run_reaches_horizon(self):
        p = OscillatorParams(1, 1, 0.2, delta=0.1, gamma=0.35, omega=1.4, epsilon=1)
        mu, tau = 2.25311, 3.73093

        def f(t, x, v, vd):
            return acceleration(p, t, x, v) + mu * (vd - v)

        ctrl = StepControl(dt=(2 * math.pi / 1.4) / 100, method="rk4")
        tr = integrate_delayed(f, State(0, 0, 0), lambda t: 0.0, tau, 500.0, ctrl)
        assert tr.t[-1] == pytest.approx(500.0, abs=1e-9)
        assert np.all(np.isfinite(tr.x))

    def test_tau_must_be_positive(self):
        with pytest.raises(ValueError, match="tau"):
            integrate_delayed(lambda t, x, v, vd: -x, State(0, 1, 0), lambda t: 0.0,
                              0.0, 1.0, StepControl())


class TestHistoryBuffer:
    def test_fallback_then_interpolation(self):
        buf = HistoryBuffer(lambda t: -7.0)
        assert buf.velocity(-3.0) == -7.0
        buf.append(0.0, 0.0, 1.0, 0.0)
        buf.append(1.0, 1.0, 1.0, 0.0)
        assert buf.velocity(0.5) == pytest.approx(1.0, abs=1e-12)
        assert buf.velocity(-0.1) == -7.0

    def test_rejects_rewinding(self):
        buf = HistoryBuffer(lambda t: 0.0)
        buf.append(0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError, match="advance"):
            buf.append(0.0, 1.0, 1.0, 0.0)

    def test_far_future_read_rejected(self):
        buf = HistoryBuffer(lambda t: 0.0)
        buf.append(0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError, match="beyond"):
            buf.velocity(1.0)
