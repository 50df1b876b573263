import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def fd_second_derivative(f, t, h=1e-5):
    """Central second difference of a scalar function."""
    return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h)


def fd_first_derivative(f, t, h=1e-6):
    return (f(t + h) - f(t - h)) / (2.0 * h)


def ode_residual_fd(a, b, c, x_of_t, ts, h=1e-5):
    """Max |x'' - a x + b x^3 + c x^5| over ts by central differences."""
    worst = 0.0
    for t in ts:
        x = x_of_t(t)
        xdd = fd_second_derivative(x_of_t, t, h)
        worst = max(worst, abs(xdd - a * x + b * x**3 + c * x**5))
    return worst
