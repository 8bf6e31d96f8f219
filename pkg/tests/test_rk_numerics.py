import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from simonscone import ConvergenceError
from simonscone.numerics import hausdorff_distance, local_fit_derivatives
from simonscone.rk import dopri5, hermite, hermite_derivative


def test_dopri5_harmonic_oscillator():
    traj = dopri5(lambda t, y: np.array([y[1], -y[0]]), 0.0, [1.0, 0.0], 20.0, rtol=1e-12, atol=1e-12)
    assert_allclose(traj.y[-1], [math.cos(20), -math.sin(20)], atol=1e-9)
    assert traj.t[-1] == 20.0


def test_dopri5_stop_and_budget():
    traj = dopri5(lambda t, y: np.array([1.0]), 0.0, [0.0], 100.0, rtol=1e-8, atol=1e-8,
                  max_step=0.5, stop=lambda t, y: y[0] > 3)
    assert traj.stopped and 3 < traj.y[-1, 0] <= 3.5 + 1e-12
    with pytest.raises(ConvergenceError):
        dopri5(lambda t, y: -y, 0.0, [1.0], 100.0, rtol=1e-8, atol=1e-8, max_step=0.01, max_steps=10)


def test_hermite_exact_for_cubics():
    p = np.polynomial.Polynomial([0.3, -1, 2, 0.5])
    dp = p.deriv()
    x = np.linspace(0.2, 1.7, 9)
    assert_allclose(hermite(0.2, 1.7, p(0.2), p(1.7), dp(0.2), dp(1.7), x), p(x), atol=1e-13)
    assert_allclose(hermite_derivative(0.2, 1.7, p(0.2), p(1.7), dp(0.2), dp(1.7), x), dp(x), atol=1e-12)


def test_local_fit_nonuniform():
    rng = np.random.default_rng(0)
    x = np.sort(rng.uniform(0, 3, 60))
    d1, d2 = local_fit_derivatives(x, np.sin(x), 7, 5)
    assert_allclose(d1, np.cos(x), atol=1e-5)
    assert_allclose(d2, -np.sin(x), atol=1e-3)


def test_hausdorff_between_offset_circles():
    s = np.linspace(0, 2 * math.pi, 200)
    a = np.column_stack([np.cos(s), np.sin(s)])
    da = np.column_stack([-np.sin(s), np.cos(s)])
    d = hausdorff_distance(s, a, da, s, 1.01 * a, 1.01 * da)
    assert_allclose(d, 0.01, rtol=1e-6)
    # a reparametrized copy is at distance ~0
    s2 = np.linspace(0, 2 * math.pi, 157)
    b = np.column_stack([np.cos(s2), np.sin(s2)])
    db = np.column_stack([-np.sin(s2), np.cos(s2)])
    assert hausdorff_distance(s, a, da, s2, b, db) < 1e-7
