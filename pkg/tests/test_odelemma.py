import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from simonscone import ValidationError
from simonscone.odelemma import (
    ExpSum,
    OdeProblem,
    decompose,
    direct_solution,
    exact_solution,
    random_problem,
    run_suite,
    weighted_norm,
)

ZERO = lambda u: np.zeros_like(np.asarray(u, dtype=float))


def test_pure_mode():
    dec = decompose(OdeProblem(-1, -2, ZERO, 3, -3, 0.5), 10.0)
    assert_allclose([dec.a, dec.b], [3, 0], atol=1e-14)
    assert np.max(np.abs(dec.v)) == 0


def test_particular_solution_only():
    prob = OdeProblem(-1, -2, lambda u: np.exp(-3 * np.asarray(u)), 0.5, -1.5, 2.5)
    dec = decompose(prob, 10.0)
    assert_allclose([dec.a, dec.b], [0, 0], atol=1e-12)
    assert_allclose(dec.v, 0.5 * np.exp(-3 * dec.t), atol=1e-12)
    assert dec.bounds.v_holds and dec.bounds.coeff_holds


def test_oscillatory_pair():
    lam = complex(-1.5, math.sqrt(7) / 2)
    dec = decompose(OdeProblem(lam, lam.conjugate(), ZERO, 1, -1.5, 1.0), 10.0)
    assert_allclose([dec.a, dec.b], [0.5, 0.5], atol=1e-14)
    g = dec.reconstruct()
    assert_allclose(g.real, np.exp(-1.5 * dec.t) * np.cos(math.sqrt(7) / 2 * dec.t), atol=1e-14)
    assert np.max(np.abs(g.imag)) < 1e-14


def test_reconstruction_matches_direct_integration():
    rng = np.random.default_rng(7)
    for _ in range(10):
        prob = random_problem(rng)
        dec = decompose(prob, 10.0)
        ref = direct_solution(prob, dec.t)
        assert np.max(np.abs(dec.reconstruct() - ref)) <= 1e-7 * max(1.0, np.max(np.abs(ref)))


def test_linearity():
    lam, mu, delta = -0.5, complex(-2, 0), 1.0
    f1 = lambda u: np.exp(-1.2 * np.asarray(u))
    f2 = lambda u: np.exp(-2.7 * np.asarray(u)) * np.cos(np.asarray(u))
    alpha, beta = 0.7, -1.9
    d1 = decompose(OdeProblem(lam, mu, f1, 1.0, 0.2, delta), 10.0)
    d2 = decompose(OdeProblem(lam, mu, f2, -0.4, 0.9, delta), 10.0)
    f12 = lambda u: alpha * f1(u) + beta * f2(u)
    d12 = decompose(OdeProblem(lam, mu, f12, alpha * 1.0 + beta * -0.4, alpha * 0.2 + beta * 0.9, delta), 10.0)
    assert_allclose(d12.a, alpha * d1.a + beta * d2.a, atol=1e-9)
    assert_allclose(d12.b, alpha * d1.b + beta * d2.b, atol=1e-9)
    assert_allclose(d12.v, alpha * d1.v + beta * d2.v, atol=1e-9)


def test_tail_anchored_when_weight_beats_root():
    # delta + Re(lam) > 0 for both roots: v is the convolution from +infinity
    prob = OdeProblem(-0.3, -0.8, lambda u: np.exp(-2 * np.asarray(u)), 0.0, 0.0, 1.5)
    dec = decompose(prob, 12.0)
    assert set(dec.bounds.tail_bounds) == {"lam", "mu"}
    # (D - lam)(D - mu) C e^{-2t} = e^{-2t} gives C = 1 / ((-2 + 0.3)(-2 + 0.8))
    assert_allclose(dec.v, np.exp(-2 * dec.t) / 2.04, atol=1e-12)


@pytest.mark.parametrize("lam,mu,delta", [(-1, -1 + 1e-12, 0.5), (-1, -2, 1.0), (-1, -2, 2.0)])
def test_invalid_problems(lam, mu, delta):
    with pytest.raises(ValidationError):
        OdeProblem(lam, mu, ZERO, 0, 0, delta)


def test_weighted_norm():
    t = np.linspace(0, 5, 11)
    assert_allclose(weighted_norm(t, np.exp(-2 * t), 2.0), 1.0, rtol=1e-14)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_random_problem_estimates(seed):
    prob = random_problem(np.random.default_rng(seed))
    dec = decompose(prob, 10.0)
    assert dec.bounds.v_holds
    assert dec.bounds.coeff_holds
    assert abs(prob.lam - prob.mu) >= 0.2


def test_small_suite():
    res = run_suite(seed=3, count=15)
    assert res.max_reconstruction_error <= 1e-7
    assert res.all_v_hold and res.all_coeff_hold
    assert 0 < res.observed_c <= 10


def test_closed_form_oracle_matches_integration():
    rng = np.random.default_rng(11)
    t = np.linspace(0, 10, 201)
    for _ in range(8):
        prob = random_problem(rng)
        assert isinstance(prob.f, ExpSum)
        ref = direct_solution(prob, t)
        assert np.max(np.abs(exact_solution(prob, t) - ref)) <= 1e-9 * max(1.0, np.max(np.abs(ref)))
    with pytest.raises(ValidationError):
        exact_solution(OdeProblem(-1, -2, ZERO, 1, 0, 0.5), t)
