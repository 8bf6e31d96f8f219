import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.integrate import dblquad, quad

from simonscone import ConeParams, ValidationError
from simonscone.cone import (
    ball_volume,
    cone_density,
    cone_point,
    link_volume,
    mean_curvature,
    shape_operator_eigenvalues,
    sphere_volume,
)


def sphere_volume_quadrature(m):
    """|S^m| = |S^{m-1}| * int_0^pi sin^{m-1}, starting from |S^0| = 2."""
    vol = 2.0
    for k in range(1, m + 1):
        vol *= quad(lambda x: math.sin(x) ** (k - 1), 0, math.pi, epsabs=0, epsrel=1e-13)[0]
    return vol


def test_sphere_volumes_match_quadrature():
    for m in range(0, 9):
        assert_allclose(sphere_volume(m), sphere_volume_quadrature(m), rtol=1e-13)
    assert_allclose(sphere_volume(1), 2 * math.pi, rtol=1e-15)
    assert_allclose(sphere_volume(2), 4 * math.pi, rtol=1e-15)
    assert_allclose(ball_volume(3), 4 * math.pi / 3, rtol=1e-15)


def test_params_validation():
    for n, p in [(1, 1), (2, 0), (2, 2), (5, 7)]:
        with pytest.raises(ValidationError):
            ConeParams(n, p)
    P = ConeParams(7, 3)
    assert P.q == 4
    assert_allclose(math.cos(P.theta0) ** 2, 3 / 7, rtol=1e-15)
    assert_allclose(P.sin2, 2 * math.sqrt(12) / 7, rtol=1e-15)
    assert P.swapped() == ConeParams(7, 4)


def test_link_volume_examples():
    assert_allclose(link_volume(ConeParams(2, 1)), 2 * math.pi**2, rtol=1e-14)
    # S^2(1/sqrt2) x S^2(1/sqrt2): (4 pi / 2)^2
    assert_allclose(link_volume(ConeParams(4, 2)), 4 * math.pi**2, rtol=1e-14)
    assert_allclose(cone_density(ConeParams(4, 2)), 1.5, rtol=1e-14)


def test_link_volume_quadrature_oracle_4_2():
    """Area of r S^2 x r S^2 with r^2 = 1/2 from the spherical-coordinate area element."""
    r2 = 0.5
    area_s2 = dblquad(lambda t, f: r2 * math.sin(t), 0, 2 * math.pi, 0, math.pi, epsabs=0, epsrel=1e-13)[0]
    assert_allclose(area_s2**2, link_volume(ConeParams(4, 2)), rtol=1e-12)
    assert_allclose(area_s2**2 / sphere_volume_quadrature(4), 1.5, rtol=1e-12)


@pytest.mark.parametrize("n", range(2, 9))
def test_density_between_one_and_two(n):
    for p in range(1, n):
        d = cone_density(ConeParams(n, p))
        assert 1 + 1e-9 < d < 2
        assert_allclose(d, cone_density(ConeParams(n, n - p)), rtol=1e-14)


def test_density_2_1_is_half_pi():
    assert_allclose(cone_density(ConeParams(2, 1)), math.pi / 2, rtol=1e-14)


def _unit(rng, m):
    v = rng.standard_normal(m)
    return v / np.linalg.norm(v)


def test_cone_point_geometry():
    rng = np.random.default_rng(1)
    for n in range(2, 9):
        for p in range(1, n):
            P = ConeParams(n, p)
            x, y = _unit(rng, p + 1), _unit(rng, n - p + 1)
            pt = cone_point(P, 0.3, x, y)
            assert_allclose(np.linalg.norm(pt.position), math.exp(0.3), rtol=1e-14)
            assert_allclose(np.linalg.norm(pt.normal), 1, rtol=1e-14)
            assert abs(np.dot(pt.position, pt.normal)) < 1e-14
            moved = cone_point(P, 1.5, x, y)
            assert_allclose(moved.position, math.exp(1.2) * pt.position, rtol=1e-14)


def test_cone_point_rejects_non_unit():
    P = ConeParams(2, 1)
    with pytest.raises(ValidationError):
        cone_point(P, 0.0, np.array([1.0, 1.0]), np.array([1.0, 0.0]))
    with pytest.raises(ValidationError):
        cone_point(P, 0.0, np.array([1.0, 0.0, 0.0]), np.array([1.0, 0.0]))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1))), st.floats(-5, 5))
def test_shape_operator_traceless(np_pair, t):
    P = ConeParams(*np_pair)
    eig = shape_operator_eigenvalues(P, t)
    assert sum(m for _, m in eig) == P.n + 1
    trace = sum(k * m for k, m in eig)
    assert abs(trace) <= 1e-12 * math.exp(-t) * P.n
    assert abs(mean_curvature(P, t)) <= 1e-12 * math.exp(-t) * P.n
