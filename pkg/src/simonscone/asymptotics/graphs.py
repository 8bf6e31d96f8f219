"""Normal graphs over C_{n,p}: Y = e^t (X_1 + g N), with X_1, N the cone point and normal on the unit link."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from ..cone import ConeParams
from ..errors import ValidationError
from ..flow import ProfileCurve
from ..numerics import local_fit_derivatives


def amplitude_bound(params: ConeParams) -> float:
    """min(sqrt(p/(n-p)), sqrt((n-p)/p)); keeps both sphere factors of the graph non-degenerate."""
    r = math.sqrt(params.p / params.q)
    return min(r, 1 / r)


@dataclass
class RadialGraph:
    """Invariant graph g(t) sampled at increasing t, with first and second derivatives."""

    params: ConeParams
    t: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    ddg: np.ndarray
    source: Optional[ProfileCurve] = None
    dg_flow: Optional[np.ndarray] = None

    def __post_init__(self):
        if np.any(np.diff(self.t) <= 0):
            raise ValidationError("graph samples must have strictly increasing t")
        bound = amplitude_bound(self.params)
        if np.any(np.abs(self.g) >= bound):
            raise ValidationError(f"graph leaves the amplitude bound |g| < {bound:.6g}")

    def spline(self) -> CubicHermiteSpline:
        slope = self.dg_flow if self.dg_flow is not None else self.dg
        return CubicHermiteSpline(self.t, self.g, slope)


@dataclass
class TorusGraph:
    """Graph over C_{2,1} sampled on a uniform t grid times a uniform periodic angle grid.

    ``values[i, j, k]`` is g(t[i], theta_j, phi_k) with theta_j = 2 pi j / N1 the
    angle on the first circle and phi_k = 2 pi k / N2 on the second.
    """

    t: np.ndarray
    values: np.ndarray
    params: ConeParams = ConeParams(2, 1)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.params.n != 2:
            raise ValidationError("torus graphs are only defined for n = 2, p = 1")
        if self.values.ndim != 3 or self.values.shape[0] != self.t.size:
            raise ValidationError(f"values must have shape (len(t), N1, N2), got {self.values.shape}")
        if np.any(np.abs(self.values) >= amplitude_bound(self.params)):
            raise ValidationError("torus graph leaves the amplitude bound |g| < 1")

    @property
    def theta(self) -> np.ndarray:
        n1 = self.values.shape[1]
        return 2 * math.pi * np.arange(n1) / n1

    @property
    def phi(self) -> np.ndarray:
        n2 = self.values.shape[2]
        return 2 * math.pi * np.arange(n2) / n2

    @property
    def dt(self) -> float:
        steps = np.diff(self.t)
        if steps.size and np.ptp(steps) > 1e-9 * steps[0]:
            raise ValidationError("torus graph t grid must be uniform")
        return float(steps[0]) if steps.size else 0.0


def _graph_from_curve(curve: ProfileCurve):
    """t, g and dg/dt along the whole curve, computed from the angular deviation.

    With theta = theta0 + u: e^t = e^rho cos(u) and g = -tan(u), the same as
    e^t = a cos(theta0) + b sin(theta0), g = e^{-t}(a sin(theta0) - b cos(theta0)).
    """
    u, du = curve.du, curve.ddu
    t = curve.rho + np.log(np.cos(u))
    g = -np.tan(u)
    dt_ds = curve.drho - np.tan(u) * du
    dg_ds = -du / np.cos(u) ** 2
    return t, g, dt_ds, dg_ds


def profile_to_graph(curve: ProfileCurve, margin: float = 0.5, window: int = 7, degree: int = 5) -> RadialGraph:
    """Write the far part of a profile curve as a normal graph g(t) over the cone.

    Keeps the final stretch of samples on which t increases and
    |g| < margin * amplitude_bound; the cap region never qualifies.
    """
    t, g, dt_ds, dg_ds = _graph_from_curve(curve)
    bound = amplitude_bound(curve.params)
    ok = (np.abs(g) < margin * bound) & (dt_ds > 0)
    ok[:-1] &= np.diff(t) > 0
    bad = np.nonzero(~ok)[0]
    start = bad[-1] + 1 if bad.size else 0
    if curve.s.size - start < max(window, 8):
        raise ValidationError("profile curve has no usable graph tail (t not monotone near the end)")
    sl = slice(start, None)
    t, g = t[sl], g[sl]
    dg, ddg = local_fit_derivatives(t, g, window, degree)
    return RadialGraph(curve.params, t, g, dg, ddg, source=curve, dg_flow=(dg_ds / dt_ds)[sl])


def graph_to_profile(graph: RadialGraph) -> tuple[np.ndarray, np.ndarray]:
    """(a, b) of the invariant hypersurface described by the graph."""
    c, s = graph.params.cos0, graph.params.sin0
    scale = np.exp(graph.t)
    return scale * (c + graph.g * s), scale * (s - graph.g * c)


def graph_from_function(params: ConeParams, t, fn: Callable, dfn: Callable, ddfn: Callable) -> RadialGraph:
    t = np.asarray(t, dtype=float)
    return RadialGraph(params, t, fn(t), dfn(t), ddfn(t))


def resample_graph(graph: RadialGraph, t_grid, window: int = 7, degree: int = 5) -> RadialGraph:
    """Interpolate the graph onto a new increasing t grid."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] < graph.t[0] or t_grid[-1] > graph.t[-1]:
        raise ValidationError("resampling grid extends beyond the graph")
    sp = graph.spline()
    g = sp(t_grid)
    dg, ddg = local_fit_derivatives(t_grid, g, window, degree)
    return RadialGraph(graph.params, t_grid, g, dg, ddg, source=graph.source, dg_flow=sp(t_grid, 1))


def torus_from_function(fn: Callable, t, n_theta: int, n_phi: Optional[int] = None) -> TorusGraph:
    """Sample fn(t, theta, phi) (broadcasting) on a torus grid."""
    n_phi = n_phi or n_theta
    t = np.asarray(t, dtype=float)
    th = 2 * math.pi * np.arange(n_theta) / n_theta
    ph = 2 * math.pi * np.arange(n_phi) / n_phi
    vals = fn(t[:, None, None], th[None, :, None], ph[None, None, :])
    vals = np.broadcast_to(vals, (t.size, n_theta, n_phi)).copy()
    return TorusGraph(t, vals)


def torus_from_radial(graph: RadialGraph, t_grid, n_theta: int, n_phi: Optional[int] = None) -> TorusGraph:
    """Extend an invariant graph constantly in both angles."""
    if graph.params.n != 2:
        raise ValidationError("torus graphs need n = 2")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] < graph.t[0] or t_grid[-1] > graph.t[-1]:
        raise ValidationError("torus t grid extends beyond the graph")
    g = graph.spline()(t_grid)
    n_phi = n_phi or n_theta
    return TorusGraph(t_grid, np.broadcast_to(g[:, None, None], (t_grid.size, n_theta, n_phi)).copy())
