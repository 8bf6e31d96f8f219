"""Boundary flux of a graph over C_{2,1} across a torus slice {t = const}.

The hypersurface is Y = e^t (R + w N) with
R = (cos th, sin th, cos ph, sin ph)/sqrt2, N = (cos th, sin th, -cos ph, -sin ph)/sqrt2.
The flux is F = ∬ ∧(n, Y_th, Y_ph) dth dph where n = ∧(Y_t, Y_th, Y_ph)/|·| is the unit
normal; ∧ is the 4-dimensional cross product oriented so that ∧(R, E_th, E_ph) = N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .graphs import TorusGraph
from .residual import spectral_derivative

SQRT2 = math.sqrt(2.0)


@dataclass
class FluxResult:
    t: float
    flux_vector: np.ndarray
    quadrature_resolution: int

    def __post_init__(self):
        if not np.all(np.isfinite(self.flux_vector)):
            raise ValidationError("flux vector has non-finite entries")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.flux_vector))


def _frame(th, ph):
    c1, s1, c2, s2 = np.cos(th), np.sin(th), np.cos(ph), np.sin(ph)
    z = np.zeros_like(th)
    R = np.stack([c1, s1, c2, s2], -1) / SQRT2
    N = np.stack([c1, s1, -c2, -s2], -1) / SQRT2
    Eth = np.stack([-s1, c1, z, z], -1)
    Eph = np.stack([z, z, -s2, c2], -1)
    return R, N, Eth, Eph


def _det3(a, b, c):
    return (a[..., 0] * (b[..., 1] * c[..., 2] - b[..., 2] * c[..., 1])
            - a[..., 1] * (b[..., 0] * c[..., 2] - b[..., 2] * c[..., 0])
            + a[..., 2] * (b[..., 0] * c[..., 1] - b[..., 1] * c[..., 0]))


def _raw_cross(u, v, w):
    """Vector X with <X, x> = det(u, v, w, x), on the last axis (cofactor expansion)."""
    out = np.empty(np.broadcast_shapes(u.shape, v.shape, w.shape))
    for i in range(4):
        cols = [j for j in range(4) if j != i]
        out[..., i] = (-1) ** (3 + i) * _det3(u[..., cols], v[..., cols], w[..., cols])
    return out


def _orientation() -> float:
    R, N, Eth, Eph = _frame(np.array(0.3), np.array(1.1))
    return float(np.sign(np.dot(_raw_cross(R, Eth, Eph), N)))


ORIENTATION = _orientation()


def cross4(u, v, w):
    """Oriented 4-dimensional cross product, ∧(R, E_th, E_ph) = N."""
    return ORIENTATION * _raw_cross(u, v, w)


def _fourier_resample(values: np.ndarray, n_out: int) -> np.ndarray:
    """Trigonometric interpolation of a periodic 2-D grid to n_out x n_out."""
    from scipy.signal import resample

    out = values
    for axis in (0, 1):
        if out.shape[axis] != n_out:
            out = resample(out, n_out, axis=axis)
    return out


def _slice(graph: TorusGraph, t: float):
    """w and w_t at time t by degree-4 interpolation through the five nearest grid slices."""
    tt = graph.t
    if not tt[0] <= t <= tt[-1] or tt.size < 5:
        raise ValidationError(f"t={t} outside the graph grid [{tt[0]}, {tt[-1]}] (or fewer than 5 slices)")
    i = int(np.clip(np.searchsorted(tt, t) - 2, 0, tt.size - 5))
    x = tt[i : i + 5] - t
    # Lagrange weights for the value and first derivative at 0
    V = np.vander(x, 5, increasing=True)
    w0 = np.linalg.solve(V.T, np.eye(5)[0])
    w1 = np.linalg.solve(V.T, np.eye(5)[1])
    block = graph.values[i : i + 5]
    return np.tensordot(w0, block, 1), np.tensordot(w1, block, 1)


def flux(graph: TorusGraph, t: float, resolution: int = 256) -> FluxResult:
    if graph.params.n != 2:
        raise ValidationError("flux is implemented for n = 2, p = 1 only")
    if resolution < 64:
        raise ValidationError(f"resolution {resolution} below the minimum of 64")
    w, w_t = _slice(graph, t)
    w = _fourier_resample(w, resolution)
    w_t = _fourier_resample(w_t, resolution)
    ang = 2 * math.pi * np.arange(resolution) / resolution
    th, ph = np.meshgrid(ang, ang, indexing="ij")
    R, N, Eth, Eph = _frame(th, ph)
    w_th = spectral_derivative(w, 0)
    w_ph = spectral_derivative(w, 1)
    # every tangent vector carries a factor e^t; the conormal area element carries e^{2t}
    Y_t = R + (w + w_t)[..., None] * N
    Y_th = ((1 + w) / SQRT2)[..., None] * Eth + w_th[..., None] * N
    Y_ph = ((1 - w) / SQRT2)[..., None] * Eph + w_ph[..., None] * N
    normal = cross4(Y_t, Y_th, Y_ph)
    size = np.linalg.norm(normal, axis=-1)
    if np.min(size) < 1e-12:
        raise ValidationError("degenerate frame: Y_t, Y_theta, Y_phi nearly dependent")
    normal = normal / size[..., None]
    conormal = cross4(normal, Y_th, Y_ph)
    # the cone's own conormal -R/2 integrates to zero exactly; removing it pointwise
    # keeps its O(1) rounding out of a sum that is multiplied by e^{2t}
    cone = cross4(N, Eth / SQRT2, Eph / SQRT2)
    cell = (2 * math.pi / resolution) ** 2
    F = math.exp(2 * t) * (conormal - cone).sum(axis=(0, 1)) * cell
    return FluxResult(float(t), F, resolution)


def flux_leading_term(x1) -> np.ndarray:
    """(1/2) ∬ (X_1, N) N dth dph = (pi^2 / 2) X_1, since ∬ N N^T = pi^2 I."""
    return 0.5 * math.pi**2 * np.asarray(x1, dtype=float)
