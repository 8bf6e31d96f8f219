"""Residuals of the minimal surface equation for normal graphs over C_{n,p}.

For Y = e^t (X_1 + g N) the graph is minimal iff

    0 = d_t((g + g_t)/W)
        + n / (p A) Div_1(Grad_1 g / (A W)) + n / ((n-p) B) Div_2(Grad_2 g / (B W))
        + (n g + (g + g_t)(n + n k g)) / (W (1 + k g - g^2))

with A = 1 + sqrt((n-p)/p) g, B = 1 - sqrt(p/(n-p)) g, k = (n-2p)/sqrt(p(n-p)) and
W^2 = 1 + (g + g_t)^2 + (n/p)|Grad_1 g|^2/A^2 + (n/(n-p))|Grad_2 g|^2/B^2.
Its linear part is L g = g_tt + (n/p) Lap_1 g + (n/(n-p)) Lap_2 g + (n+1) g_t + 2n g;
the nonlinear remainder is whatever is left over.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..cone import ConeParams
from ..errors import ValidationError
from .graphs import RadialGraph, TorusGraph


@dataclass
class InvariantResidual:
    t: np.ndarray
    residual: np.ndarray
    scaled: np.ndarray
    linear: np.ndarray

    @property
    def nonlinear(self) -> np.ndarray:
        """Residual minus its linear part (the quadratic and higher terms)."""
        return self.residual - self.linear


def _k(params: ConeParams) -> float:
    return (params.n - 2 * params.p) / math.sqrt(params.p * params.q)


def residual_invariant(params: ConeParams, graph: RadialGraph) -> InvariantResidual:
    """Minimal surface residual for a graph with no angular dependence."""
    n = params.n
    k = _k(params)
    g, g1, g2 = graph.g, graph.dg, graph.ddg
    denom = 1 + k * g - g * g
    if np.any(denom <= 0):
        raise ValidationError("graph violates the amplitude bound (1 + k g - g^2 <= 0)")
    h = g + g1
    W = np.sqrt(1 + h * h)
    # d/dt(h / W) = h' / W^3
    res = (g1 + g2) / W**3 + (n * g + h * (n + n * k * g)) / (W * denom)
    lin = g2 + (n + 1) * g1 + 2 * n * g
    scale = np.abs(g) + np.abs(g1) + np.abs(g2)
    scaled = np.divide(np.abs(res), scale, out=np.zeros_like(res), where=scale > 0)
    return InvariantResidual(graph.t, res, scaled, lin)


def spectral_derivative(values: np.ndarray, axis: int) -> np.ndarray:
    """Derivative along a periodic axis of period 2 pi by FFT."""
    n = values.shape[axis]
    freq = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        freq[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    coef = np.fft.fft(values, axis=axis) * (1j * freq).reshape(shape)
    return np.fft.ifft(coef, axis=axis).real


def fd_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central difference along axis 0; drops two samples at each end."""
    return (values[:-4] - 8 * values[1:-3] + 8 * values[3:-1] - values[4:]) / (12 * h)


@dataclass
class TorusResidual:
    t: np.ndarray
    residual: np.ndarray


def residual_full_torus(graph: TorusGraph) -> TorusResidual:
    """Minimal surface residual on the torus grid, for n = 2, p = 1.

    Angles are differentiated spectrally and t by fourth-order differences, so
    the residual is returned on t[4:-4].
    """
    params = graph.params
    n, p, q = params.n, params.p, params.q
    n1, n2 = graph.values.shape[1:]
    if min(n1, n2) < 32:
        raise ValidationError(f"angular resolution {n1}x{n2} below the minimum of 32")
    if graph.t.size < 9:
        raise ValidationError("need at least 9 t samples")
    h = graph.dt
    g = graph.values
    k = _k(params)
    cA, cB = math.sqrt(q / p), math.sqrt(p / q)
    A = 1 + cA * g
    B = 1 - cB * g
    if np.any(A <= 0) or np.any(B <= 0):
        raise ValidationError("graph violates the amplitude bound")
    g_th = spectral_derivative(g, 1)
    g_ph = spectral_derivative(g, 2)
    g_t = np.full_like(g, np.nan)
    g_t[2:-2] = fd_derivative(g, h)
    hsum = g + g_t
    W = np.sqrt(1 + hsum**2 + (n / p) * g_th**2 / A**2 + (n / q) * g_ph**2 / B**2)
    first = np.full_like(g, np.nan)
    first[4:-4] = fd_derivative((hsum / W)[2:-2], h)
    div1 = spectral_derivative(g_th / (A * W), 1)
    div2 = spectral_derivative(g_ph / (B * W), 2)
    last = (n * g + hsum * (n + n * k * g)) / (W * (1 + k * g - g * g))
    res = first + n / (p * A) * div1 + n / (q * B) * div2 + last
    return TorusResidual(graph.t[4:-4], res[4:-4])
