"""Small numerical helpers: local polynomial derivatives and curve distances."""
from __future__ import annotations

import math

import numpy as np
from scipy.spatial import cKDTree

from .rk import hermite


def local_fit_derivatives(x, y, window: int = 7, degree: int = 4):
    """First and second derivatives of sampled data by moving least-squares polynomials.

    Each sample gets a degree-``degree`` fit over the ``window`` nearest samples
    (shifted inward at the ends). Works on non-uniform abscissae.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < window:
        raise ValueError(f"need at least {window} samples, got {n}")
    half = window // 2
    lo = np.clip(np.arange(n) - half, 0, n - window)
    idx = lo[:, None] + np.arange(window)[None, :]
    xs = x[idx] - x[:, None]
    h = np.max(np.abs(xs), axis=1)
    V = (xs / h[:, None])[:, :, None] ** np.arange(degree + 1)[None, None, :]
    # batched least squares through the pseudo-inverse (SVD based)
    coef = np.einsum("ijk,ik->ij", np.linalg.pinv(V), y[idx])
    return coef[:, 1] / h, 2 * coef[:, 2] / (h * h)


def _golden_min(fn, lo, hi, iters=60):
    """Vectorized golden-section minimization of fn on [lo, hi] (arrays)."""
    g = (math.sqrt(5) - 1) / 2
    a, b = lo.copy(), hi.copy()
    c = b - g * (b - a)
    d = a + g * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        d_new = np.where(left, c, a + g * (b - a))
        c_new = np.where(left, b - g * (b - a), d)
        fd_new = np.where(left, fc, np.nan)
        fc_new = np.where(left, np.nan, fd)
        c, d = c_new, d_new
        need_c = np.isnan(fc_new)
        need_d = np.isnan(fd_new)
        fc = np.where(need_c, fn(c), fc_new)
        fd = np.where(need_d, fn(d), fd_new)
    x = 0.5 * (a + b)
    return x, fn(x)


def directed_curve_distance(points, s, curve, dcurve) -> float:
    """sup over ``points`` of the distance to the Hermite curve through (s, curve, dcurve)."""
    points = np.atleast_2d(points)
    tree = cKDTree(curve)
    _, idx = tree.query(points)
    best = np.full(len(points), np.inf)
    m = len(s)
    for shift in (-1, 0):
        j = np.clip(idx + shift, 0, m - 2)
        s0, s1 = s[j], s[j + 1]
        y0, y1 = curve[j], curve[j + 1]
        f0, f1 = dcurve[j], dcurve[j + 1]

        def dist2(tau):
            pt = hermite(s0[:, None], s1[:, None], y0, y1, f0, f1, tau[:, None])
            return np.sum((pt - points) ** 2, axis=1)

        _, val = _golden_min(dist2, s0.astype(float), s1.astype(float))
        best = np.minimum(best, val)
    return float(np.sqrt(np.max(best)))


def hausdorff_distance(s_a, a, da, s_b, b, db) -> float:
    """Symmetric Hausdorff distance between two sampled curves with known tangents."""
    return max(
        directed_curve_distance(a, s_b, b, db),
        directed_curve_distance(b, s_a, a, da),
    )
