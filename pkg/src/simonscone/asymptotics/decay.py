"""Fitting the decay of a graph against the indicial roots of the Jacobi operator."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ValidationError
from ..spectral import IndicialRoots
from .graphs import RadialGraph


@dataclass
class DecayFit:
    rate: float
    frequency: float
    window: tuple[float, float]
    residual: float
    expected_rate: float
    expected_frequency: float
    samples: int
    sign_changes: int

    @property
    def rate_error(self) -> float:
        return abs(self.rate - self.expected_rate) / abs(self.expected_rate)

    @property
    def frequency_error(self) -> float:
        if self.expected_frequency == 0:
            return abs(self.frequency)
        return abs(self.frequency - self.expected_frequency) / self.expected_frequency


def _zero_crossings(t, g):
    idx = np.nonzero(np.signbit(g[:-1]) != np.signbit(g[1:]))[0]
    t0, t1, g0, g1 = t[idx], t[idx + 1], g[idx], g[idx + 1]
    return t0 - g0 * (t1 - t0) / (g1 - g0)


def _peaks(t, g):
    """Refined extrema of log|g| between consecutive zero crossings (parabolic fit)."""
    lg = np.log(np.abs(g))
    cross = np.nonzero(np.signbit(g[:-1]) != np.signbit(g[1:]))[0]
    pts = []
    for lo, hi in zip(cross[:-1] + 1, cross[1:] + 1):
        if hi - lo < 3:
            continue
        i = lo + int(np.argmax(lg[lo:hi]))
        i = min(max(i, lo + 1), hi - 2)
        x, y = t[i - 1 : i + 2], lg[i - 1 : i + 2]
        c2, c1, c0 = np.polyfit(x - x[1], y, 2)
        if c2 < 0:
            xm = -c1 / (2 * c2)
            pts.append((x[1] + xm, c0 + c1 * xm + c2 * xm * xm))
        else:
            pts.append((t[i], lg[i]))
    return np.array(pts)


def default_window(graph: RadialGraph, start_level: float = 1e-3, floor: float = 1e-250) -> tuple[float, float]:
    """From the first t after which |g| stays below start_level * max|g| to the last sample."""
    g = np.abs(graph.g)
    above = np.nonzero(g >= start_level * np.max(g))[0]
    i0 = above[-1] + 1 if above.size else 0
    usable = np.nonzero(g > floor)[0]
    i1 = usable[-1] if usable.size else g.size - 1
    if i0 >= i1:
        raise ValidationError("graph decays too little to choose a fitting window")
    return float(graph.t[i0]), float(graph.t[i1])


def fit_decay(graph: RadialGraph, expected: IndicialRoots, window: Optional[tuple[float, float]] = None,
              min_sign_changes: int = 10, min_efolds: float = 5.0) -> DecayFit:
    """Decay rate (and frequency, in the oscillatory case) of g over a tail window.

    Oscillatory roots: the envelope rate is regressed from log|g| at its local
    extrema, the frequency from the mean spacing of zero crossings. Real roots:
    straight regression of log|g| on t.
    """
    lo, hi = window or default_window(graph)
    if hi - lo < 5:
        raise ValidationError(f"window [{lo:.3g}, {hi:.3g}] shorter than 5")
    mask = (graph.t >= lo) & (graph.t <= hi)
    t, g = graph.t[mask], graph.g[mask]
    zeros = _zero_crossings(t, g)
    if expected.oscillatory:
        if zeros.size < min_sign_changes:
            raise ValidationError(f"only {zeros.size} sign changes in window, need {min_sign_changes}")
        pk = _peaks(t, g)
        coef, res, *_ = np.polyfit(pk[:, 0], pk[:, 1], 1, full=True)
        rate = float(coef[0])
        frequency = math.pi / float(np.mean(np.diff(zeros)))
        residual = float(np.sqrt(res[0] / len(pk))) if res.size else 0.0
    else:
        lg = np.log(np.abs(g))
        if np.ptp(lg) < min_efolds:
            raise ValidationError(f"window spans {np.ptp(lg):.3g} e-folds, need {min_efolds}")
        coef, res, *_ = np.polyfit(t, lg, 1, full=True)
        rate = float(coef[0])
        frequency = 0.0
        residual = float(np.sqrt(res[0] / t.size)) if res.size else 0.0
    return DecayFit(
        rate=rate,
        frequency=frequency,
        window=(float(lo), float(hi)),
        residual=residual,
        expected_rate=expected.dominant_rate,
        expected_frequency=expected.frequency,
        samples=int(t.size),
        sign_changes=int(zeros.size),
    )
