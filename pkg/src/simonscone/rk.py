"""Dormand-Prince 5(4) embedded Runge-Kutta pair with step-size control.

Small and explicit on purpose: the orbit integrations need a custom error
scale (relative to the distance from an equilibrium) and a stop predicate on
the accepted states, which is awkward to express through scipy's event API.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConvergenceError

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B = np.array(A[6] + [0.0])
# difference between the 5th- and 4th-order weights
E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    steps: int
    rejected: int
    stopped: bool


def _initial_step(fun, t0, y0, f0, scale0, direction, order=5):
    d0 = np.max(np.abs(y0) / scale0)
    d1 = np.max(np.abs(f0) / scale0)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + direction * h0 * f0
    f1 = fun(t0 + direction * h0, y1)
    d2 = np.max(np.abs(f1 - f0) / scale0) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / (order + 1))
    return min(100 * h0, h1)


def dopri5(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0,
    t_end: float,
    *,
    rtol: float = 1e-11,
    atol: float = 1e-11,
    scale: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
    max_step: float = np.inf,
    first_step: Optional[float] = None,
    max_steps: int = 10**7,
    stop: Optional[Callable[[float, np.ndarray], bool]] = None,
    check: Optional[Callable[[float, np.ndarray], None]] = None,
) -> Trajectory:
    """Integrate y' = fun(t, y) from t0 toward t_end, recording every accepted step.

    ``scale(y_old, y_new)`` overrides the componentwise error scale
    ``atol + rtol * max(|y_old|, |y_new|)``. ``stop`` ends the run early after an
    accepted step; ``check`` may raise to abort. Running out of ``max_steps``
    raises ConvergenceError.
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    direction = 1.0 if t_end >= t0 else -1.0

    def default_scale(ya, yb):
        return atol + rtol * np.maximum(np.abs(ya), np.abs(yb))

    scale = scale or default_scale
    f = np.asarray(fun(t, y), dtype=float)
    h = first_step or _initial_step(fun, t, y, f, scale(y, y), direction)
    h = min(h, max_step)

    ts, ys, dys = [t], [y.copy()], [f.copy()]
    k = np.empty((7, y.size))
    steps = rejected = 0
    stopped = False
    while direction * (t_end - t) > 0:
        if steps >= max_steps:
            raise ConvergenceError(f"step budget of {max_steps} accepted steps exhausted at t={t}")
        h = min(h, abs(t_end - t))
        hs = direction * h
        k[0] = f
        for i in range(1, 7):
            yi = y + hs * (np.dot(A[i], k[:i]))
            k[i] = fun(t + C[i] * hs, yi)
        y_new = yi  # stage 7 evaluates at the 5th-order solution (FSAL)
        err = np.max(np.abs(hs * np.dot(E, k)) / scale(y, y_new))
        if not np.isfinite(err):
            rejected += 1
            h *= MIN_FACTOR
            if h < 1e-14 * max(1.0, abs(t)):
                raise ConvergenceError(f"non-finite state near t={t}")
            continue
        if err <= 1.0:
            t += hs
            y = y_new
            f = k[6].copy()
            steps += 1
            ts.append(t)
            ys.append(y.copy())
            dys.append(f)
            if check is not None:
                check(t, y)
            if stop is not None and stop(t, y):
                stopped = True
                break
            factor = MAX_FACTOR if err == 0 else min(MAX_FACTOR, SAFETY * err ** -0.2)
            h = min(h * factor, max_step)
        else:
            rejected += 1
            h *= max(MIN_FACTOR, SAFETY * err ** -0.2)
            if h < 1e-14 * max(1.0, abs(t)):
                raise ConvergenceError(f"step size underflow near t={t}")
    return Trajectory(np.array(ts), np.array(ys), np.array(dys), steps, rejected, stopped)


def hermite(t0, t1, y0, y1, f0, f1, t):
    """Cubic Hermite interpolant on [t0, t1] from values and derivatives."""
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def hermite_derivative(t0, t1, y0, y1, f0, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    d00 = 6 * s * s - 6 * s
    d10 = 3 * s * s - 4 * s + 1
    d01 = -d00
    d11 = 3 * s * s - 2 * s
    return (d00 * y0 + d01 * y1) / h + d10 * f0 + d11 * f1
