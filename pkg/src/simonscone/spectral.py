"""Indicial roots of the Jacobi operator of C_{n,p} and mode projections.

Separated solutions e^{lambda t} Phi(x) Psi(y) of

    L u = u_tt + (n/p) Lap_1 u + (n/(n-p)) Lap_2 u + (n+1) u_t + 2n u

with Lap_1 Phi = -k(k+p-1) Phi and Lap_2 Psi = -l(l+n-p-1) Psi exist exactly
when lambda solves lambda^2 + (n+1) lambda + c_{k,l} = 0.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cone import ConeParams
from .errors import ValidationError

REAL_DISTINCT = "real-distinct"
COMPLEX_CONJUGATE = "complex-conjugate"
REAL_DOUBLE = "real-double"

_COLLISION_TOL = 1e-9


class ModeIndex(NamedTuple):
    k: int
    l: int


@dataclass(frozen=True)
class IndicialRoots:
    mode: ModeIndex
    plus: complex
    minus: complex
    kind: str

    @property
    def oscillatory(self) -> bool:
        return self.kind == COMPLEX_CONJUGATE

    @property
    def dominant_rate(self) -> float:
        """Real part of the slower-decaying (larger) root."""
        return self.plus.real

    @property
    def frequency(self) -> float:
        return abs(self.plus.imag)


def _check_mode(mode) -> ModeIndex:
    k, l = mode
    if int(k) != k or int(l) != l or k < 0 or l < 0:
        raise ValidationError(f"mode indices must be nonnegative integers, got {mode!r}")
    return ModeIndex(int(k), int(l))


def indicial_constant(params: ConeParams, mode) -> float:
    """Zeroth-order coefficient 2n - (n/p) k(k+p-1) - (n/(n-p)) l(l+n-p-1)."""
    k, l = _check_mode(mode)
    n, p, q = params.n, params.p, params.q
    return 2 * n - n * k * (k + p - 1) / p - n * l * (l + q - 1) / q


def indicial_roots(params: ConeParams, mode) -> IndicialRoots:
    mode = _check_mode(mode)
    b = params.n + 1.0
    c = indicial_constant(params, mode)
    disc = b * b - 4.0 * c
    if disc > 0:
        r = math.sqrt(disc)
        # product form for the small root avoids cancellation
        big = -(b + r) / 2.0
        small = c / big + 0.0 if big != 0 else 0.0  # + 0.0 drops a negative zero
        return IndicialRoots(mode, complex(small), complex(big), REAL_DISTINCT)
    if disc < 0:
        im = math.sqrt(-disc) / 2.0
        return IndicialRoots(mode, complex(-b / 2, im), complex(-b / 2, -im), COMPLEX_CONJUGATE)
    return IndicialRoots(mode, complex(-b / 2), complex(-b / 2), REAL_DOUBLE)


def kernel_band(params: ConeParams, band: tuple[float, float]) -> list[tuple[ModeIndex, complex]]:
    """All (mode, root) pairs whose real part lies in the half-open band (lo, hi].

    ``band`` is given as ``(lo, hi)`` with ``lo < hi < 0``. The scan over k + l
    stops once every root of the current shell has lambda_- below ``lo`` and
    lambda_+ >= 0; the constant term only decreases as k or l grows, so no
    later shell can contribute.
    """
    lo, hi = map(float, band)
    if not lo < hi < 0:
        raise ValidationError(f"band must satisfy lo < hi < 0, got ({lo}, {hi}]")
    found = []
    shell = 0
    while True:
        shell_done = True
        for k in range(shell + 1):
            mode = ModeIndex(k, shell - k)
            roots = indicial_roots(params, mode)
            for root in (roots.plus, roots.minus):
                re = root.real
                if min(abs(re - lo), abs(re - hi)) < _COLLISION_TOL:
                    raise ValidationError(
                        f"band endpoint collides with root {root} of mode {tuple(mode)}"
                    )
                if lo < re <= hi:
                    found.append((mode, root))
            if not (roots.minus.real < lo and roots.plus.real >= 0):
                shell_done = False
        if shell >= 2 and shell_done:
            return found
        shell += 1


def sphere_eigen_multiplicity(m: int, k: int) -> int:
    """Dimension of the degree-k spherical harmonics on S^m."""
    if m < 1 or k < 0:
        raise ValidationError(f"need m >= 1 and k >= 0, got m={m}, k={k}")
    lower = math.comb(m + k - 2, k - 2) if k >= 2 else 0
    return math.comb(m + k, k) - lower


# --- projections on the n = 2 torus ------------------------------------------


@dataclass(frozen=True)
class ModeProjection:
    """Coefficients of a torus graph against unit-L^2 circle harmonics.

    ``coefficients[i, a, b]`` pairs the a-th basis function of the first circle
    with the b-th of the second at ``t[i]``. For a nonzero index the two basis
    functions are cos(k.)/sqrt(pi) and sin(k.)/sqrt(pi); for index 0 the only
    one is 1/sqrt(2 pi). ``labels`` names the rows and columns.
    """

    mode: ModeIndex
    t: np.ndarray
    coefficients: np.ndarray
    labels: tuple[tuple[str, ...], tuple[str, ...]]

    def energy(self) -> np.ndarray:
        """Basis-independent per-mode energy: sum of squared coefficients per t."""
        return np.sum(self.coefficients**2, axis=(1, 2))


def circle_basis(k: int, angles: np.ndarray) -> tuple[np.ndarray, tuple[str, ...]]:
    if k == 0:
        return np.full((1, angles.size), 1.0 / math.sqrt(2 * math.pi)), ("const",)
    s = 1.0 / math.sqrt(math.pi)
    return np.stack([s * np.cos(k * angles), s * np.sin(k * angles)]), (f"cos{k}", f"sin{k}")


def torus_mode_project(graph, mode) -> ModeProjection:
    """Project a TorusGraph onto the (k, l) circle-harmonic products, slice by slice.

    Uses the periodic trapezoid rule, which is exact for band-limited grid data.
    """
    mode = _check_mode(mode)
    values = np.asarray(graph.values, dtype=float)
    _, n1, n2 = values.shape
    need = 4 * (mode.k + mode.l + 1)
    if min(n1, n2) < need:
        raise ValidationError(
            f"grid {n1}x{n2} too coarse for mode {tuple(mode)}: need >= {need} points per circle"
        )
    th = 2 * math.pi * np.arange(n1) / n1
    ph = 2 * math.pi * np.arange(n2) / n2
    b1, lab1 = circle_basis(mode.k, th)
    b2, lab2 = circle_basis(mode.l, ph)
    w = (2 * math.pi / n1) * (2 * math.pi / n2)
    coeffs = w * np.einsum("tij,ai,bj->tab", values, b1, b2)
    return ModeProjection(mode, np.asarray(graph.t, dtype=float), coeffs, (lab1, lab2))
