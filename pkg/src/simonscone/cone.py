"""The Simons cone C_{n,p} over sqrt(p/n) S^p x sqrt((n-p)/n) S^{n-p}.

The cone lives in R^{n+2} = R^{p+1} x R^{n-p+1}. Points are written with a
log-radius ``t`` and unit vectors ``x`` in R^{p+1}, ``y`` in R^{n-p+1}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ValidationError

_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class ConeParams:
    """Dimension pair (n, p); the hypersurface has dimension n+1."""

    n: int
    p: int

    def __post_init__(self):
        if int(self.n) != self.n or int(self.p) != self.p:
            raise ValidationError(f"n and p must be integers, got n={self.n}, p={self.p}")
        if self.n < 2:
            raise ValidationError(f"n must satisfy n >= 2, got n={self.n}")
        if not 1 <= self.p <= self.n - 1:
            raise ValidationError(f"p must satisfy 1 <= p <= n-1, got n={self.n}, p={self.p}")

    @property
    def q(self) -> int:
        """Dimension n - p of the second sphere factor."""
        return self.n - self.p

    @cached_property
    def cos0(self) -> float:
        return math.sqrt(self.p / self.n)

    @cached_property
    def sin0(self) -> float:
        return math.sqrt(self.q / self.n)

    @cached_property
    def theta0(self) -> float:
        """Angle of the cone in the (a, b) quarter plane: cos(theta0) = sqrt(p/n)."""
        return math.atan2(self.sin0, self.cos0)

    @cached_property
    def sin2(self) -> float:
        """sin(2 theta0) = 2 sqrt(p (n-p)) / n."""
        return 2.0 * math.sqrt(self.p * self.q) / self.n

    def swapped(self) -> "ConeParams":
        """The cone with the two sphere factors exchanged, C_{n,n-p}."""
        return ConeParams(self.n, self.q)


@dataclass(frozen=True)
class ConePoint:
    t: float
    x: np.ndarray
    y: np.ndarray
    position: np.ndarray
    normal: np.ndarray


def sphere_volume(m: int) -> float:
    """Volume of the unit round sphere S^m."""
    if m < 0:
        raise ValidationError(f"sphere dimension must be >= 0, got {m}")
    return 2.0 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


def ball_volume(m: int) -> float:
    """Volume of the unit ball in R^m."""
    return sphere_volume(m - 1) / m


def _unit(v, name):
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
        raise ValidationError(f"{name} must be a unit vector (|{name}| = {np.linalg.norm(v)!r})")
    return v


def cone_point(params: ConeParams, t: float, x, y) -> ConePoint:
    """Position X(t, x, y) and unit normal N(x, y) on C_{n,p}."""
    x = _unit(x, "x")
    y = _unit(y, "y")
    if x.shape != (params.p + 1,) or y.shape != (params.q + 1,):
        raise ValidationError(
            f"x must lie in R^{params.p + 1} and y in R^{params.q + 1}, "
            f"got shapes {x.shape} and {y.shape}"
        )
    c, s = params.cos0, params.sin0
    position = math.exp(t) * np.concatenate([c * x, s * y])
    normal = np.concatenate([s * x, -c * y])
    return ConePoint(t=t, x=x, y=y, position=position, normal=normal)


def shape_operator_eigenvalues(params: ConeParams, t: float) -> list[tuple[float, int]]:
    """Principal curvatures of the cone at log-radius t, as (value, multiplicity).

    Order: radial direction, S^p directions, S^{n-p} directions.
    """
    scale = math.exp(-t)
    return [
        (0.0, 1),
        (scale * math.sqrt(params.q / params.p), params.p),
        (-scale * math.sqrt(params.p / params.q), params.q),
    ]


def mean_curvature(params: ConeParams, t: float) -> float:
    return sum(k * m for k, m in shape_operator_eigenvalues(params, t))


def link_volume(params: ConeParams) -> float:
    """Volume of the link S_{n,p} inside S^{n+1}."""
    n, p, q = params.n, params.p, params.q
    return (p / n) ** (p / 2) * (q / n) ** (q / 2) * sphere_volume(p) * sphere_volume(q)


def cone_density(params: ConeParams) -> float:
    """Density ratio of C_{n,p}: link volume over Vol(S^n), the same at every scale.

    Follows from Vol(C ∩ B(0, r)) = r^{n+1} |S_{n,p}| / (n+1) and
    omega_{n+1} = Vol(S^n) / (n+1).
    """
    return link_volume(params) / sphere_volume(params.n)
