"""Density ratios theta(c, r) = Vol(Sigma ∩ B(c, r)) / (omega_{n+1} r^{n+1}) of invariant hypersurfaces."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq
from scipy.special import betainc

from ..cone import ConeParams, ball_volume, sphere_volume
from ..errors import ConvergenceError, ValidationError
from ..flow import OrbitControls, ProfileCurve, _deviation_rhs
from ..rk import dopri5, hermite

HALF_PI = 0.5 * math.pi


@dataclass
class DensityProfile:
    radii: np.ndarray
    theta: np.ndarray
    center: str = "origin"
    cap_remainder: float = 0.0
    volumes: np.ndarray = field(default=None, repr=False)

    @property
    def limit_estimate(self) -> float:
        return float(self.theta[-1])

    def max_decrease(self) -> float:
        """Largest drop between consecutive radii (0 for a nondecreasing profile)."""
        if self.theta.size < 2:
            return 0.0
        return float(max(0.0, -np.min(np.diff(self.theta))))

    def is_monotone(self, tol: float = 1e-8) -> bool:
        return self.max_decrease() <= tol


def _normalizer(params: ConeParams) -> float:
    """Vol(S^p) Vol(S^{n-p}) / omega_{n+1}, with omega_{n+1} the volume of the unit (n+1)-ball."""
    return sphere_volume(params.p) * sphere_volume(params.q) / ball_volume(params.n + 1)


def _check_radii(radii) -> np.ndarray:
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0 or np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ValidationError("radii must be a nonempty increasing list of positive numbers")
    return radii


def _hermite_root(curve: ProfileCurve, y, dy, i: int, level: float) -> float:
    s0, s1 = curve.s[i], curve.s[i + 1]
    fn = lambda s: hermite(s0, s1, y[i], y[i + 1], dy[i], dy[i + 1], s) - level
    return brentq(fn, s0, s1, xtol=1e-15 * max(1.0, abs(s1)), rtol=1e-15)


def _volume_at(curve: ProfileCurve, i: int, s: float, rho: float) -> float:
    """Running volume at s inside sample interval i, where the curve has log-radius rho.

    The volume grows like e^{(n+1) rho}; the smooth factor K = volume e^{-(n+1) rho}
    is what gets interpolated.
    """
    m = curve.params.n + 1
    sl = slice(i, i + 2)
    w = np.exp(-m * curve.rho[sl])
    K = curve.volume[sl] * w
    dK = curve.dvolume[sl] * w - m * curve.drho[sl] * K
    k = hermite(curve.s[i], curve.s[i + 1], K[0], K[1], dK[0], dK[1], s)
    return float(k * math.exp(m * rho))


def _origin_volume(curve: ProfileCurve, log_r: float) -> float:
    """Integral of a^p b^q |(a', b')| ds over the part of the curve inside the ball, cap included."""
    rho = curve.rho
    inside = rho <= log_r
    total = 0.0
    enter = 0.0 if inside[0] else None
    for i in np.nonzero(inside[:-1] != inside[1:])[0]:
        s = _hermite_root(curve, rho, curve.drho, i, log_r)
        vol = _volume_at(curve, i, s, log_r)
        if inside[i]:
            total += vol - enter
            enter = None
        else:
            enter = vol
    if enter is not None:
        total += curve.volume[-1] - enter
    return total



def _cap_volume_about(curve: ProfileCurve, r: float) -> float:
    """Volume integral for the ball of radius r about the cap point of a Sigma_{n,p,+/-} curve.

    Points of the orbit over (a, b) lie in the ball for the fraction of the
    sphere factor through the cap where x_1 >= c. The curve is interpolated in
    rho and log(e), e the angle to the saddle, which are smooth and nearly linear
    near the cap.
    """
    params = curve.params
    p, q = params.p, params.q
    th0 = params.theta0
    if curve.sign == "+":
        eps, deps, m_near, m_far = HALF_PI - th0 - curve.du, -curve.ddu, p, q
    elif curve.sign == "-":
        eps, deps, m_near, m_far = th0 + curve.du, curve.ddu, q, p
    else:
        raise ValidationError("cap-centred density needs a curve generated from a saddle (sign '+' or '-')")
    rho0 = float(curve.rho[0])
    c0 = math.exp(rho0)
    spl_log = CubicHermiteSpline(curve.s, np.log(eps), deps / eps)
    spl_rho = CubicHermiteSpline(curve.s, curve.rho, curve.drho)

    def geometry(s):
        e = np.exp(spl_log(s))
        rho = spl_rho(s)
        scale = np.exp(rho)
        near = scale * np.sin(e)
        far = scale * np.cos(e)
        gap = c0 * (np.expm1(rho - rho0) * np.cos(e) - 2 * np.sin(0.5 * e) ** 2)
        return near, far, gap, scale * np.abs(np.sin(2 * e))

    near, far, gap, _ = geometry(curve.s)
    dist2 = near * near + gap * gap
    outside = np.nonzero(dist2 > r * r)[0]
    if outside.size == 0:
        raise ValidationError(f"radius {r} exceeds the coverage of the curve")
    i = outside[0] - 1
    if i < 0:
        raise ValidationError(f"radius {r} is below the seeding offset scale")

    def excess(s):
        nr, _f, gp, _ = geometry(s)
        return nr * nr + gp * gp - r * r

    exit_s = brentq(excess, curve.s[i], curve.s[i + 1], xtol=1e-14)
    knots = [exit_s]
    # orbit spheres wholly inside the ball: farthest point (far + c0 away from the axis) within r
    whole = near * near + (far + c0) ** 2 <= r * r
    for j in np.nonzero(whole[:-1] != whole[1:])[0]:
        if curve.s[j + 1] <= exit_s:
            knots.append(brentq(lambda s: (lambda g: g[0] ** 2 + (g[1] + c0) ** 2 - r * r)(geometry(s)),
                                curve.s[j], curve.s[j + 1], xtol=1e-14))
    knots = sorted(knots)

    def fraction(nr, fr, gp):
        one_minus_c = (r * r - nr * nr - gp * gp) / (2 * fr * c0)
        if one_minus_c <= 0:
            return 0.0
        if one_minus_c >= 2:
            return 1.0
        half = 0.5 * betainc(m_far / 2, 0.5, one_minus_c * (2 - one_minus_c))
        return half if one_minus_c <= 1 else 1 - half

    def integrand(s):
        nr, fr, gp, speed = geometry(s)
        return float(nr**m_near * fr**m_far * speed * fraction(nr, fr, gp))

    total = 0.0
    lo = curve.s[0]
    with warnings.catch_warnings():
        # quad flags roundoff once it reaches the interpolation noise floor
        warnings.simplefilter("ignore", IntegrationWarning)
        for hi in knots:
            val, _err = quad(integrand, lo, hi, limit=400, epsabs=0.0, epsrel=1e-12)
            total += val
            lo = hi
    # the seed disc sits at the cap point; only part of its far sphere is in the ball
    return total + curve.cap_volume * fraction(0.0, c0, 0.0)


def density_profile(curve: ProfileCurve, radii, center: str = "origin") -> DensityProfile:
    """theta(c, r) at the given radii, with c the origin or the cap point of the surface.

    The origin-centred ratio converges to the density at infinity; the
    cap-centred ratio tends to 1 as r -> 0 since the cap point is a smooth
    point of the surface.
    """
    radii = _check_radii(radii)
    params = curve.params
    norm = _normalizer(params)
    vols = np.empty_like(radii)
    if center == "origin":
        if math.log(radii[-1]) > curve.rho.max():
            raise ValidationError(f"radius {radii[-1]:.6g} exceeds the coverage of the curve (e^{curve.rho.max():.3g})")
        for j, r in enumerate(radii):
            vols[j] = _origin_volume(curve, math.log(r))
    elif center == "cap":
        for j, r in enumerate(radii):
            vols[j] = _cap_volume_about(curve, r)
    else:
        raise ValidationError(f"center must be 'origin' or 'cap', got {center!r}")
    theta = norm * vols / radii ** (params.n + 1)
    return DensityProfile(radii, theta, center, curve.cap_volume, vols)


def _cone_scale(controls: OrbitControls):
    rtol, atol = controls.rtol, controls.atol

    def scale(ya, yb):
        sc = atol + rtol * np.maximum(np.abs(ya), np.abs(yb))
        sc[3] = rtol * max(abs(ya[3]), abs(yb[3]))
        return sc

    return scale


def cone_curve(params: ConeParams, rho_start: float = -10.0, rho_end: float = 10.0,
               controls: OrbitControls | None = None) -> ProfileCurve:
    """Profile curve of the cone itself, integrated through the same flow at the focus.

    The piece inside radius e^{rho_start} is added analytically.
    """
    controls = controls or OrbitControls()
    if rho_end <= rho_start:
        raise ValidationError("rho_end must exceed rho_start")
    n, p, q = params.n, params.p, params.q
    cap = params.cos0**p * params.sin0**q * math.exp((n + 1) * rho_start) / (n + 1)
    traj = dopri5(
        _deviation_rhs(params),
        0.0,
        np.array([rho_start, 0.0, 0.0, cap]),
        controls.s_max,
        rtol=controls.rtol,
        atol=controls.atol,
        scale=_cone_scale(controls),
        max_step=controls.max_step,
        max_steps=controls.max_steps,
        stop=lambda _s, y: y[0] >= rho_end,
    )
    if not traj.stopped:
        raise ConvergenceError("cone integration did not reach rho_end")
    Y, dY = traj.y, traj.dy
    return ProfileCurve(params, traj.t, Y[:, 0], Y[:, 1], Y[:, 2], Y[:, 3],
                        dY[:, 0], dY[:, 1], dY[:, 2], dY[:, 3], cap_volume=cap)
