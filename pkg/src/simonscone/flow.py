"""The planar flow whose orbits generate O(p+1) x O(n-p+1)-invariant minimal hypersurfaces.

A profile curve (a, b) with a = e^rho cos(theta), b = e^rho sin(theta) and
tangent direction (cos(phi), sin(phi)) gives the hypersurface
{(a x, b y) : x in S^p, y in S^{n-p}}. After removing the homothety and
reparametrizing, minimality becomes

    rho'   = sin(2 theta) cos(theta - phi)
    theta' = -sin(2 theta) sin(theta - phi)
    phi'   = (n - 2p) cos(theta - phi) + n cos(theta + phi)

and the last two equations define the vector field Y on the (theta, phi) plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cone import ConeParams
from .errors import ConvergenceError, ValidationError
from .numerics import hausdorff_distance, local_fit_derivatives
from .rk import dopri5, hermite

HALF_PI = 0.5 * math.pi
TWO_PI = 2 * math.pi
EPS = float(np.finfo(float).eps)

SADDLE = "saddle"
STABLE_NODE = "stable-node"
STABLE_FOCUS = "stable-focus"


@dataclass(frozen=True)
class PhasePoint:
    theta: float
    phi: float

    def canonical(self) -> "PhasePoint":
        """Representative in [0, pi/2] x (-pi/2, pi/2] under the symmetries of Y.

        Y(theta + pi, phi) = -Y, Y(theta, phi + pi) = -Y and Y(-theta, -phi) = Y;
        the representative is only meaningful up to time reversal.
        """
        th = math.remainder(self.theta, math.pi)
        ph = self.phi
        if th < 0:
            th, ph = -th, -ph
        if th > HALF_PI:
            th = math.pi - th
            ph = -ph
        ph = math.remainder(ph, math.pi)
        if ph <= -HALF_PI:
            ph += math.pi
        return PhasePoint(th, ph)


@dataclass(frozen=True)
class FlowState:
    rho: float
    point: PhasePoint


def vector_field(params: ConeParams, theta, phi):
    """Y(theta, phi); accepts scalars or arrays."""
    n, p = params.n, params.p
    y1 = -np.sin(2 * theta) * np.sin(theta - phi)
    y2 = (n - 2 * p) * np.cos(theta - phi) + n * np.cos(theta + phi)
    return y1, y2


def jacobian(params: ConeParams, theta: float, phi: float) -> np.ndarray:
    n, p = params.n, params.p
    d, s = theta - phi, theta + phi
    return np.array(
        [
            [-2 * math.cos(2 * theta) * math.sin(d) - math.sin(2 * theta) * math.cos(d),
             math.sin(2 * theta) * math.cos(d)],
            [-(n - 2 * p) * math.sin(d) - n * math.sin(s),
             (n - 2 * p) * math.sin(d) - n * math.sin(s)],
        ]
    )


def jacobian_fd(params: ConeParams, theta: float, phi: float, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of Y."""
    J = np.empty((2, 2))
    for j, (dt, dp) in enumerate(((h, 0.0), (0.0, h))):
        plus = vector_field(params, theta + dt, phi + dp)
        minus = vector_field(params, theta - dt, phi - dp)
        J[:, j] = (np.array(plus) - np.array(minus)) / (2 * h)
    return J


@dataclass
class SingularPointInfo:
    location: PhasePoint
    kind: str
    jacobian: np.ndarray
    jacobian_fd: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns; for saddles ordered (stable, unstable)
    residual: float
    field_norm: float

    @property
    def stable_direction(self) -> Optional[np.ndarray]:
        return self.eigenvectors[:, 0] if self.kind == SADDLE else None

    @property
    def unstable_direction(self) -> Optional[np.ndarray]:
        return self.eigenvectors[:, 1] if self.kind == SADDLE else None


def focus_is_complex(params: ConeParams) -> bool:
    """True when the linearization at (theta0, theta0) spirals: n^2 - 6n + 1 < 0."""
    n = params.n
    return n * n - 6 * n + 1 < 0


def _singular_info(params, theta, phi, kind):
    J = jacobian(params, theta, phi)
    vals, vecs = np.linalg.eig(J)
    if kind == SADDLE:
        order = np.argsort(vals.real)
        vals, vecs = vals[order].real, vecs[:, order].real
        vecs = vecs / np.linalg.norm(vecs, axis=0)
    residual = float(np.max(np.abs(J @ vecs - vecs * vals[None, :])))
    y1, y2 = vector_field(params, theta, phi)
    return SingularPointInfo(
        location=PhasePoint(theta, phi),
        kind=kind,
        jacobian=J,
        jacobian_fd=jacobian_fd(params, theta, phi),
        eigenvalues=vals,
        eigenvectors=vecs,
        residual=residual,
        field_norm=float(math.hypot(y1, y2)),
    )


def singular_points(params: ConeParams) -> list[SingularPointInfo]:
    """Zeros of Y in [0, pi/2] x (-pi/2, pi/2]: saddles (pi/2, 0), (0, pi/2) and (theta0, theta0)."""
    th0 = params.theta0
    focus_kind = STABLE_FOCUS if focus_is_complex(params) else STABLE_NODE
    return [
        _singular_info(params, HALF_PI, 0.0, SADDLE),
        _singular_info(params, 0.0, HALF_PI, SADDLE),
        _singular_info(params, th0, th0, focus_kind),
    ]


# --- invariant region --------------------------------------------------------


def invariant_region_tau(params: ConeParams, phi: float) -> float:
    """Side length tau(phi) of the square [phi, phi + tau]^2 that Y enters."""
    th0 = params.theta0
    if not -1e-15 <= phi <= th0 + 1e-15:
        raise ValidationError(f"phi must lie in [0, theta0] = [0, {th0}], got {phi}")
    if phi <= 0.0:
        return HALF_PI
    return math.atan((math.cos(2 * phi) - math.cos(2 * th0)) / math.sin(2 * phi))


@dataclass
class InvariantRegionReport:
    phi: float
    tau: float
    min_inward: float
    violations: list[tuple[float, float, float]]
    tangencies: list[tuple[float, float]]
    strip_min_y2: float
    strip_ok: bool
    tolerance: float

    @property
    def ok(self) -> bool:
        return not self.violations and self.strip_ok


def check_invariant_region(
    params: ConeParams,
    phi: float,
    boundary_samples: int = 400,
    strip_grid: int = 50,
    tolerance: float = 1e-10,
    tangency_tol: float = 1e-12,
) -> InvariantRegionReport:
    """Sample the boundary of [phi, phi+tau]^2 and the component of Y along the inward normal.

    Also samples Y_2 on the open strip (0 <= theta <= pi/2, -pi/2 < phi < 0).
    """
    th0 = params.theta0
    if not 0.0 <= phi < th0:
        raise ValidationError(f"phi must lie in [0, theta0), got {phi}")
    tau = invariant_region_tau(params, phi)
    lo, hi = phi, phi + tau
    per_side = max(boundary_samples // 4, 2)
    s = np.linspace(lo, hi, per_side)
    sides = [
        (np.full_like(s, lo), s, np.array([1.0, 0.0])),
        (np.full_like(s, hi), s, np.array([-1.0, 0.0])),
        (s, np.full_like(s, lo), np.array([0.0, 1.0])),
        (s, np.full_like(s, hi), np.array([0.0, -1.0])),
    ]
    violations, tangencies = [], []
    min_inward = math.inf
    for th, ph, inward in sides:
        y1, y2 = vector_field(params, th, ph)
        comp = inward[0] * y1 + inward[1] * y2
        min_inward = min(min_inward, float(np.min(comp)))
        for a, b, c in zip(th, ph, comp):
            if c < -tolerance:
                violations.append((float(a), float(b), float(c)))
            elif abs(c) <= tangency_tol:
                tangencies.append((float(a), float(b)))
    th = np.linspace(0.0, HALF_PI, strip_grid)
    ph = np.linspace(-HALF_PI, 0.0, strip_grid + 2)[1:-1]
    _, y2 = vector_field(params, th[:, None], ph[None, :])
    strip_min = float(np.min(y2))
    return InvariantRegionReport(phi, tau, min_inward, violations, tangencies, strip_min, strip_min > 0, tolerance)


# --- orbits ------------------------------------------------------------------


@dataclass
class OrbitControls:
    rtol: float = 1e-11
    atol: float = 1e-11
    offset: float = 1e-8
    terminal_tol: float = 1e-8
    rho_span: float = 15.0
    max_step: float = 0.05
    max_steps: int = 10**7
    domain_tol: float = 1e-9
    s_max: float = 1e4

    def __post_init__(self):
        for name in ("rtol", "atol"):
            val = getattr(self, name)
            if not 1e-13 <= val <= 1e-6:
                raise ValidationError(f"{name}={val} outside the supported range [1e-13, 1e-6]")
        if not 1e-10 <= self.offset <= 1e-6:
            raise ValidationError(f"offset={self.offset} outside [1e-10, 1e-6]")
        if self.rho_span <= 0 or self.terminal_tol <= 0 or self.max_step <= 0:
            raise ValidationError("rho_span, terminal_tol and max_step must be positive")


@dataclass
class ProfileCurve:
    """Samples of an orbit and the profile curve (a, b) it generates.

    Angles are also kept as deviations ``du = theta - theta0``,
    ``dv = phi - theta0``, which stay accurate as the orbit closes in on the
    focus. ``volume`` is the running integral of a^p b^{n-p} |(a', b')| ds,
    starting from ``cap_volume`` (the piece between the exact cap and the seed).
    """

    params: ConeParams
    s: np.ndarray
    rho: np.ndarray
    du: np.ndarray
    dv: np.ndarray
    volume: np.ndarray
    drho: np.ndarray
    ddu: np.ndarray
    ddv: np.ndarray
    dvolume: np.ndarray
    origin_saddle: Optional[tuple[float, float]] = None
    sign: Optional[str] = None
    cap_volume: float = 0.0
    offset: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def theta(self) -> np.ndarray:
        return self.params.theta0 + self.du

    @property
    def phi(self) -> np.ndarray:
        return self.params.theta0 + self.dv

    @property
    def a(self) -> np.ndarray:
        return np.exp(self.rho) * np.cos(self.theta)

    @property
    def b(self) -> np.ndarray:
        return np.exp(self.rho) * np.sin(self.theta)

    @property
    def speed(self) -> np.ndarray:
        """|(a', b')| with respect to s."""
        return np.exp(self.rho) * np.abs(np.sin(2 * self.theta))

    @property
    def da(self) -> np.ndarray:
        return self.speed * np.cos(self.phi)

    @property
    def db(self) -> np.ndarray:
        return self.speed * np.sin(self.phi)

    @property
    def terminal_distance(self) -> float:
        return float(math.hypot(self.du[-1], math.remainder(self.dv[-1], TWO_PI)))

    def __len__(self):
        return self.s.size

    def states(self) -> list[FlowState]:
        return [FlowState(r, PhasePoint(t, p)) for r, t, p in zip(self.rho, self.theta, self.phi)]

    def columns(self) -> dict[str, np.ndarray]:
        return {
            "s": self.s,
            "rho": self.rho,
            "theta": self.theta,
            "phi": self.phi,
            "a": self.a,
            "b": self.b,
            "da": self.da,
            "db": self.db,
        }


def _deviation_rhs(params: ConeParams):
    """Right-hand side in (rho, theta - theta0, phi - theta0, volume).

    Y_2 is rewritten so that it is computed to full relative precision near the
    focus: (n - 2p) + n cos(2 theta0) = 0, hence
    Y_2 = -2(n - 2p) sin^2((u - v)/2) - 2n sin(2 theta0 + (u + v)/2) sin((u + v)/2).
    """
    n, p, q = params.n, params.p, params.q
    th0 = params.theta0
    two_th0 = 2 * th0
    sin, cos, exp = math.sin, math.cos, math.exp

    def rhs(_s, y):
        # the field is 2 pi periodic in v; reducing keeps u - v small near theta0 + 2k pi
        rho, u, v = y[0], y[1], math.remainder(y[2], TWO_PI)
        s2 = sin(two_th0 + 2 * u)
        d = u - v
        half_sum = 0.5 * (u + v)
        sd = sin(0.5 * d)
        y1 = -s2 * sin(d)
        y2 = -2 * (n - 2 * p) * sd * sd - 2 * n * sin(two_th0 + half_sum) * sin(half_sum)
        th = th0 + u
        dvol = exp((n + 1) * rho) * cos(th) ** p * sin(th) ** q * abs(s2)
        return np.array([s2 * cos(d), y1, y2, dvol])

    return rhs


def _error_scale(controls: OrbitControls):
    rtol, atol = controls.rtol, controls.atol

    def scale(ya, yb):
        sc = atol + rtol * np.maximum(np.abs(ya), np.abs(yb))
        r = max(math.hypot(ya[1], math.remainder(ya[2], TWO_PI)), math.hypot(yb[1], math.remainder(yb[2], TWO_PI)))
        # angles: error relative to the distance from the focus once inside it
        sc[1] = sc[2] = rtol * r + atol * min(1.0, r)
        # rounding floor for orbits that settle at phi = theta0 + 2k pi; u inherits it through u - v
        floor = 4 * EPS * max(abs(ya[2]), abs(yb[2]))
        sc[1] += floor
        sc[2] += floor
        # the volume starts far below atol and grows exponentially; keep it relative
        sc[3] = rtol * max(abs(ya[3]), abs(yb[3])) + 1e-300
        return sc

    return scale


def integrate_orbit(
    params: ConeParams,
    start: FlowState,
    direction,
    offset: Optional[float] = None,
    controls: Optional[OrbitControls] = None,
    cap_volume: float = 0.0,
    domain: str = "canonical",
) -> ProfileCurve:
    """Follow the flow from ``start + offset * direction`` until it settles at (theta0, theta0).

    Stops once the angular distance to the focus is below
    ``controls.terminal_tol`` and rho has grown by ``controls.rho_span``.
    ``domain='canonical'`` requires the orbit to stay in
    [0, pi/2] x (-pi/2, pi/2); ``'strip'`` only constrains theta.
    """
    controls = controls or OrbitControls()
    offset = controls.offset if offset is None else offset
    if not 1e-10 <= offset <= 1e-6:
        raise ValidationError(f"offset={offset} outside [1e-10, 1e-6]")
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    th0 = params.theta0
    u0 = (start.point.theta - th0) + offset * d[0]
    v0 = (start.point.phi - th0) + offset * d[1]
    y0 = np.array([start.rho, u0, v0, cap_volume])
    rho_target = start.rho + controls.rho_span
    term2 = controls.terminal_tol**2
    tol = controls.domain_tol

    def stop(_s, y):
        v = math.remainder(y[2], TWO_PI)  # Y is 2 pi periodic in phi
        return y[0] >= rho_target and y[1] * y[1] + v * v < term2

    def check(s, y):
        th, ph = th0 + y[1], th0 + y[2]
        bad = th < -tol or th > HALF_PI + tol
        if domain == "canonical":
            bad = bad or ph <= -HALF_PI - tol or ph > HALF_PI + tol
        if bad:
            raise ConvergenceError(f"orbit left the admissible region at s={s}: theta={th}, phi={ph}")

    traj = dopri5(
        _deviation_rhs(params),
        0.0,
        y0,
        controls.s_max,
        rtol=controls.rtol,
        atol=controls.atol,
        scale=_error_scale(controls),
        max_step=controls.max_step,
        max_steps=controls.max_steps,
        stop=stop,
        check=check,
    )
    if not traj.stopped:
        raise ConvergenceError(
            f"orbit did not settle at the focus before s={controls.s_max} "
            f"(distance {math.hypot(traj.y[-1, 1], math.remainder(traj.y[-1, 2], TWO_PI)):.3g})"
        )
    Y, dY = traj.y, traj.dy
    return ProfileCurve(
        params=params,
        s=traj.t,
        rho=Y[:, 0],
        du=Y[:, 1],
        dv=Y[:, 2],
        volume=Y[:, 3],
        drho=dY[:, 0],
        ddu=dY[:, 1],
        ddv=dY[:, 2],
        dvolume=dY[:, 3],
        origin_saddle=(float(start.point.theta), float(start.point.phi)),
        cap_volume=cap_volume,
        offset=offset,
        extra={"steps": traj.steps, "rejected": traj.rejected},
    )


def seed_direction(params: ConeParams, sign: str) -> tuple[FlowState, np.ndarray]:
    """Saddle and unstable direction for Sigma_{n,p,sign}, oriented into the open quadrant."""
    n, p = params.n, params.p
    if sign == "+":
        w = np.array([p + 1.0, p - n])
        w = w if w[0] < 0 else -w
        return FlowState(0.0, PhasePoint(HALF_PI, 0.0)), w / np.linalg.norm(w)
    if sign == "-":
        w = np.array([n + 1.0 - p, -p])
        w = w if w[0] > 0 else -w
        return FlowState(0.0, PhasePoint(0.0, HALF_PI)), w / np.linalg.norm(w)
    raise ValidationError(f"sign must be '+' or '-', got {sign!r}")


def _cap_volume(params: ConeParams, sign: str, offset: float, direction) -> float:
    """Volume integral of the flat disc between the exact cap and the seeded point."""
    p, q = params.p, params.q
    if sign == "+":
        # a ~ offset |d_theta|, b ~ 1; the sheet leaves the axis a = 0 horizontally
        a0 = math.cos(HALF_PI + offset * direction[0])
        return a0 ** (p + 1) / (p + 1)
    b0 = math.sin(offset * direction[0])
    return b0 ** (q + 1) / (q + 1)


def generate_sigma(params: ConeParams, sign: str, controls: Optional[OrbitControls] = None) -> ProfileCurve:
    """Profile curve of Sigma_{n,p,sign}; '+' leaves the saddle (pi/2, 0), '-' the saddle (0, pi/2)."""
    controls = controls or OrbitControls()
    start, direction = seed_direction(params, sign)
    curve = integrate_orbit(
        params,
        start,
        direction,
        controls.offset,
        controls,
        cap_volume=_cap_volume(params, sign, controls.offset, direction),
    )
    curve.sign = sign
    return curve


def doubled_cone_orbit(params: ConeParams, which: str = "-", controls: Optional[OrbitControls] = None) -> ProfileCurve:
    """Orbit leaving the repelling point (theta0, theta0 -/+ pi); its surface is asymptotic to twice the cone."""
    controls = controls or OrbitControls()
    th0 = params.theta0
    shift = -math.pi if which == "-" else math.pi
    start = FlowState(0.0, PhasePoint(th0, th0 + shift))
    # leave along the diagonal direction, into theta < theta0 for which='-'
    direction = np.array([-1.0, 0.0]) if which == "-" else np.array([1.0, 0.0])
    return integrate_orbit(params, start, direction, controls.offset, controls, domain="strip")


# --- checks on sampled orbits -----------------------------------------------


def profile_residual(curve: ProfileCurve, window: int = 7, degree: int = 5) -> np.ndarray:
    """Scaled residual of a''b' - b''a' + (a'^2 + b'^2)((n-p) a'/b - p b'/a) at every sample.

    Second derivatives come from local polynomial fits of the sampled a', b';
    the residual is divided by (a'^2 + b'^2)^{3/2} max(1/a, 1/b).
    """
    n, p = curve.params.n, curve.params.p
    a, b, da, db = curve.a, curve.b, curve.da, curve.db
    dda, _ = local_fit_derivatives(curve.s, da, window, degree)
    ddb, _ = local_fit_derivatives(curve.s, db, window, degree)
    v2 = da * da + db * db
    res = dda * db - ddb * da + v2 * ((n - p) * da / b - p * db / a)
    return np.abs(res) / (v2**1.5 * np.maximum(1 / a, 1 / b))


def rho_slope(curve: ProfileCurve, efolds: float = 5.0) -> float:
    """Least-squares slope of rho(s) over the final ``efolds`` units of rho."""
    mask = curve.rho >= curve.rho[-1] - efolds
    return float(np.polyfit(curve.s[mask], curve.rho[mask], 1)[0])


def winding_angle(curve: ProfileCurve) -> float:
    """Total signed angle swept by (theta, phi) - (theta0, theta0)."""
    ang = np.unwrap(np.arctan2(curve.dv, curve.du))
    return float(ang[-1] - ang[0])


def reflect_orbit(curve: ProfileCurve) -> tuple[np.ndarray, np.ndarray]:
    """Image of (theta, phi, rho) under sigma(theta, phi) = (pi/2 - theta, pi/2 - phi), with tangents."""
    pts = np.column_stack([HALF_PI - curve.theta, HALF_PI - curve.phi, curve.rho])
    tan = np.column_stack([-curve.ddu, -curve.ddv, curve.drho])
    return pts, tan


def orbit_points(curve: ProfileCurve, with_rho: bool = False):
    if with_rho:
        return (np.column_stack([curve.theta, curve.phi, curve.rho]),
                np.column_stack([curve.ddu, curve.ddv, curve.drho]))
    return np.column_stack([curve.theta, curve.phi]), np.column_stack([curve.ddu, curve.ddv])


def orbit_hausdorff(curve_a: ProfileCurve, pts_a, tan_a, curve_b: ProfileCurve, with_rho: bool = False) -> float:
    pts_b, tan_b = orbit_points(curve_b, with_rho)
    return hausdorff_distance(curve_a.s, pts_a, tan_a, curve_b.s, pts_b, tan_b)


def normalize_at_crossing(curve: ProfileCurve) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Shift s and rho so both vanish where theta first reaches the midpoint between saddle and focus."""
    th0 = curve.params.theta0
    th_saddle = curve.origin_saddle[0]
    level = 0.5 * (th_saddle + th0) - th0  # in deviation units
    g = curve.du - level
    idx = np.nonzero(np.sign(g[:-1]) != np.sign(g[1:]))[0]
    if idx.size == 0:
        raise ConvergenceError("orbit never crosses the normalization level")
    i = idx[0]
    lo, hi = curve.s[i], curve.s[i + 1]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        val = hermite(curve.s[i], curve.s[i + 1], curve.du[i], curve.du[i + 1], curve.ddu[i], curve.ddu[i + 1], mid) - level
        if np.sign(val) == np.sign(g[i]):
            lo = mid
        else:
            hi = mid
    s_star = 0.5 * (lo + hi)
    rho_star = hermite(curve.s[i], curve.s[i + 1], curve.rho[i], curve.rho[i + 1], curve.drho[i], curve.drho[i + 1], s_star)
    return curve.s - s_star, curve.rho - rho_star, curve.du, curve.dv
