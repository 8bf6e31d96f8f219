"""Splitting solutions of g'' - (lam + mu) g' + lam mu g = f.

Any solution on [0, inf) can be written g = a e^{lam t} + b e^{mu t} + v with v
controlled by the weighted norm ||f||_delta = sup e^{delta t} |f(t)|. The
convolution defining v is anchored at 0 for a root with delta + Re < 0 and at
+inf for a root with delta + Re > 0; in the second case the constant part of the
integral moves into the coefficient of that root.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import solve_ivp

from .errors import ValidationError

_RESONANCE_TOL = 1e-9
_GL_ORDER = 8


@dataclass
class OdeProblem:
    lam: complex
    mu: complex
    f: Callable[[np.ndarray], np.ndarray]
    g0: complex
    g0p: complex
    delta: float

    def __post_init__(self):
        self.lam = complex(self.lam)
        self.mu = complex(self.mu)
        if abs(self.lam - self.mu) < _RESONANCE_TOL:
            raise ValidationError(f"near-resonant roots: |lam - mu| = {abs(self.lam - self.mu):.3g}")
        for root in (self.lam, self.mu):
            if abs(self.delta + root.real) < _RESONANCE_TOL:
                raise ValidationError(
                    f"weight delta={self.delta} collides with -Re({root}) "
                    f"(|delta + Re| = {abs(self.delta + root.real):.3g})"
                )


@dataclass
class BoundsReport:
    f_norm: float
    coeff_max: float
    coeff_rhs_init: float
    coeff_rhs_forcing: float
    c_used: float
    c_observed: float
    coeff_holds: bool
    v_norm: float
    v_rhs: float
    v_holds: bool
    tail_bounds: dict[str, float] = field(default_factory=dict)
    tail_rate: complex = 0j


@dataclass
class OdeDecomposition:
    a: complex
    b: complex
    t: np.ndarray
    v: np.ndarray
    lam: complex
    mu: complex
    bounds: BoundsReport

    def reconstruct(self) -> np.ndarray:
        return self.a * np.exp(self.lam * self.t) + self.b * np.exp(self.mu * self.t) + self.v


def _panel_rule(t: np.ndarray):
    x, w = leggauss(_GL_ORDER)
    left, h = t[:-1], np.diff(t)
    nodes = left[:, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)
    weights = 0.5 * h[:, None] * w[None, :]
    return nodes, weights


def _tail_rate(f, horizon, h, delta):
    """Decay rate of the exponential through the last two samples, floored at delta."""
    ends = np.asarray(f(np.array([horizon - h, horizon])), dtype=complex)
    if ends[0] == 0 or ends[1] == 0:
        return complex(delta)
    kappa = -np.log(ends[1] / ends[0]) / h
    if not np.isfinite(kappa) or kappa.real < delta:
        return complex(delta)
    return complex(kappa)


def weighted_norm(t: np.ndarray, values: np.ndarray, delta: float) -> float:
    return float(np.max(np.exp(delta * t) * np.abs(values)))


def _forward_convolution(lam, t, nodes, weights, fn):
    """V(t_k) = int_0^{t_k} f(u) e^{lam (t_k - u)} du, by forward recursion."""
    right = t[1:, None]
    panels = np.sum(weights * fn * np.exp(lam * (right - nodes)), axis=1)
    out = np.zeros(t.size, dtype=complex)
    decay = np.exp(lam * np.diff(t))
    for k in range(t.size - 1):
        out[k + 1] = decay[k] * out[k] + panels[k]
    return out


def _backward_convolution(lam, t, nodes, weights, fn, tail):
    """W(t_k) = int_{t_k}^inf f(u) e^{lam (t_k - u)} du, by backward recursion."""
    left = t[:-1, None]
    panels = np.sum(weights * fn * np.exp(lam * (left - nodes)), axis=1)
    out = np.zeros(t.size, dtype=complex)
    out[-1] = tail
    carry = np.exp(-lam * np.diff(t))
    for k in range(t.size - 2, -1, -1):
        out[k] = panels[k] + carry[k] * out[k + 1]
    return out


def decompose(problem: OdeProblem, horizon: float, panels: int = 400, c: float = 10.0) -> OdeDecomposition:
    """Split the solution with data (g(0), g'(0)) into exponential modes plus v on [0, horizon].

    Beyond ``horizon`` the forcing is continued by the exponential through its
    last two grid samples, f(T) e^{-kappa (u - T)} with Re kappa >= delta (kappa
    falls back to delta otherwise). The worst-case error of any continuation
    obeying the delta envelope is recorded in ``bounds.tail_bounds``.
    """
    if horizon <= 0 or panels < 1:
        raise ValidationError("horizon must be positive and panels >= 1")
    lam, mu, delta = problem.lam, problem.mu, problem.delta
    t = np.linspace(0.0, horizon, panels + 1)
    nodes, weights = _panel_rule(t)
    fn = np.asarray(problem.f(nodes), dtype=complex)
    f_end = complex(np.asarray(problem.f(np.array([horizon])))[0])
    f_grid = np.asarray(problem.f(t), dtype=complex)
    kappa = _tail_rate(problem.f, horizon, t[1] - t[0], delta)
    f_norm = max(weighted_norm(t, f_grid, delta), weighted_norm(nodes.ravel(), fn.ravel(), delta))

    det = mu - lam
    a = (mu * problem.g0 - problem.g0p) / det
    b = (-lam * problem.g0 + problem.g0p) / det
    v = np.zeros(t.size, dtype=complex)
    tail_bounds = {}
    for root, sign, name in ((lam, 1.0, "lam"), (mu, -1.0, "mu")):
        gap = delta + root.real
        if gap < 0:
            part = _forward_convolution(root, t, nodes, weights, fn)
        else:
            tail = f_end / (kappa + root)
            w_inf = _backward_convolution(root, t, nodes, weights, fn, tail)
            # int_0^t = A - int_t^inf, and A e^{root t} joins the homogeneous part
            anchor = w_inf[0]
            if name == "lam":
                a += sign * anchor / (lam - mu)
            else:
                b += sign * anchor / (lam - mu)
            part = -w_inf
            tail_bounds[name] = math.exp(-gap * horizon) * f_norm / gap
        v += sign * part / (lam - mu)

    # the two estimates of the splitting lemma
    g_scale = abs(problem.g0) + abs(problem.g0p)
    init_factor = math.sqrt(2 + abs(lam) ** 2 + abs(mu) ** 2) / abs(lam - mu)
    inv_gaps = [0.0] + [1.0 / (delta + r.real) for r in (lam, mu)]
    forcing = 2.0 * max(inv_gaps) / abs(lam - mu) * f_norm
    coeff_max = max(abs(a), abs(b))
    denom = init_factor * g_scale
    if denom > 0:
        c_obs = max(0.0, coeff_max - forcing) / denom
    else:
        c_obs = 0.0 if coeff_max <= forcing else math.inf
    v_rhs = (1 / abs(delta + lam.real) + 1 / abs(delta + mu.real)) / abs(lam - mu) * f_norm
    v_norm = weighted_norm(t, v, delta)
    report = BoundsReport(
        f_norm=f_norm,
        coeff_max=coeff_max,
        coeff_rhs_init=c * denom,
        coeff_rhs_forcing=forcing,
        c_used=c,
        c_observed=c_obs,
        coeff_holds=coeff_max <= c * denom + forcing,
        v_norm=v_norm,
        v_rhs=v_rhs,
        v_holds=v_norm <= v_rhs * (1 + 1e-12),
        tail_bounds=tail_bounds,
        tail_rate=kappa,
    )
    return OdeDecomposition(a=a, b=b, t=t, v=v, lam=lam, mu=mu, bounds=report)


def direct_solution(problem: OdeProblem, t: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Independent reference: integrate the ODE directly as a first-order complex system."""
    s, prod = problem.lam + problem.mu, problem.lam * problem.mu
    f = problem.f
    buf = np.empty(1)

    def rhs(x, y):
        buf[0] = x
        return np.array([y[1], f(buf)[0] + s * y[1] - prod * y[0]])

    y0 = np.array([problem.g0, problem.g0p], dtype=complex)
    scale = max(abs(y0[0]), abs(y0[1]), 1e-300)
    sol = solve_ivp(rhs, (t[0], t[-1]), y0, method="DOP853", t_eval=t, rtol=rtol, atol=rtol * scale * 1e-2)
    if not sol.success:
        raise RuntimeError(sol.message)
    return sol.y[0]


# --- randomized suite --------------------------------------------------------


class ExpSum:
    """Forcing f(t) = sum_j c_j exp(-r_j t)."""

    def __init__(self, coeffs, rates):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.rates = np.asarray(rates, dtype=complex)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return np.sum(self.coeffs * np.exp(-np.multiply.outer(u, self.rates)), axis=-1)


def _exp_sum(coeffs, rates) -> ExpSum:
    return ExpSum(coeffs, rates)


def exact_solution(problem: OdeProblem, t: np.ndarray) -> np.ndarray:
    """Closed form by undetermined coefficients when f is an ExpSum (no resonance assumed).

    Each term c e^{-r t} has particular solution c e^{-r t} / ((r + lam)(r + mu));
    the homogeneous part A e^{lam t} + B e^{mu t} matches g(0), g'(0).
    """
    f = problem.f
    if not isinstance(f, ExpSum):
        raise ValidationError("exact_solution needs a forcing of type ExpSum")
    lam, mu = problem.lam, problem.mu
    amp = f.coeffs / ((f.rates + lam) * (f.rates + mu))
    t = np.asarray(t, dtype=float)
    part = np.sum(amp * np.exp(-np.multiply.outer(t, f.rates)), axis=-1)
    h0 = problem.g0 - np.sum(amp)
    h1 = problem.g0p + np.sum(amp * f.rates)
    A = (h1 - mu * h0) / (lam - mu)
    B = h0 - A
    return A * np.exp(lam * t) + B * np.exp(mu * t) + part


def random_problem(rng: np.random.Generator) -> OdeProblem:
    """Roots in the left half plane with |lam - mu| >= 0.2; forcing a sum of decaying exponentials."""
    while True:
        if rng.random() < 0.5:
            re = -rng.uniform(0.2, 3.0)
            im = rng.uniform(0.1, 2.0)
            lam, mu = complex(re, im), complex(re, -im)
        else:
            lam = complex(-rng.uniform(0.1, 3.0), rng.uniform(-1.0, 1.0) * (rng.random() < 0.3))
            mu = complex(-rng.uniform(0.1, 3.0), 0.0)
        if abs(lam - mu) < 0.2:
            continue
        m = int(rng.integers(1, 4))
        rates = rng.uniform(0.3, 4.0, size=m) + 1j * rng.uniform(-1.0, 1.0, size=m) * (rng.random() < 0.5)
        coeffs = rng.normal(size=m) + 1j * rng.normal(size=m) * (rng.random() < 0.5)
        delta = float(np.min(rates.real))
        if min(abs(delta + lam.real), abs(delta + mu.real)) < 0.05:
            continue
        g0 = complex(rng.normal(), rng.normal() * (rng.random() < 0.5))
        g0p = complex(rng.normal(), rng.normal() * (rng.random() < 0.5))
        return OdeProblem(lam=lam, mu=mu, f=_exp_sum(coeffs, rates), g0=g0, g0p=g0p, delta=delta)


@dataclass
class SuiteCase:
    index: int
    reconstruction_error: float
    c_observed: float
    coeff_holds: bool
    v_holds: bool


@dataclass
class SuiteResult:
    seed: int
    cases: list[SuiteCase]

    @property
    def max_reconstruction_error(self) -> float:
        return max(c.reconstruction_error for c in self.cases)

    @property
    def observed_c(self) -> float:
        return max(c.c_observed for c in self.cases)

    @property
    def all_v_hold(self) -> bool:
        return all(c.v_holds for c in self.cases)

    @property
    def all_coeff_hold(self) -> bool:
        return all(c.coeff_holds for c in self.cases)


def run_suite(seed: int = 0, count: int = 200, horizon: float = 10.0, panels: int = 400, c: float = 10.0) -> SuiteResult:
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(count):
        problem = random_problem(rng)
        dec = decompose(problem, horizon, panels=panels, c=c)
        ref = exact_solution(problem, dec.t)
        err = float(np.max(np.abs(dec.reconstruct() - ref)) / max(np.max(np.abs(ref)), 1e-300))
        cases.append(SuiteCase(i, err, dec.bounds.c_observed, dec.bounds.coeff_holds, dec.bounds.v_holds))
    return SuiteResult(seed, cases)
