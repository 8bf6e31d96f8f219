"""Command-line front end: ``simonscone <subcommand> [options]``.

Exit status: 0 success, 1 invalid input or failed verification, 2 numerical
non-convergence, 64 unknown or malformed flags.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .asymptotics import (
    density_profile,
    fit_decay,
    flux,
    profile_to_graph,
    residual_invariant,
    torus_from_radial,
)
from .cone import ConeParams, cone_density
from .errors import ConvergenceError, ValidationError
from .flow import (
    OrbitControls,
    doubled_cone_orbit,
    generate_sigma,
    profile_residual,
    rho_slope,
    singular_points,
    vector_field,
)
from .odelemma import run_suite
from .spectral import indicial_roots

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONVERGENCE = 2
EXIT_USAGE = 64

OUT_ENV = "SIMONSCONE_OUT"
DEFAULT_OUT = "simonscone_out"
# decay fits need a long tail: about 10 sign changes for n = 2
DECAY_RHO_SPAN = 30.0

HALF_PI = 0.5 * math.pi


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def fmt(x) -> str:
    return "%.17g" % x


def write_csv(path: Path, header: list[str], rows, comments: tuple[str, ...] = ()) -> None:
    """Write rows with floats at 17 significant digits; '#' comment lines go first."""
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    path.write_text(buf.getvalue())


@dataclass
class RunConfig:
    n: int = 2
    p: int = 1
    sign: str = "+"
    controls: OrbitControls = field(default_factory=OrbitControls)
    out: Path = Path(DEFAULT_OUT)
    options: dict = field(default_factory=dict)

    @property
    def params(self) -> ConeParams:
        return ConeParams(self.n, self.p)

    def tag(self, with_sign: bool = True) -> str:
        base = f"n{self.n}_p{self.p}"
        return f"{base}_{'plus' if self.sign == '+' else 'minus'}" if with_sign else base

    def output_dir(self) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        return self.out


# --- argument handling ------------------------------------------------------

_CONTROL_FLAGS = {
    "rtol": float,
    "atol": float,
    "offset": float,
    "rho_span": float,
    "terminal_tol": float,
    "max_step": float,
    "max_steps": int,
}


def _common(sub: argparse.ArgumentParser, sign: bool = True) -> None:
    sub.add_argument("--config", help="JSON file with option values; flags override it")
    sub.add_argument("--n", type=int, help="cone dimension n (>= 2)")
    sub.add_argument("--p", type=int, help="first sphere dimension, 1 <= p <= n-1")
    if sign:
        sub.add_argument("--sign", choices=["+", "-"], help="which surface, Sigma_{n,p,+} or Sigma_{n,p,-}")
    for name, typ in _CONTROL_FLAGS.items():
        sub.add_argument("--" + name.replace("_", "-"), dest=name, type=typ)
    sub.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="simonscone", description="Invariant minimal hypersurfaces asymptotic to Simons cones.")
    subs = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    s = subs.add_parser("roots", help="indicial roots lambda_{k,l,+/-}")
    _common(s, sign=False)
    s.add_argument("--max-mode", type=int, help="list all modes with k + l <= max-mode")

    s = subs.add_parser("portrait", help="phase portrait of the vector field Y (SVG + CSV)")
    _common(s, sign=False)
    s.add_argument("--grid", type=int, help="arrows per side of the sampling grid")
    s.add_argument("--doubled", action="store_true", default=None, help="also draw the two doubled-cone orbits")

    s = subs.add_parser("profile", help="profile curve of Sigma_{n,p,sign} as CSV")
    _common(s)

    s = subs.add_parser("verify", help="residual, decay, density and flux checks")
    _common(s)

    s = subs.add_parser("mesh", help="surface point cloud (CSV) and, for n = 2, an OBJ mesh")
    _common(s)
    s.add_argument("--profile-samples", type=int, help="number of profile points used")
    s.add_argument("--sphere-samples", type=int, help="points per sphere factor")

    s = subs.add_parser("density", help="density ratio theta(c, r) at a list of radii")
    _common(s)
    s.add_argument("--radii", type=float, nargs="+", help="explicit radii (increasing)")
    s.add_argument("--rmin", type=float)
    s.add_argument("--rmax", type=float)
    s.add_argument("--count", type=int)
    s.add_argument("--center", choices=["origin", "cap"])

    s = subs.add_parser("odecheck", help="randomized suite for g'' - (lam+mu) g' + lam mu g = f")
    s.add_argument("--config")
    s.add_argument("--seed", type=int, nargs="+", help="one or more seeds")
    s.add_argument("--count", type=int, help="problems per seed")
    s.add_argument("--out")

    s = subs.add_parser("sweep", help="generate and check both surfaces for a grid of (n, p)")
    _common(s, sign=False)
    s.add_argument("--cells", nargs="+", help="cells as n:p (default: all with n <= --n-max)")
    s.add_argument("--n-max", type=int)
    s.add_argument("--jobs", type=int, help="worker processes")
    return parser


_DEFAULTS = {
    "n": 2,
    "p": 1,
    "sign": "+",
    "max_mode": 3,
    "grid": 25,
    "doubled": False,
    "profile_samples": 200,
    "sphere_samples": 24,
    "rmin": None,
    "rmax": None,
    "count": None,
    "radii": None,
    "center": "origin",
    "seed": [0],
    "cells": None,
    "n_max": 5,
    "jobs": 1,
}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the JSON config file and explicit flags, in that order."""
    values = dict(_DEFAULTS)
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ValidationError("config file must hold a JSON object")
        values.update({k.replace("-", "_"): v for k, v in loaded.items()})
    for key, val in vars(args).items():
        if key not in ("command", "config") and val is not None:
            values[key] = val
    control_kw = {k: typ(values[k]) for k, typ in _CONTROL_FLAGS.items() if values.get(k) is not None}
    controls = OrbitControls(**control_kw)
    out = values.get("out") or os.environ.get(OUT_ENV) or DEFAULT_OUT
    seeds = values["seed"]
    values["seed"] = seeds if isinstance(seeds, list) else [seeds]
    cfg = RunConfig(int(values["n"]), int(values["p"]), values["sign"], controls, Path(out), values)
    cfg.params  # validates (n, p)
    return cfg


# --- subcommands ------------------------------------------------------------


def cmd_roots(cfg: RunConfig) -> int:
    params = cfg.params
    kmax = int(cfg.options["max_mode"])
    if kmax < 0:
        raise ValidationError("--max-mode must be >= 0")
    header = ["n", "p", "k", "l", "re_plus", "im_plus", "re_minus", "im_minus", "kind"]
    rows = []
    for total in range(kmax + 1):
        for k in range(total + 1):
            r = indicial_roots(params, (k, total - k))
            rows.append([params.n, params.p, k, total - k, r.plus.real, r.plus.imag, r.minus.real, r.minus.imag, r.kind])
    path = cfg.output_dir() / f"roots_{cfg.tag(with_sign=False)}.csv"
    write_csv(path, header, rows)
    sys.stdout.write(path.read_text())
    return EXIT_OK


def _nullcline_y2(params: ConeParams, count: int = 200):
    """Y_2 = 0 on [0, pi/2] x [-pi/2, pi/2]: phi = atan(((n-p)/p) cot theta)."""
    th = np.linspace(1e-6, HALF_PI, count)
    return th, np.arctan(params.q / params.p / np.tan(th))


def _svg_portrait(params: ConeParams, grid_rows, orbits, points, size=600, margin=40) -> str:
    w = size
    h = 2 * size
    sx = (w - 2 * margin) / HALF_PI
    sy = (h - 2 * margin) / math.pi

    def px(theta, phi):
        return margin + theta * sx, h - margin - (phi + HALF_PI) * sy

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f"<!-- vector field Y on [0, pi/2] x [-pi/2, pi/2], n={params.n} p={params.p} -->",
        '<defs><marker id="head" markerWidth="6" markerHeight="6" refX="5" refY="3" orient="auto">'
        '<path d="M0,0 L6,3 L0,6 z" fill="#555"/></marker></defs>',
    ]
    x0, y0 = px(0, -HALF_PI)
    x1, y1 = px(HALF_PI, HALF_PI)
    out.append(f'<rect x="{x0:.3f}" y="{y1:.3f}" width="{x1 - x0:.3f}" height="{y0 - y1:.3f}" '
               'fill="none" stroke="black" class="domain"/>')
    cell = min((x1 - x0), (y0 - y1)) / max(1, int(math.sqrt(len(grid_rows))))
    for th, ph, y1v, y2v in grid_rows:
        norm = math.hypot(y1v, y2v)
        if norm == 0:
            continue
        ax, ay = px(th, ph)
        L = 0.4 * cell
        bx, by = ax + L * y1v / norm, ay - L * y2v / norm
        out.append(f'<line x1="{ax:.3f}" y1="{ay:.3f}" x2="{bx:.3f}" y2="{by:.3f}" stroke="#555" '
                   'stroke-width="1" marker-end="url(#head)" class="arrow"/>')
    # nullclines: Y_1 = 0 on theta = phi (and on the sides theta = 0, pi/2); Y_2 = 0 below
    a, b = px(0, 0)
    c, d = px(HALF_PI, HALF_PI)
    out.append(f'<line x1="{a:.3f}" y1="{b:.3f}" x2="{c:.3f}" y2="{d:.3f}" stroke="#1f77b4" '
               'stroke-dasharray="6,4" class="nullcline-y1"/>')
    th, ph = _nullcline_y2(params)
    pts = " ".join("%.3f,%.3f" % px(t, p) for t, p in zip(th, ph))
    out.append(f'<polyline points="{pts}" fill="none" stroke="#2ca02c" stroke-dasharray="6,4" class="nullcline-y2"/>')
    colors = {"+": "#d62728", "-": "#9467bd"}
    for name, curve in orbits:
        # Y(theta, phi + pi) = -Y(theta, phi): orbits are drawn with phi wrapped into [-pi/2, pi/2)
        phi = np.mod(curve.phi + HALF_PI, math.pi) - HALF_PI
        cuts = np.nonzero(np.abs(np.diff(phi)) > HALF_PI)[0] + 1
        for seg_th, seg_ph in zip(np.split(curve.theta, cuts), np.split(phi, cuts)):
            pts = []
            for t, p in zip(seg_th, seg_ph):
                xy = "%.3f,%.3f" % px(t, p)
                if not pts or pts[-1] != xy:
                    pts.append(xy)
            out.append(
                f'<polyline points="{" ".join(pts)}" fill="none" stroke="{colors.get(name, "#ff7f0e")}" '
                f'stroke-width="2" class="orbit" data-orbit="{name}" data-end-theta="{fmt(curve.theta[-1])}" '
                f'data-end-phi="{fmt(curve.phi[-1])}"/>'
            )
    for info in points:
        th, ph = info.location.theta, info.location.phi
        cx, cy = px(th, ph)
        out.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="5" fill="black" class="singular" '
                   f'data-kind="{info.kind}" data-theta="{fmt(th)}" data-phi="{fmt(ph)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_portrait(cfg: RunConfig) -> int:
    params = cfg.params
    m = int(cfg.options["grid"])
    if m < 2:
        raise ValidationError("--grid must be >= 2")
    th = np.linspace(0.0, HALF_PI, m)
    ph = np.linspace(-HALF_PI, HALF_PI, 2 * m - 1)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    Y1, Y2 = vector_field(params, TH, PH)
    grid_rows = list(zip(TH.ravel(), PH.ravel(), Y1.ravel(), Y2.ravel()))
    orbits = [("+", generate_sigma(params, "+", cfg.controls)), ("-", generate_sigma(params, "-", cfg.controls))]
    if cfg.options.get("doubled"):
        for which in ("-", "+"):
            orbits.append((f"doubled{which}", doubled_cone_orbit(params, which, cfg.controls)))
    points = singular_points(params)
    out = cfg.output_dir()
    tag = cfg.tag(with_sign=False)
    write_csv(out / f"portrait_{tag}.csv", ["theta", "phi", "Y1", "Y2"], grid_rows)
    write_csv(
        out / f"portrait_orbits_{tag}.csv",
        ["orbit", "s", "theta", "phi"],
        [[name, s, t, p] for name, c in orbits for s, t, p in zip(c.s, c.theta, c.phi)],
    )
    write_csv(
        out / f"portrait_endpoints_{tag}.csv",
        ["orbit", "theta_start", "phi_start", "theta_end", "phi_end", "distance_to_focus"],
        [[name, c.theta[0], c.phi[0], c.theta[-1], c.phi[-1], c.terminal_distance] for name, c in orbits],
    )
    write_csv(
        out / f"portrait_singular_{tag}.csv",
        ["kind", "theta", "phi", "eig1_re", "eig1_im", "eig2_re", "eig2_im"],
        [[i.kind, i.location.theta, i.location.phi, i.eigenvalues[0].real, i.eigenvalues[0].imag,
          i.eigenvalues[1].real, i.eigenvalues[1].imag] for i in points],
    )
    (out / f"portrait_{tag}.svg").write_text(_svg_portrait(params, grid_rows, orbits, points))
    print(f"wrote portrait_{tag}.svg and CSV files to {out}")
    for name, c in orbits:
        print(f"orbit {name}: ends at theta={fmt(c.theta[-1])} phi={fmt(c.phi[-1])} (distance {c.terminal_distance:.3g})")
    return EXIT_OK


def cmd_profile(cfg: RunConfig) -> int:
    curve = generate_sigma(cfg.params, cfg.sign, cfg.controls)
    cols = curve.columns()
    path = cfg.output_dir() / f"profile_{cfg.tag()}.csv"
    write_csv(path, list(cols), zip(*cols.values()))
    print(f"wrote {len(curve)} samples to {path} (terminal distance {curve.terminal_distance:.3g})")
    return EXIT_OK


def _decay_controls(controls: OrbitControls) -> OrbitControls:
    kw = dict(vars(controls))
    kw["rho_span"] = max(controls.rho_span, DECAY_RHO_SPAN)
    return OrbitControls(**kw)


def verify_report(cfg: RunConfig) -> tuple[list[str], bool, dict]:
    """Run the checks for one surface; returns report lines, overall status and artifact tables."""
    params = cfg.params
    curve = generate_sigma(params, cfg.sign, _decay_controls(cfg.controls))
    lines, ok, tables = [], True, {}

    def check(name, value, passed, detail=""):
        nonlocal ok
        ok &= bool(passed)
        lines.append(f"{'PASS' if passed else 'FAIL'} {name}: {value}{detail}")

    lines.append(f"surface Sigma_{{{params.n},{params.p},{cfg.sign}}}: {len(curve)} samples")
    check("terminal distance", f"{curve.terminal_distance:.3g}", curve.terminal_distance < 1e-6, " (tol 1e-6)")
    slope = rho_slope(curve)
    check("rho slope", f"{slope:.12g}", abs(slope / params.sin2 - 1) < 0.01, f" (sin 2 theta0 = {params.sin2:.12g})")
    ode_res = float(np.max(profile_residual(curve)))
    check("profile ODE residual", f"{ode_res:.3g}", ode_res <= 1e-6, " (tol 1e-6)")
    graph = profile_to_graph(curve)
    res = residual_invariant(params, graph)
    inv = float(np.max(res.scaled))
    check("graph equation residual", f"{inv:.3g}", inv <= 1e-5, " (tol 1e-5)")
    roots = indicial_roots(params, (0, 0))
    fit = fit_decay(graph, roots)
    tol = 0.05 if roots.oscillatory else 0.02
    check("decay rate", f"{fit.rate:.6g}", fit.rate_error <= tol, f" (expected {roots.dominant_rate:.6g}, tol {tol:.0%})")
    if roots.oscillatory:
        check("decay frequency", f"{fit.frequency:.6g}", fit.frequency_error <= 0.05,
              f" (expected {roots.frequency:.6g}, tol 5%)")
    lines.append(f"decay window [{fit.window[0]:.4g}, {fit.window[1]:.4g}], {fit.sign_changes} sign changes, "
                 f"regression residual {fit.residual:.3g}")
    mask = (graph.t >= fit.window[0]) & (graph.t <= fit.window[1])
    tables["decay"] = (["t", "g"], list(zip(graph.t[mask], graph.g[mask])))
    radii = np.exp(np.linspace(0.5, float(curve.rho.max()) - 0.5, 60))
    dens = density_profile(curve, radii)
    target = cone_density(params)
    check("density monotone", f"max drop {dens.max_decrease():.3g}", dens.is_monotone(1e-8), " (tol 1e-8)")
    check("density estimate", f"{dens.limit_estimate:.4f} ({dens.limit_estimate:.10g})",
          abs(dens.limit_estimate - target) <= 1e-3, f" (cone density {target:.10g}, tol 1e-3)")
    tables["density"] = (["r", "theta"], list(zip(dens.radii, dens.theta)))
    if params.n == 2:
        rows = []
        for t in np.arange(3.0, 8.01, 1.0):
            tor = torus_from_radial(graph, t + 0.002 * np.arange(-4, 5), 64)
            F = flux(tor, float(t), 256)
            rows.append([float(t), *F.flux_vector, F.norm])
        worst = max(r[-1] for r in rows)
        check("flux", f"max |F| on t in [3, 8] = {worst:.3g}", worst <= 1e-6, " (tol 1e-6)")
        tables["flux"] = (["t", "F1", "F2", "F3", "F4", "norm"], rows)
    return lines, ok, tables


def cmd_verify(cfg: RunConfig) -> int:
    lines, ok, tables = verify_report(cfg)
    out = cfg.output_dir()
    tag = cfg.tag()
    for name, (header, rows) in tables.items():
        write_csv(out / f"verify_{name}_{tag}.csv", header, rows)
    lines.append("all checks passed" if ok else "some checks FAILED")
    text = "\n".join(lines) + "\n"
    (out / f"verify_{tag}.txt").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_VALIDATION


def _sphere_points(m: int, count: int) -> np.ndarray:
    """Deterministic points on S^m in R^{m+1}: a uniform grid for m = 1, a seeded sample otherwise."""
    if m == 1:
        ang = 2 * math.pi * np.arange(count) / count
        return np.stack([np.cos(ang), np.sin(ang)], 1)
    rng = np.random.default_rng(12345 + m)
    v = rng.standard_normal((count, m + 1))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def cmd_mesh(cfg: RunConfig) -> int:
    params = cfg.params
    curve = generate_sigma(params, cfg.sign, cfg.controls)
    m = int(cfg.options["profile_samples"])
    k = int(cfg.options["sphere_samples"])
    if m < 2 or k < 3:
        raise ValidationError("--profile-samples must be >= 2 and --sphere-samples >= 3")
    idx = np.unique(np.linspace(0, len(curve) - 1, m).round().astype(int))
    a, b = curve.a[idx], curve.b[idx]
    s1 = _sphere_points(params.p, k)
    s2 = _sphere_points(params.q, k)
    out = cfg.output_dir()
    tag = cfg.tag()
    dim = params.n + 2
    rows = []
    for ai, bi in zip(a, b):
        x = ai * s1
        y = bi * s2
        for xi in x:
            for yi in y:
                rows.append(np.concatenate([xi, yi]))
    write_csv(out / f"mesh_{tag}.csv", [f"x{i + 1}" for i in range(dim)], [list(map(float, r)) for r in rows],
              comments=(f"points a*S^{params.p} x b*S^{params.q} over {idx.size} profile samples",))
    msg = f"wrote {len(rows)} points to mesh_{tag}.csv"
    if params.n == 2:
        # the phi = 0 slice of the second circle is a surface in R^4 lying in x4 = 0
        ang = 2 * math.pi * np.arange(k) / k
        buf = io.StringIO()
        buf.write("# Sigma slice at second-circle angle 0: (a cos t, a sin t, b, 0);\n")
        buf.write("# projected to R^3 by dropping the last coordinate x4 (identically 0 on the slice)\n")
        for ai, bi in zip(a, b):
            for t in ang:
                buf.write(f"v {fmt(ai * math.cos(t))} {fmt(ai * math.sin(t))} {fmt(bi)}\n")
        for i in range(idx.size - 1):
            for j in range(k):
                v00 = i * k + j + 1
                v01 = i * k + (j + 1) % k + 1
                v10 = v00 + k
                v11 = v01 + k
                buf.write(f"f {v00} {v01} {v11} {v10}\n")
        (out / f"mesh_{tag}.obj").write_text(buf.getvalue())
        msg += f" and mesh_{tag}.obj"
    print(msg)
    return EXIT_OK


def cmd_density(cfg: RunConfig) -> int:
    opts = cfg.options
    curve = generate_sigma(cfg.params, cfg.sign, cfg.controls)
    center = opts["center"]
    if opts.get("radii"):
        radii = np.asarray(opts["radii"], dtype=float)
    else:
        top = float(curve.rho.max())
        default_min = 1e-3 if center == "cap" else math.exp(0.5)
        rmin = float(opts["rmin"] or default_min)
        rmax = float(opts["rmax"] or math.exp(top - 0.5))
        count = int(opts["count"] or 40)
        if not 0 < rmin < rmax:
            raise ValidationError("need 0 < rmin < rmax")
        radii = np.geomspace(rmin, rmax, count)
    prof = density_profile(curve, radii, center=center)
    path = cfg.output_dir() / f"density_{center}_{cfg.tag()}.csv"
    write_csv(path, ["r", "theta"], zip(prof.radii, prof.theta),
              comments=(f"center={center}; cone density {fmt(cone_density(cfg.params))}",))
    print(f"limit estimate {prof.limit_estimate:.12g} (cone density {cone_density(cfg.params):.12g}); wrote {path}")
    return EXIT_OK


def cmd_odecheck(cfg: RunConfig) -> int:
    count = int(cfg.options["count"] or 200)
    rows = []
    print(f"{'seed':>6} {'max reconstruction error':>26} {'observed c':>12} {'v-estimate':>11}")
    for seed in cfg.options["seed"]:
        res = run_suite(seed=int(seed), count=count)
        rows.append([int(seed), res.max_reconstruction_error, res.observed_c, "holds" if res.all_v_hold else "fails"])
        print(f"{seed:>6} {res.max_reconstruction_error:>26.3e} {res.observed_c:>12.4f} {rows[-1][3]:>11}")
    write_csv(cfg.output_dir() / "odecheck.csv", ["seed", "max_reconstruction_error", "observed_c", "v_estimate"], rows)
    return EXIT_OK if all(r[3] == "holds" and r[1] <= 1e-7 for r in rows) else EXIT_VALIDATION


def _sweep_cell(n: int, p: int, controls: OrbitControls, out: str) -> dict:
    """One (n, p) cell; errors are caught and reported so other cells keep going."""
    result = {"n": n, "p": p, "status": "ok", "message": ""}
    try:
        params = ConeParams(n, p)
        rows = []
        for sign in "+-":
            curve = generate_sigma(params, sign, controls)
            graph = profile_to_graph(curve)
            roots = indicial_roots(params, (0, 0))
            radii = np.exp(np.linspace(0.5, float(curve.rho.max()) - 0.5, 30))
            dens = density_profile(curve, radii)
            rows.append([sign, len(curve), curve.terminal_distance, rho_slope(curve),
                         float(np.max(residual_invariant(params, graph).scaled)),
                         dens.limit_estimate, cone_density(params), roots.dominant_rate, roots.kind])
        write_csv(Path(out) / f"sweep_n{n}_p{p}.csv",
                  ["sign", "samples", "terminal_distance", "rho_slope", "graph_residual", "density_limit",
                   "cone_density", "dominant_rate", "kind"], rows)
    except ValidationError as exc:
        result.update(status="invalid", message=str(exc))
    except ConvergenceError as exc:
        result.update(status="nonconvergent", message=str(exc))
    except Exception as exc:  # noqa: BLE001 - partial-results contract
        result.update(status="error", message=f"{type(exc).__name__}: {exc}")
    return result


def _parse_cells(cfg: RunConfig) -> list[tuple[int, int]]:
    if cfg.options.get("cells"):
        cells = []
        for item in cfg.options["cells"]:
            try:
                n, p = (int(x) for x in str(item).split(":"))
            except ValueError as exc:
                raise ValidationError(f"cell {item!r} is not of the form n:p") from exc
            cells.append((n, p))
        return cells
    nmax = int(cfg.options["n_max"])
    return [(n, p) for n in range(2, nmax + 1) for p in range(1, n)]


def cmd_sweep(cfg: RunConfig) -> int:
    cells = _parse_cells(cfg)
    out = cfg.output_dir()
    jobs = max(1, int(cfg.options["jobs"]))
    if jobs == 1:
        results = [_sweep_cell(n, p, cfg.controls, str(out)) for n, p in cells]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_sweep_cell, n, p, cfg.controls, str(out)) for n, p in cells]
            results = [f.result() for f in futures]
    for r in results:
        print(f"n={r['n']} p={r['p']}: {r['status']}{' - ' + r['message'] if r['message'] else ''}")
    statuses = {r["status"] for r in results}
    if statuses <= {"ok"}:
        return EXIT_OK
    if "nonconvergent" in statuses:
        return EXIT_CONVERGENCE
    return EXIT_VALIDATION


COMMANDS = {
    "roots": cmd_roots,
    "portrait": cmd_portrait,
    "profile": cmd_profile,
    "verify": cmd_verify,
    "mesh": cmd_mesh,
    "density": cmd_density,
    "odecheck": cmd_odecheck,
    "sweep": cmd_sweep,
}


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
