"""Config-driven experiment runner.

Scenario configs are flat ``key = value`` lines grouped by bracketed section
headers; see ``parse_config`` for the grammar.  A run executes the scenario
(expanding an optional one-parameter sweep), writes one CSV per run point, a
plain-text report of the requested diagnostic checks, and optionally a
gnuplot script referencing the CSVs by relative path.  Files are written
atomically (temp file + rename).  Exit codes: 0 success, 1 diagnostic
failure, 2 config error, 3 numerical divergence.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import algorithms, diagnostics, dynamics, potentials
from .errors import (AdigeLabError, ConfigError, DivergenceError,
                     InsufficientDataError)

__all__ = ["parse_config", "run", "ScenarioConfig", "RunArtifacts", "main"]

_DYNAMIC_KINDS = ("adige_v", "adige_vh", "adige_vgh", "open_loop")
_ALGO_KINDS = ("prox_inertial", "nesterov", "heavy_ball")
_SECTIONS = ("scenario", "problem", "system", "integrator", "diagnostics", "sweep")
_CHECKS = ("energy_monotone", "rate_fit", "crossings", "stabilization",
           "ergodic", "terminal_grad", "certificate", "angle")


@dataclass
class ScenarioConfig:
    name: str
    problem_id: str
    system_kind: str
    phi: Optional[tuple] = None           # parsed damping-law structure
    beta: float = 0.0
    gamma: Optional[tuple] = None         # ("const", g) or ("over_t", a)
    alpha: Optional[float] = None
    momentum: Optional[float] = None
    s: Optional[float] = None
    x0: Optional[np.ndarray] = None
    v0: Optional[np.ndarray] = None
    x1: Optional[np.ndarray] = None
    t0: float = 0.0
    max_iter: int = 100_000
    stop_tol: float = 1e-10
    h: float = 1e-3
    T: float = 10.0
    scheme: str = "prox_semi_implicit"
    yosida_lambda: Optional[float] = None
    record_every: int = 1
    checks: list = dc_field(default_factory=list)
    sweep: Optional[tuple] = None         # (param, [values])

    @property
    def is_algorithm(self):
        return self.system_kind in _ALGO_KINDS


@dataclass
class RunArtifacts:
    label: str
    trajectory_csv_path: str
    report_path: str
    plot_script_path: Optional[str] = None
    ok: bool = True
    diagnostics: Optional[diagnostics.DiagnosticsReport] = None


# ---------------------------------------------------------------------------
# parsing


def _parse_phi(text):
    """Parse the damping-law grammar.

    ``viscous:1.0`` / ``dry:0.5`` / ``power:r=1,p=3`` /
    ``quadform:diag=1,1000``; '+'-joined terms form a sum and
    ``max(term|term)`` a pointwise maximum.
    """
    text = text.strip()
    if text.startswith("max(") and text.endswith(")"):
        inner = text[4:-1].split("|")
        if len(inner) != 2:
            raise ValueError("max(...) needs exactly two '|'-separated terms")
        return ("max", [_parse_phi(inner[0]), _parse_phi(inner[1])])
    if "+" in text:
        return ("sum", [_parse_phi(part) for part in text.split("+")])
    kind, _, args = text.partition(":")
    kind = kind.strip()
    if kind == "viscous":
        kv = _parse_params(args, positional="gamma")
        if kv.get("gamma", 0) <= 0:
            raise ValueError("gamma must be > 0")
        return ("viscous", kv)
    if kind == "dry":
        kv = _parse_params(args, positional="r")
        if kv.get("r", 0) <= 0:
            raise ValueError("r must be > 0")
        return ("dry", kv)
    if kind == "power":
        kv = _parse_params(args)
        if "r" not in kv or "p" not in kv:
            raise ValueError("power needs r and p")
        if kv["r"] <= 0:
            raise ValueError("r must be > 0")
        if kv["p"] < 1:
            raise ValueError("p must be >= 1")
        return ("power", kv)
    if kind == "quadform":
        kv = args.partition("=")
        if kv[0].strip() != "diag" or not kv[2]:
            raise ValueError("quadform needs diag=v1,v2,...")
        diag = [float(v) for v in kv[2].split(",")]
        if any(v <= 0 for v in diag):
            raise ValueError("quadform diagonal must be positive")
        return ("quadform", {"diag": diag})
    raise ValueError(f"unknown damping law kind {kind!r}")


def _parse_params(args, positional=None):
    out = {}
    if not args:
        return out
    for item in args.split(","):
        if "=" in item:
            k, _, v = item.partition("=")
            out[k.strip()] = float(v)
        elif positional is not None and positional not in out:
            out[positional] = float(item)
        else:
            raise ValueError(f"cannot parse parameter {item!r}")
    return out


def _build_phi(parsed):
    kind, arg = parsed
    if kind == "viscous":
        return potentials.Viscous(arg["gamma"])
    if kind == "dry":
        return potentials.Dry(arg["r"])
    if kind == "power":
        return potentials.Power(arg["r"], arg["p"])
    if kind == "quadform":
        return potentials.QuadraticForm(np.diag(arg["diag"]))
    if kind == "sum":
        return potentials.Sum(*[_build_phi(p) for p in arg])
    if kind == "max":
        return potentials.Max(_build_phi(arg[0]), _build_phi(arg[1]))
    raise ValueError(f"unknown damping law kind {kind!r}")


def _parse_vector(text):
    return np.array([float(v) for v in str(text).split(",")], dtype=float)


def _parse_gamma(text):
    text = text.strip()
    if text.endswith("/t"):
        return ("over_t", float(text[:-2]))
    return ("const", float(text))


def _parse_check_params(text):
    text = text.strip()
    if text in ("", "-"):
        return {}
    out = {}
    for item in text.split(","):
        k, eq, v = item.partition("=")
        if not eq:
            raise ValueError(f"check parameter {item!r} is not key=value")
        k = k.strip()
        v = v.strip()
        if k in ("model", "channel"):
            out[k] = v
        elif k == "window":
            lo, _, hi = v.partition(":")
            out[k] = (float(lo), float(hi))
        elif k == "component":
            out[k] = int(v)
        else:
            out[k] = float(v)
    return out


def parse_config(text) -> ScenarioConfig:
    """Parse and validate a scenario config.

    The grammar is flat ``key = value`` lines under bracketed section
    headers ([scenario], [problem], [system], [integrator], [diagnostics],
    [sweep]); '#' starts a comment.  Raises :class:`ConfigError` carrying
    every (line number, message) pair found.
    """
    entries = {}   # (section, key) -> (value, lineno)
    order = []
    errors = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                errors.append((lineno, f"unknown section [{section}]"))
                section = None
            continue
        if "=" not in line:
            errors.append((lineno, f"expected key = value, got {line!r}"))
            continue
        if section is None:
            errors.append((lineno, "key outside of any [section]"))
            continue
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if (section, key) in entries:
            errors.append((lineno, f"duplicate key {key!r} in [{section}]"))
            continue
        entries[(section, key)] = (value, lineno)
        order.append((section, key))

    failed = set()

    def take(section, key, default=None):
        return entries.pop((section, key), (default, None))

    def typed(section, key, conv, default=None, required=False):
        value, lineno = take(section, key)
        if value is None:
            if required:
                errors.append((0, f"missing required key {key!r} in [{section}]"))
            return default
        try:
            return conv(value)
        except (ValueError, AdigeLabError) as exc:
            errors.append((lineno, f"{key}: {exc}"))
            failed.add((section, key))
            return default

    def _problem_id(v):
        potentials.lookup(v)
        return v

    name = typed("scenario", "name", str, default="scenario")
    problem_id = typed("problem", "id", _problem_id, required=True)

    kind = typed("system", "kind", str, required=True)
    if kind is not None and kind not in _DYNAMIC_KINDS + _ALGO_KINDS:
        errors.append((0, f"unknown system kind {kind!r}"))

    cfg = ScenarioConfig(
        name=name or "scenario",
        problem_id=problem_id or "",
        system_kind=kind or "",
        phi=typed("system", "phi", _parse_phi),
        beta=typed("system", "beta", float, default=0.0),
        gamma=typed("system", "gamma", _parse_gamma),
        alpha=typed("system", "alpha", float),
        momentum=typed("system", "momentum", float),
        s=typed("system", "s", float),
        x0=typed("system", "x0", _parse_vector),
        v0=typed("system", "v0", _parse_vector),
        x1=typed("system", "x1", _parse_vector),
        t0=typed("system", "t0", float, default=0.0),
        max_iter=typed("system", "max_iter", lambda v: int(float(v)), default=100_000),
        stop_tol=typed("system", "stop_tol", float, default=1e-10),
        h=typed("integrator", "h", float, default=1e-3),
        T=typed("integrator", "T", float, default=10.0),
        record_every=typed("integrator", "record_every", lambda v: int(float(v)), default=1),
    )

    scheme, lineno = take("integrator", "scheme")
    if scheme is not None:
        scheme = scheme.strip()
        if scheme in ("prox", "prox_semi_implicit"):
            cfg.scheme = "prox_semi_implicit"
        elif scheme.startswith("yosida"):
            cfg.scheme = "yosida_rk4"
            _, _, lam = scheme.partition(":")
            try:
                cfg.yosida_lambda = float(lam)
            except ValueError:
                errors.append((lineno, f"yosida scheme needs a smoothing value, got {scheme!r}"))
        else:
            errors.append((lineno, f"unknown scheme {scheme!r}"))

    for section, key in list(order):
        if section == "diagnostics" and (section, key) in entries:
            value, lineno = entries.pop((section, key))
            if key not in _CHECKS:
                errors.append((lineno, f"unknown diagnostic check {key!r}"))
                continue
            try:
                cfg.checks.append((key, _parse_check_params(value)))
            except ValueError as exc:
                errors.append((lineno, f"{key}: {exc}"))

    sweep_param, _ = take("sweep", "param")
    sweep_values = typed("sweep", "values", lambda v: [float(s) for s in v.split(",")])
    if sweep_param is not None or sweep_values is not None:
        if sweep_param is None or sweep_values is None:
            errors.append((0, "[sweep] needs both param and values"))
        else:
            try:
                _apply_sweep_value(cfg, sweep_param, sweep_values[0], dry_run=True)
                cfg.sweep = (sweep_param, sweep_values)
            except ValueError as exc:
                errors.append((0, f"sweep: {exc}"))

    for (section, key), (_, lineno) in entries.items():
        errors.append((lineno, f"unknown key {key!r} in [{section}]"))

    def missing(section, key, value):
        return value is None and (section, key) not in failed

    if cfg.system_kind in _DYNAMIC_KINDS:
        if cfg.system_kind != "open_loop" and missing("system", "phi", cfg.phi):
            errors.append((0, f"system {cfg.system_kind!r} needs phi"))
        if cfg.system_kind == "open_loop" and missing("system", "gamma", cfg.gamma):
            errors.append((0, "open_loop needs gamma"))
        if missing("system", "x0", cfg.x0):
            errors.append((0, "dynamics need x0"))
    elif cfg.system_kind in _ALGO_KINDS:
        if missing("system", "x0", cfg.x0):
            errors.append((0, "algorithms need x0"))
        if cfg.system_kind == "prox_inertial" and missing("system", "phi", cfg.phi):
            errors.append((0, "prox_inertial needs phi"))
        if cfg.system_kind in ("nesterov", "heavy_ball") and missing("system", "s", cfg.s):
            errors.append((0, "gradient baselines need the step s"))

    if errors:
        raise ConfigError(sorted(errors))
    return cfg


def _apply_sweep_value(cfg, param, value, dry_run=False):
    """Return a copy of cfg with the sweep parameter set (validates paths)."""
    out = dataclasses.replace(cfg, checks=list(cfg.checks), sweep=None)
    if param.startswith("phi."):
        field_name = param[4:]
        if out.phi is None or out.phi[0] not in ("viscous", "dry", "power"):
            raise ValueError(f"sweep over {param!r} needs a simple damping law")
        kind, kv = out.phi
        if field_name not in ("r", "p", "gamma"):
            raise ValueError(f"unknown damping-law field {field_name!r}")
        kv = dict(kv)
        kv[field_name] = value
        out.phi = (kind, kv)
        return out
    if param in ("beta", "alpha", "momentum", "s", "h", "T", "t0", "stop_tol"):
        setattr(out, param, value)
        return out
    raise ValueError(f"sweep parameter {param!r} does not resolve to a scenario field")


# ---------------------------------------------------------------------------
# execution


def _build_dynamics_spec(cfg, entry):
    obj = entry.objective
    if cfg.system_kind == "adige_v":
        system = dynamics.AdigeV(_build_phi(cfg.phi))
    elif cfg.system_kind == "adige_vh":
        system = dynamics.AdigeVH(_build_phi(cfg.phi), cfg.beta)
    elif cfg.system_kind == "adige_vgh":
        system = dynamics.AdigeVGH(_build_phi(cfg.phi), cfg.beta)
    else:
        mode, val = cfg.gamma
        gamma = (dynamics.constant_damping(val) if mode == "const"
                 else dynamics.vanishing_damping(val))
        system = dynamics.OpenLoop(gamma, cfg.beta)
    v0 = cfg.v0 if cfg.v0 is not None else np.zeros(obj.dim)
    return dynamics.DynamicsSpec(system, obj, cfg.x0, v0, t0=cfg.t0)


def _execute_one(cfg, label, out_dir, seed):
    entry = potentials.lookup(cfg.problem_id)
    csv_path = os.path.join(out_dir, f"{label}.csv")
    report_path = os.path.join(out_dir, f"{label}.report.txt")
    lines = [f"scenario: {cfg.name}", f"run: {label}",
             f"problem: {cfg.problem_id}", f"system: {cfg.system_kind}"]
    ok = True

    report = None
    if cfg.is_algorithm:
        log = _run_algorithm(cfg, entry)
        _write_algorithm_csv(csv_path, log, entry)
        lines.append(f"iterations: {len(log.u)}")
        results = _run_checks_algorithm(cfg, log, entry)
    else:
        spec = _build_dynamics_spec(cfg, entry)
        icfg = dynamics.IntegratorConfig(
            h=cfg.h, T=cfg.T, scheme=cfg.scheme,
            yosida_lambda=cfg.yosida_lambda, record_every=cfg.record_every)
        traj = dynamics.simulate(spec, icfg)
        _write_trajectory_csv(csv_path, traj)
        lines.append(f"samples: {len(traj)}")
        results, report = _run_checks_trajectory(cfg, traj, entry, seed)

    for passed, text in results:
        ok = ok and passed
        lines.append(("PASS " if passed else "FAIL ") + text)
    lines.append("result: " + ("ok" if ok else "diagnostic failure"))
    _atomic_write(report_path, "\n".join(lines) + "\n")
    return RunArtifacts(label=label, trajectory_csv_path=csv_path,
                        report_path=report_path, ok=ok, diagnostics=report)


def _run_algorithm(cfg, entry):
    obj = entry.objective
    if cfg.system_kind == "prox_inertial":
        pc = algorithms.ProxInertialConfig(
            phi=_build_phi(cfg.phi), objective=obj, h=cfg.h, x0=cfg.x0,
            x1=cfg.x1, max_iter=cfg.max_iter, stop_tol=cfg.stop_tol)
        return algorithms.prox_inertial_run(pc)
    if cfg.system_kind == "nesterov":
        return algorithms.nesterov_agm(obj, cfg.s, cfg.alpha if cfg.alpha is not None else 3.0,
                                       cfg.x0, cfg.max_iter)
    return algorithms.heavy_ball(obj, cfg.s, cfg.momentum if cfg.momentum is not None else 0.0,
                                 cfg.x0, cfg.max_iter)


def _series_for_channel(traj, channel):
    if channel == "energy":
        return traj.energy
    if channel == "grad_norm":
        return traj.grad_norm
    if channel == "f":
        return diagnostics.objective_gap(traj)
    raise ValueError(f"unknown rate-fit channel {channel!r}")


def _run_checks_trajectory(cfg, traj, entry, seed):
    results = []
    report = diagnostics.DiagnosticsReport(
        terminal_grad_norm=float(traj.grad_norm[-1]))
    for check, kv in cfg.checks:
        if check == "energy_monotone":
            slack = kv.get("slack", 1e-9)
            viol, worst = diagnostics.check_energy_monotone(traj, slack)
            report.energy_violations = (viol, worst)
            results.append((viol == 0,
                            f"energy_monotone: violations={viol} worst={worst:.3e} slack={slack:g}"))
        elif check == "rate_fit":
            model = kv.get("model", "exponential")
            window = kv.get("window", (float(traj.t[0] + 0.1 * (traj.t[-1] - traj.t[0])),
                                       float(traj.t[-1])))
            series = _series_for_channel(traj, kv.get("channel", "f"))
            try:
                fit = diagnostics.fit_rate(traj.t, series, model, window)
            except InsufficientDataError as exc:
                results.append((False, f"rate_fit: {exc}"))
                continue
            report.rate = fit
            passed = fit.rate >= kv.get("min_rate", 0.0) and fit.r2 >= kv.get("min_r2", -math.inf)
            if "target" in kv:
                passed = passed and abs(fit.rate - kv["target"]) <= kv.get("tol", 0.1)
            results.append((passed,
                            f"rate_fit: model={model} rate={fit.rate:.6g} r2={fit.r2:.6f}"))
        elif check == "crossings":
            a, b = kv.get("a", -1.0), kv.get("b", 1.0)
            ca, cb = diagnostics.count_band_crossings(traj, a, b, kv.get("component", 0))
            report.crossings = {a: ca, b: cb}
            total = ca + cb
            passed = total >= kv.get("min_total", 0)
            results.append((passed, f"crossings: a={ca} b={cb} total={total}"))
        elif check == "stabilization":
            tol = kv.get("tol", 1e-8)
            ts = diagnostics.detect_stabilization(traj, tol)
            report.stabilization_time = ts
            passed = ts is not None and ts <= kv.get("max_time", math.inf)
            results.append((passed, f"stabilization: T*={ts} tol={tol:g}"))
        elif check == "ergodic":
            _, _, tail = diagnostics.ergodic_average(traj)
            report.ergodic_mean_tail = tail
            norm = float(np.linalg.norm(tail))
            passed = norm <= kv.get("max_tail", math.inf)
            results.append((passed, f"ergodic: tail_norm={norm:.6g}"))
        elif check == "terminal_grad":
            g = float(traj.grad_norm[-1])
            passed = g <= kv.get("max", math.inf)
            results.append((passed, f"terminal_grad: {g:.6g}"))
        elif check == "angle":
            results.append(_angle_check(cfg, entry, kv, seed))
        else:
            results.append((False, f"{check}: not applicable to a dynamics run"))
    return results, report


def _angle_check(cfg, entry, kv, seed):
    if cfg.phi is None:
        return False, "angle: scenario has no damping law"
    if "gamma" not in kv or "delta" not in kv:
        return False, "angle: needs gamma and delta constants"
    try:
        cert = diagnostics.angle_certificate(
            entry.objective, _build_phi(cfg.phi),
            lam=kv.get("lam", 0.0), beta=kv.get("beta", cfg.beta),
            R=kv.get("R", 1.0), eps=kv.get("eps", 1.0),
            grid_n=int(kv.get("grid_n", 51)),
            gamma_phi=kv["gamma"], delta=kv["delta"],
            M=kv.get("M"), seed=seed)
    except AdigeLabError as exc:
        return False, f"angle: refused ({exc})"
    return cert.passed, (f"angle: bound={cert.alpha_bound:.6g} "
                         f"min_ratio={cert.empirical_min_ratio:.6g} "
                         f"samples={cert.samples}")


def _run_checks_algorithm(cfg, log, entry):
    results = []
    for check, kv in cfg.checks:
        if check == "certificate":
            gamma = kv.get("gamma")
            if gamma is None:
                phi = _build_phi(cfg.phi) if cfg.phi else None
                gamma = phi.quadratic_gamma() if phi is not None else None
            L = kv.get("L")
            if L is None:
                L = entry.objective.lipschitz_on_ball(
                    float(np.abs(log.x).max())) if entry.objective.lipschitz_on_ball else None
            if gamma is None or L is None:
                results.append((False, "certificate: gamma/L unavailable"))
                continue
            rep = algorithms.prox_inertial_certificate(log, gamma, L,
                                                       kv.get("slack", 1e-10))
            results.append((rep.violations == 0,
                            f"certificate: violations={rep.violations} "
                            f"worst={rep.worst_slack:+.3e} sum_u2={rep.sum_sq_steps:.6g}"))
        elif check == "terminal_grad":
            g = float(np.linalg.norm(entry.objective.grad(log.x[-1])))
            passed = g <= kv.get("max", math.inf)
            results.append((passed, f"terminal_grad: {g:.6g}"))
        else:
            results.append((False, f"{check}: not applicable to an algorithm run"))
    return results


def run(config: ScenarioConfig, out_dir, seed=None, jobs=1):
    """Execute a scenario (all sweep points) into ``out_dir``.

    Sweep points are independent; with ``jobs > 1`` they execute in a
    thread pool.  Output naming is ``name.csv`` for single runs and
    ``name__param=value.csv`` per sweep point.  Returns the artifact list;
    per-run diagnostic failures are reported in the artifacts, divergence
    raises :class:`DivergenceError`.
    """
    os.makedirs(out_dir, exist_ok=True)
    points = []
    if config.sweep is None:
        points.append((config.name, config))
    else:
        param, values = config.sweep
        for v in values:
            points.append((f"{config.name}__{param.split('.')[-1]}={v:g}",
                           _apply_sweep_value(config, param, v)))

    artifacts = [None] * len(points)
    if jobs > 1 and len(points) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            futs = {pool.submit(_execute_one, cfg, label, out_dir, seed): i
                    for i, (label, cfg) in enumerate(points)}
            for fut in concurrent.futures.as_completed(futs):
                artifacts[futs[fut]] = fut.result()
    else:
        for i, (label, cfg) in enumerate(points):
            artifacts[i] = _execute_one(cfg, label, out_dir, seed)

    plot_path = os.path.join(out_dir, f"{config.name}.plot.gp")
    _write_plot_script(plot_path, [a.trajectory_csv_path for a in artifacts])
    for a in artifacts:
        a.plot_script_path = plot_path
    return artifacts


# ---------------------------------------------------------------------------
# serialization


def _fmt(x):
    return f"{x:.17g}"


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_trajectory_csv(path, traj):
    d = traj.dim
    cols = (["t"] + [f"x_{i}" for i in range(d)] + [f"v_{i}" for i in range(d)]
            + ["energy", "grad_norm"])
    if traj.u is not None:
        cols += [f"u_{i}" for i in range(d)]
    rows = [",".join(cols)]
    for k in range(len(traj)):
        vals = [traj.t[k], *traj.x[k], *traj.v[k], traj.energy[k], traj.grad_norm[k]]
        if traj.u is not None:
            vals += list(traj.u[k])
        rows.append(",".join(_fmt(v) for v in vals))
    _atomic_write(path, "\n".join(rows) + "\n")


def _write_algorithm_csv(path, log, entry):
    d = log.x.shape[1]
    cols = (["t"] + [f"x_{i}" for i in range(d)] + [f"v_{i}" for i in range(d)]
            + ["energy", "grad_norm"])
    rows = [",".join(cols)]
    # gap-style logs carry one W per iterate, the prox-inertial log one per
    # velocity (aligned with the iterate the velocity produced)
    w_off = 1 if len(log.W) == len(log.x) else 0
    for n in range(len(log.u)):
        x = log.x[n + 1]
        g = float(np.linalg.norm(entry.objective.grad(x)))
        vals = [(n + 1) * log.h, *x, *log.u[n], log.W[n + w_off], g]
        rows.append(",".join(_fmt(v) for v in vals))
    _atomic_write(path, "\n".join(rows) + "\n")


def _write_plot_script(path, csv_paths):
    base = os.path.dirname(os.path.abspath(path))
    rels = [os.path.relpath(p, base) for p in csv_paths]
    lines = [
        "# gnuplot script; run from this directory. Plotting is optional,",
        "# the CSV files are the contract.",
        "set datafile separator ','",
        "set key autotitle columnhead outside",
        "set xlabel 't'",
        "set ylabel 'x_0'",
    ]
    plot = "plot " + ", \\\n     ".join(
        f"'{r}' using 1:2 with lines title '{os.path.basename(r)[:-4]}'" for r in rels)
    lines.append(plot)
    _atomic_write(path, "\n".join(lines) + "\n")


def load_trajectory_csv(path):
    """Reload a trajectory CSV written by this runner."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    idx = {name: i for i, name in enumerate(header)}
    d = sum(1 for name in header if name.startswith("x_"))
    x = data[:, [idx[f"x_{i}"] for i in range(d)]]
    v = data[:, [idx[f"v_{i}"] for i in range(d)]]
    u = None
    if "u_0" in idx:
        u = data[:, [idx[f"u_{i}"] for i in range(d)]]
    return dynamics.Trajectory(
        t=data[:, idx["t"]], x=x, v=v, energy=data[:, idx["energy"]],
        grad_norm=data[:, idx["grad_norm"]], f_ref=0.0, u=u)


# ---------------------------------------------------------------------------
# entry point


def _cmd_simulate(args, algorithm=False):
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        for lineno, msg in exc.errors:
            print(f"config error (line {lineno}): {msg}", file=sys.stderr)
        return 2
    if algorithm != cfg.is_algorithm:
        expected = "an algorithm" if algorithm else "a dynamics"
        print(f"config error: system kind {cfg.system_kind!r} is not {expected} system",
              file=sys.stderr)
        return 2
    try:
        artifacts = run(cfg, args.out, seed=args.seed, jobs=args.jobs)
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 3
    ok = all(a.ok for a in artifacts)
    for a in artifacts:
        print(f"{'ok  ' if a.ok else 'FAIL'} {a.trajectory_csv_path}")
    return 0 if ok else 1


def _cmd_verify(args):
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        for lineno, msg in exc.errors:
            print(f"config error (line {lineno}): {msg}", file=sys.stderr)
        return 2
    labels = [cfg.name] if cfg.sweep is None else [
        f"{cfg.name}__{cfg.sweep[0].split('.')[-1]}={v:g}" for v in cfg.sweep[1]]
    entry = potentials.lookup(cfg.problem_id)
    ok = True
    for label, point in zip(labels, (
            [cfg] if cfg.sweep is None else
            [_apply_sweep_value(cfg, cfg.sweep[0], v) for v in cfg.sweep[1]])):
        path = os.path.join(args.out, f"{label}.csv")
        if not os.path.exists(path):
            print(f"missing CSV for run {label!r}: {path}", file=sys.stderr)
            return 2
        traj = load_trajectory_csv(path)
        results, _ = _run_checks_trajectory(point, traj, entry, args.seed)
        for passed, text in results:
            ok = ok and passed
            print(("PASS " if passed else "FAIL ") + f"[{label}] " + text)
    return 0 if ok else 1


def _cmd_catalog(_args):
    for entry in potentials.catalog():
        obj = entry.objective
        minim = (f"interval {entry.minimizer_interval}" if entry.minimizer_interval
                 else ", ".join(str(p.tolist()) for p in entry.minimizer_points))
        print(f"{entry.id:24s} dim={obj.dim}  minimizers: {minim}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="adigelab",
        description="Simulate damped inertial gradient dynamics and check their certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("config", help="scenario config file")
        p.add_argument("-o", "--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for randomized diagnostic grids")
        p.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")

    add_common(sub.add_parser("simulate", help="integrate a continuous system"))
    add_common(sub.add_parser("algorithm", help="run a discrete method"))
    add_common(sub.add_parser("verify", help="re-run diagnostics from written CSVs"))
    sub.add_parser("catalog", help="list built-in problems")

    args = parser.parse_args(argv)
    if args.command == "simulate":
        return _cmd_simulate(args, algorithm=False)
    if args.command == "algorithm":
        return _cmd_simulate(args, algorithm=True)
    if args.command == "verify":
        return _cmd_verify(args)
    return _cmd_catalog(args)


if __name__ == "__main__":
    sys.exit(main())
