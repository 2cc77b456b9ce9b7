"""Machine-checkable verdicts over trajectories and iterate logs.

Asymptotic claims are operationalized as finite checks: Lyapunov decrease is
counted per recorded step, rates are least-squares fits on log-transformed
samples, limit statements become strict comparisons between two horizons
plus an absolute threshold at the larger one.  The quasi-gradient structure
of the phase-space field is certified through the angle condition between
the field and the gradient of the coupled energy

    E(x, u) = ||u||^2 / 2 + f(x) + lam <grad f(x), u>

on an explicit phase-space box, with the analytic admissible bound computed
from the damping and curvature constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import Trajectory
from .errors import (CapabilityError, CertificateRefusedError, ConditionError,
                     InputError, InsufficientDataError)
from .potentials import ProblemCatalogEntry

__all__ = [
    "RateFit", "AngleCertificate", "DiagnosticsReport",
    "check_energy_monotone", "fit_rate", "count_band_crossings",
    "ergodic_average", "detect_stabilization", "yosida_cauchy_check",
    "angle_certificate", "closed_form_residual", "estimate_hessian_norm",
    "objective_gap",
]


@dataclass
class RateFit:
    """Least-squares rate fit on a positive sample series.

    ``model`` is "exponential" (y ~ c exp(-rate t), fitted on (t, log y)) or
    "power" (y ~ c t^-rate, fitted on (log t, log y)); ``r2`` is the
    coefficient of determination of that linear fit.
    """

    model: str
    c: float
    rate: float
    window: tuple
    r2: float
    n_samples: int


@dataclass
class AngleCertificate:
    """Empirical angle-condition check against the analytic admissible bound.

    ``alpha_bound`` is the proven lower bound for the cosine between the
    phase field and the coupled-energy gradient on the box; the certificate
    passes iff the sampled minimum cosine stays above it (within 1e-9).
    ``grad_domination_bound`` is the analytic b with ||grad E|| <= b ||F||
    (available for beta = 0).
    """

    lam: float
    beta: float
    alpha_bound: float
    empirical_min_ratio: float
    domain: tuple
    samples: int
    passed: bool
    gamma_phi: float
    delta: float
    M: float
    m_estimated: bool
    grad_domination_bound: Optional[float] = None
    empirical_max_grad_ratio: Optional[float] = None


@dataclass
class DiagnosticsReport:
    """Container assembled by the experiment runner."""

    energy_violations: Optional[tuple] = None
    rate: Optional[RateFit] = None
    crossings: Optional[dict] = None
    ergodic_mean_tail: Optional[np.ndarray] = None
    stabilization_time: Optional[float] = None
    terminal_grad_norm: Optional[float] = None


def objective_gap(traj: Trajectory):
    """Series f(x(t)) - f_ref recovered from the cached energy channel."""
    w = traj.u if traj.u is not None else traj.v
    return traj.energy - 0.5 * np.einsum("ij,ij->i", w, w)


def check_energy_monotone(traj: Trajectory, per_step_slack=1e-9):
    """Count recorded steps where the energy increases beyond the slack.

    Returns ``(violations, worst_slack)`` with ``worst_slack`` the largest
    per-step energy increase observed (negative when strictly decreasing).
    """
    diffs = np.diff(traj.energy)
    if len(diffs) == 0:
        return 0, 0.0
    return int(np.sum(diffs > per_step_slack)), float(diffs.max())


def fit_rate(t, y, model, window):
    """Fit an exponential or power decay model on the windowed samples.

    Only strictly positive samples inside ``window = (t_lo, t_hi)`` enter
    the fit; fewer than 10 of them raises
    :class:`~adigelab.errors.InsufficientDataError`.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    t_lo, t_hi = window
    mask = (t >= t_lo) & (t <= t_hi) & (y > 0.0)
    if model == "power":
        mask &= t > 0.0
    if mask.sum() < 10:
        raise InsufficientDataError(
            f"rate fit needs at least 10 positive samples in window, got {mask.sum()}")
    tt, yy = t[mask], np.log(y[mask])
    if model == "exponential":
        a = tt
    elif model == "power":
        a = np.log(tt)
    else:
        raise InputError(f"unknown rate model {model!r}")
    slope, intercept = np.polyfit(a, yy, 1)
    pred = slope * a + intercept
    ss_res = float(np.sum((yy - pred) ** 2))
    ss_tot = float(np.sum((yy - yy.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else -math.inf)
    return RateFit(model=model, c=float(np.exp(intercept)), rate=float(-slope),
                   window=(t_lo, t_hi), r2=r2, n_samples=int(mask.sum()))


def _strict_crossings(series, level, band=1e-12):
    d = series - level
    s = np.sign(d[np.abs(d) > band])
    if len(s) < 2:
        return 0
    return int(np.sum(s[1:] != s[:-1]))


def count_band_crossings(traj: Trajectory, a, b, component=0):
    """Count strict crossings of the levels ``a`` and ``b`` by one coordinate.

    Samples within a 1e-12 dead-band of a level are ignored so that grid
    points landing exactly on it are not double counted.
    """
    series = traj.x[:, component]
    return _strict_crossings(series, a), _strict_crossings(series, b)


def ergodic_average(traj: Trajectory):
    """Trapezoidal running time-average of the position.

    Requires the trajectory to start at t = 0.  Returns ``(t, averages,
    tail_value)`` where ``averages[k]`` is the mean of x over [0, t_k]
    (``averages[0] = x_0``) and ``tail_value`` the final average.
    """
    if abs(traj.t[0]) > 1e-15:
        raise InputError("ergodic average expects a trajectory started at t = 0")
    t = traj.t
    x = traj.x
    dt = np.diff(t)[:, None]
    chunks = 0.5 * (x[1:] + x[:-1]) * dt
    integral = np.vstack([np.zeros((1, x.shape[1])), np.cumsum(chunks, axis=0)])
    averages = np.empty_like(x)
    averages[0] = x[0]
    averages[1:] = integral[1:] / t[1:, None]
    return t, averages, averages[-1].copy()


def detect_stabilization(traj: Trajectory, tol):
    """Earliest recorded time after which the composite velocity stays <= tol.

    Needs the ``u`` channel (composite-damped trajectories).  Returns None
    when the tail never settles below ``tol``; by construction the result is
    monotone in ``tol`` (a larger tolerance never gives a later time).
    """
    if traj.u is None:
        raise InputError("stabilization detection needs the u channel")
    norms = np.linalg.norm(traj.u, axis=1)
    above = np.nonzero(norms > tol)[0]
    if len(above) == 0:
        return float(traj.t[0])
    last = above[-1]
    if last == len(norms) - 1:
        return None
    return float(traj.t[last + 1])


def yosida_cauchy_check(path):
    """Sup-norm phase gaps between consecutive smoothing-parameter runs.

    ``path`` is a list of (lambda, trajectory) pairs on one shared grid;
    returns one gap per consecutive pair (empty for fewer than two runs).
    The gaps shrinking with the smoothing parameter is the finite-horizon
    face of the Cauchy property of the smoothed solutions.
    """
    gaps = []
    for (_, a), (_, b) in zip(path, path[1:]):
        if len(a.t) != len(b.t) or not np.allclose(a.t, b.t, rtol=0, atol=1e-12):
            raise InputError("smoothing-path trajectories must share one grid")
        d2 = np.sum((a.x - b.x) ** 2, axis=1) + np.sum((a.v - b.v) ** 2, axis=1)
        gaps.append(float(np.sqrt(d2.max())))
    return gaps


def estimate_hessian_norm(objective, R, n_points=20, n_iter=50, seed=None):
    """Estimate sup of the Hessian operator norm on the ball of radius R.

    Runs ``n_iter`` power-iteration steps of the Hessian-vector product at
    ``n_points`` sampled positions and takes the largest Rayleigh quotient.
    """
    if objective.hvp is None:
        raise CapabilityError("Hessian norm estimation needs a Hessian-vector product")
    rng = np.random.default_rng(seed)
    d = objective.dim
    best = 0.0
    for _ in range(n_points):
        x = rng.normal(size=d)
        nx = np.linalg.norm(x)
        if nx > 0:
            x *= rng.uniform() ** (1.0 / d) * R / nx
        v = rng.normal(size=d)
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(n_iter):
            w = objective.hvp(x, v)
            nw = np.linalg.norm(w)
            if nw == 0.0:
                lam = 0.0
                break
            lam = nw
            v = w / nw
        best = max(best, lam)
    return best


def angle_certificate(objective, phi, lam, beta, R, eps, grid_n,
                      gamma_phi, delta, M=None, seed=None) -> AngleCertificate:
    """Certify the angle condition of the phase field on a box.

    The caller supplies the local damping constants ``gamma_phi`` and
    ``delta`` (phi(u) >= gamma_phi ||u||^2 and ||grad phi(u)|| <= delta
    ||u|| on the u-box); ``M`` bounds the Hessian norm on the x-box and is
    estimated by power iteration when omitted.  Refuses (naming the violated
    inequality) when the coupling parameter is not admissible:

        gamma_phi > lam * (M + delta^2/2)              for beta = 0,
        gamma_phi > lam * (M + delta^2/2 + beta^2 M^2) for beta > 0.

    The analytic bound is alpha0 / (C1 C2) with
    alpha0 = min(gamma_phi - lam*(...), lam/2)  (lam/4 when beta > 0),
    C1 = sqrt(2) (1 + lam max(1, M)) and C2 = sqrt(2) (1 + delta) for
    beta = 0, C2 = sqrt(4 + 3 delta^2 + 3 beta^2 M^2) otherwise.  The
    empirical minimum of <grad E, F> / (||grad E|| ||F||) over the lattice
    must reach it; for beta = 0 the certificate also carries the gradient
    domination constant b = sqrt(C1^2 / C3) with ||grad E|| <= b ||F||.
    """
    if lam < 0:
        raise InputError("coupling parameter must be nonnegative")
    if objective.hvp is None:
        raise CapabilityError("angle certificate needs a Hessian-vector product")
    m_estimated = M is None
    if m_estimated:
        M = estimate_hessian_norm(objective, R, seed=seed)

    extra = beta * beta * M * M if beta > 0 else 0.0
    threshold = M + 0.5 * delta * delta + extra
    margin = gamma_phi - lam * threshold
    if lam > 0 and margin <= 0:
        cond = ("gamma_phi > lambda*(M + delta^2/2 + beta^2*M^2)" if beta > 0
                else "gamma_phi > lambda*(M + delta^2/2)")
        raise CertificateRefusedError(
            f"coupling parameter {lam:g} is not admissible: requires {cond}",
            condition=cond)

    alpha0 = min(margin, lam / (4.0 if beta > 0 else 2.0))
    C1 = math.sqrt(2.0) * (1.0 + lam * max(1.0, M))
    if beta > 0:
        C2 = math.sqrt(4.0 + 3.0 * delta * delta + 3.0 * extra)
    else:
        C2 = math.sqrt(2.0) * (1.0 + delta)
    alpha_bound = alpha0 / (C1 * C2)

    b = None
    if beta == 0:
        if delta > 0:
            sigma = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 / (delta * delta)))
            C3 = 1.0 - 1.0 / sigma
        else:
            C3 = 1.0
        b = math.sqrt(C1 * C1 / C3)

    d = objective.dim
    axes_x = [np.linspace(-R, R, grid_n)] * d
    axes_u = [np.linspace(-eps, eps, grid_n)] * d
    grids = np.meshgrid(*axes_x, *axes_u, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    xs, us = pts[:, :d], pts[:, d:]
    keep = (np.linalg.norm(xs, axis=1) <= R + 1e-12) & \
           (np.linalg.norm(us, axis=1) <= eps + 1e-12)
    xs, us = xs[keep], us[keep]

    min_ratio = math.inf
    max_grad_ratio = 0.0
    samples = 0
    for x, u in zip(xs, us):
        g = objective.grad(x)
        hu = objective.hvp(x, u)
        grad_e = np.concatenate([g + lam * hu, u + lam * g])
        f2 = phi.min_section(u) + g
        if beta > 0:
            f2 = f2 + beta * hu
        field = np.concatenate([-u, f2])
        ne = np.linalg.norm(grad_e)
        nf = np.linalg.norm(field)
        prod = ne * nf
        if prod > 1e-14:
            samples += 1
            min_ratio = min(min_ratio, float(grad_e @ field) / prod)
            if nf > 1e-14:
                max_grad_ratio = max(max_grad_ratio, ne / nf)
    if samples == 0:
        raise InsufficientDataError("angle certificate grid produced no usable points")

    return AngleCertificate(
        lam=lam, beta=beta, alpha_bound=alpha_bound,
        empirical_min_ratio=min_ratio, domain=(R, eps), samples=samples,
        passed=min_ratio >= alpha_bound - 1e-9,
        gamma_phi=gamma_phi, delta=delta, M=M, m_estimated=m_estimated,
        grad_domination_bound=b, empirical_max_grad_ratio=max_grad_ratio)


def closed_form_residual(entry: ProblemCatalogEntry, system, params, times):
    """Max analytic residual of the entry's exact curve in a governing equation.

    ``system`` is "avd" (open-loop coefficient alpha/t, params ``alpha``) or
    "adige_v_power" (power damping law, params ``r`` and ``p``); the curve,
    its velocity and acceleration are evaluated analytically, never from an
    integrator.  Family conditions are re-derived from the supplied
    parameters and violations are refused with the condition named.
    """
    cf = entry.closed_form
    if cf is None:
        raise InputError(f"entry {entry.id!r} carries no closed form")
    if system != cf.system:
        raise InputError(
            f"closed form of {entry.id!r} solves {cf.system!r}, not {system!r}")
    gamma_exp = entry.params.get("gamma")
    if gamma_exp is None or not gamma_exp > 2:
        raise ConditionError("requires gamma > 2", condition="gamma > 2")
    theta = 2.0 / (gamma_exp - 2.0)

    times = np.asarray(times, dtype=float)
    if np.any(times <= 0):
        raise InputError("closed forms are valid for t > 0 only")

    if system == "avd":
        alpha = params["alpha"]
        if not alpha > gamma_exp / (gamma_exp - 2.0):
            raise ConditionError(
                "requires alpha > gamma/(gamma-2)",
                condition="alpha > gamma/(gamma-2)")

        def damping(t, v):
            return (alpha / t) * v
    elif system == "adige_v_power":
        r, p = params["r"], params["p"]
        r_min = (theta + 1.0) / theta ** (p - 2.0)
        if not r > r_min:
            raise ConditionError(
                f"requires r > (theta+1)/theta**(p-2) = {r_min:g} for theta > 0, c > 0",
                condition="r > (theta+1)/theta**(p-2)")

        def damping(t, v):
            return r * abs(v) ** (p - 2.0) * v
    else:
        raise InputError(f"unknown governing system {system!r}")

    worst = 0.0
    for t in times:
        x = cf.x(t)
        v = float(cf.v(t)[0])
        a = float(cf.a(t)[0])
        res = a + damping(t, v) + float(entry.objective.grad(x)[0])
        worst = max(worst, abs(res))
    return worst
