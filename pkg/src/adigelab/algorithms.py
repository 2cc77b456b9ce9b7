"""Discrete-time optimization methods.

The central method is the inertial proximal-gradient recursion

    x_{n+2} = x_{n+1} + h prox_{h phi}((x_{n+1} - x_n)/h - h grad f(x_{n+1}))

which is, step for step, the semi-implicit integrator of the velocity-damped
system; running it and integrating are the same computation.  Its energy
certificate counts violations of the per-iteration decrease inequality

    W_{n+1} - W_n + h (gamma - L h / 2) ||u_{n+1}||^2 <= 0,

valid whenever <s, u> >= gamma ||u||^2 for the damping subgradients and the
objective gradient is L-Lipschitz on the iterate ball.  Nesterov's
accelerated gradient method and the heavy-ball iteration are included as
baselines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DivergenceError, DomainError
from .dynamics import DIVERGENCE_GUARD, PhaseState, step_adige_v
from .potentials import DampingPotential, Objective

__all__ = [
    "ProxInertialConfig", "IterateLog", "CertificateReport",
    "prox_inertial_run", "prox_inertial_certificate",
    "nesterov_agm", "heavy_ball",
]


@dataclass
class ProxInertialConfig:
    """Inertial proximal-gradient run description.

    ``x1`` defaults to ``x0`` (zero initial velocity).  ``stop_tol`` bounds
    the discrete velocity ||x_{n+1} - x_n|| / h; the run stops once two
    consecutive velocities are within it.  A single tiny velocity is not
    enough: dry friction passes through exact zeros at turning points, and
    a cold start (x1 = x0) seeds a zero velocity.
    """

    phi: DampingPotential
    objective: Objective
    h: float
    x0: np.ndarray
    x1: Optional[np.ndarray] = None
    max_iter: int = 100_000
    stop_tol: float = 1e-10

    def __post_init__(self):
        if self.h <= 0:
            raise DomainError("h must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be positive")
        if self.stop_tol < 0:
            raise DomainError("stop_tol must be nonnegative")
        self.x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        self.x1 = (self.x0.copy() if self.x1 is None
                   else np.atleast_1d(np.asarray(self.x1, dtype=float)))


@dataclass
class IterateLog:
    """Iterates with the discrete velocities and energies.

    ``u[n] = (x[n+1] - x[n]) / h`` and, for the prox-inertial method,
    ``W[n] = ||u[n]||^2 / 2 + f(x[n+1])``; the gradient baselines store the
    objective gap f(x[k]) - f_ref in ``W`` instead (one entry per iterate).
    """

    x: np.ndarray
    u: np.ndarray
    W: np.ndarray
    step_norms: np.ndarray
    h: float


@dataclass
class CertificateReport:
    violations: int
    worst_slack: float
    sum_sq_steps: float
    #: whether h < 2 gamma / L held, i.e. the inequality forces decrease
    #: and the velocity square sum is summable
    step_admissible: bool = True


def _guard_ok(x):
    return np.all(np.isfinite(x)) and np.abs(x).max() <= DIVERGENCE_GUARD


def prox_inertial_run(config: ProxInertialConfig) -> IterateLog:
    """Run the inertial proximal-gradient recursion.

    Stops at ``max_iter`` or once two consecutive velocities satisfy
    ``||u_n|| <= stop_tol``.  Raises :class:`DivergenceError` with the
    partial log attached if an iterate leaves the guard ball.
    """
    f = config.objective.eval
    h = config.h
    xs = [config.x0.copy(), config.x1.copy()]
    state = PhaseState(config.x1.copy(), (config.x1 - config.x0) / h)
    us = [state.u.copy()]
    Ws = [0.5 * float(state.u @ state.u) + f(state.x)]
    prev_small = float(np.linalg.norm(state.u)) <= config.stop_tol

    for n in range(config.max_iter):
        state = step_adige_v(config.phi, config.objective, state, h)
        xs.append(state.x.copy())
        us.append(state.u.copy())
        Ws.append(0.5 * float(state.u @ state.u) + f(state.x))
        if not _guard_ok(state.x) or not _guard_ok(state.u):
            log = _pack_log(xs, us, Ws, h)
            raise DivergenceError(
                f"iterate norm exceeded {DIVERGENCE_GUARD:g} at iteration {n + 1}",
                time=n + 1, partial=log)
        small = float(np.linalg.norm(state.u)) <= config.stop_tol
        if small and prev_small:
            break
        prev_small = small
    return _pack_log(xs, us, Ws, h)


def _pack_log(xs, us, Ws, h):
    us = np.array(us)
    return IterateLog(x=np.array(xs), u=us, W=np.array(Ws),
                      step_norms=h * np.linalg.norm(us, axis=1), h=h)


def prox_inertial_certificate(log: IterateLog, gamma_phi, L,
                              slack=1e-10) -> CertificateReport:
    """Check the per-iteration energy decrease inequality on a run log.

    Counts indices where W_{n+1} - W_n + h (gamma_phi - L h / 2) ||u_{n+1}||^2
    exceeds ``slack * (1 + |W_n|)`` and reports the worst left-hand side along
    with the velocity square sum (finite for certified step sizes h < 2
    gamma_phi / L, where the inequality forces summability).
    """
    h = log.h
    coeff = h * (gamma_phi - 0.5 * L * h)
    W = log.W
    u_sq = np.einsum("ij,ij->i", log.u, log.u)
    lhs = W[1:] - W[:-1] + coeff * u_sq[1:]
    tol = slack * (1.0 + np.abs(W[:-1]))
    violations = int(np.sum(lhs > tol))
    worst = float(lhs.max()) if len(lhs) else 0.0
    return CertificateReport(violations=violations, worst_slack=worst,
                             sum_sq_steps=float(u_sq.sum()),
                             step_admissible=bool(h < 2.0 * gamma_phi / L))


def nesterov_agm(objective: Objective, s, alpha, x0, max_iter) -> IterateLog:
    """Accelerated gradient iteration with vanishing extrapolation.

    y_k = x_k + (1 - alpha/k)(x_k - x_{k-1}),  x_{k+1} = y_k - s grad f(y_k),
    for k = 1, 2, ...; needs s at most the inverse gradient Lipschitz
    constant on the iterate ball.  ``W`` stores the objective gap.
    """
    if s <= 0:
        raise DomainError("step size must be positive")
    if alpha < 0:
        raise DomainError("alpha must be nonnegative")
    x_prev = np.atleast_1d(np.asarray(x0, dtype=float))
    x_cur = x_prev.copy()
    xs = [x_cur.copy()]
    for k in range(1, max_iter + 1):
        y = x_cur + (1.0 - alpha / k) * (x_cur - x_prev)
        x_next = y - s * objective.grad(y)
        if not _guard_ok(x_next):
            raise DivergenceError(
                f"iterate norm exceeded {DIVERGENCE_GUARD:g} at iteration {k}",
                time=k, partial=_pack_gap_log(xs, objective, s))
        xs.append(x_next.copy())
        x_prev, x_cur = x_cur, x_next
    return _pack_gap_log(xs, objective, s)


def heavy_ball(objective: Objective, s, momentum, x0, max_iter) -> IterateLog:
    """Gradient iteration with a fixed momentum factor in [0, 1).

    x_{k+1} = x_k + momentum (x_k - x_{k-1}) - s grad f(x_k); momentum 0 is
    plain gradient descent.  ``W`` stores the objective gap.
    """
    if s <= 0:
        raise DomainError("step size must be positive")
    if not 0 <= momentum < 1:
        raise DomainError("momentum must lie in [0, 1)")
    x_prev = np.atleast_1d(np.asarray(x0, dtype=float))
    x_cur = x_prev.copy()
    xs = [x_cur.copy()]
    for k in range(1, max_iter + 1):
        x_next = x_cur + momentum * (x_cur - x_prev) - s * objective.grad(x_cur)
        if not _guard_ok(x_next):
            raise DivergenceError(
                f"iterate norm exceeded {DIVERGENCE_GUARD:g} at iteration {k}",
                time=k, partial=_pack_gap_log(xs, objective, s))
        xs.append(x_next.copy())
        x_prev, x_cur = x_cur, x_next
    return _pack_gap_log(xs, objective, s)


def _pack_gap_log(xs, objective, s):
    xs = np.array(xs)
    f_vals = np.array([objective.eval(x) for x in xs])
    f_ref = objective.f_min if objective.f_min is not None else float(f_vals.min())
    us = (xs[1:] - xs[:-1]) / s
    return IterateLog(x=xs, u=us, W=f_vals - f_ref,
                      step_norms=np.linalg.norm(xs[1:] - xs[:-1], axis=1), h=s)
