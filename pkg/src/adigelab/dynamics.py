"""Integrators for the damped inertial gradient systems.

Four continuous systems are covered through one phase-space form (x, u):

* velocity-damped:              0 in x'' + dphi(x') + grad f(x)
* with Hessian damping:         0 in x'' + dphi(x') + beta Hess f(x) x' + grad f(x)
* velocity+gradient damping:    0 in x'' + dphi(x' + beta grad f(x)) + beta Hess f(x) x' + grad f(x)
* open-loop coefficient:        x'' + gamma(t) x' + beta Hess f(x) x' + grad f(x) = 0

The reference scheme is the semi-implicit prox step (implicit in the damping
law, explicit in the objective): it coincides with the discrete inertial
proximal-gradient algorithm and resolves nonsmooth laws like dry friction
exactly.  A classical RK4 on the Moreau-smoothed field is available to
reproduce the smoothing-parameter consistency path and to cross-check
discretization error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import CapabilityError, DivergenceError, DomainError, NumericalError
from .potentials import DampingPotential, Objective, prox_phi

__all__ = [
    "AdigeV", "AdigeVH", "AdigeVGH", "OpenLoop",
    "constant_damping", "vanishing_damping",
    "DynamicsSpec", "IntegratorConfig", "Trajectory", "PhaseState",
    "step_adige_v", "step_adige_vh", "step_adige_vgh", "step_open_loop",
    "simulate", "yosida_path", "DIVERGENCE_GUARD",
]

DIVERGENCE_GUARD = 1e12
_MAX_STEPS = 1e8


def constant_damping(g):
    """Open-loop coefficient gamma(t) = g (heavy-ball friction)."""
    if g < 0:
        raise DomainError("damping coefficient must be nonnegative")

    def fn(t):
        return g

    fn.gamma_spec = (kernels.GAM_CONST, float(g))
    return fn


def vanishing_damping(alpha):
    """Open-loop coefficient gamma(t) = alpha / t (asymptotically vanishing)."""
    if alpha < 0:
        raise DomainError("alpha must be nonnegative")

    def fn(t):
        return alpha / t

    fn.gamma_spec = (kernels.GAM_OVER_T, float(alpha))
    return fn


class AdigeV:
    """Closed-loop velocity damping through the law ``phi``."""

    def __init__(self, phi: DampingPotential):
        self.phi = phi

    def __repr__(self):
        return f"AdigeV({self.phi!r})"


class AdigeVH:
    """Velocity damping plus Hessian-driven damping with weight ``beta``."""

    def __init__(self, phi: DampingPotential, beta=0.0):
        if beta < 0:
            raise DomainError("beta must be nonnegative")
        self.phi = phi
        self.beta = float(beta)

    def __repr__(self):
        return f"AdigeVH({self.phi!r}, beta={self.beta})"


class AdigeVGH:
    """Damping acting on the composite u = x' + beta grad f(x).

    In phase space the system is first order without any Hessian: the state
    companion is u itself, and x' = u - beta grad f(x).
    """

    def __init__(self, phi: DampingPotential, beta=0.0):
        if beta < 0:
            raise DomainError("beta must be nonnegative")
        self.phi = phi
        self.beta = float(beta)

    def __repr__(self):
        return f"AdigeVGH({self.phi!r}, beta={self.beta})"


class OpenLoop:
    """Time-dependent viscous coefficient gamma(t), optional Hessian damping.

    ``gamma`` may be a number (constant coefficient) or a callable of t.
    """

    def __init__(self, gamma, beta=0.0):
        if beta < 0:
            raise DomainError("beta must be nonnegative")
        if isinstance(gamma, (int, float)):
            gamma = constant_damping(float(gamma))
        self.gamma_fn = gamma
        self.gamma_spec = getattr(gamma, "gamma_spec", None)
        self.beta = float(beta)

    def __repr__(self):
        return f"OpenLoop(beta={self.beta})"


@dataclass
class PhaseState:
    """Phase point: position and its companion (velocity, or the composite
    velocity-plus-gradient for the VGH system)."""

    x: np.ndarray
    u: np.ndarray


@dataclass
class DynamicsSpec:
    """Which system to integrate, on which objective, from where."""

    system: object
    objective: Objective
    x0: np.ndarray
    v0: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        self.x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        self.v0 = np.atleast_1d(np.asarray(self.v0, dtype=float))
        if len(self.x0) != self.objective.dim or len(self.v0) != self.objective.dim:
            raise DomainError("x0/v0 dimension mismatch with objective")


@dataclass
class IntegratorConfig:
    """Step size, horizon, scheme and recording stride."""

    h: float
    T: float
    scheme: str = "prox_semi_implicit"
    yosida_lambda: Optional[float] = None
    record_every: int = 1

    def __post_init__(self):
        if self.h <= 0:
            raise DomainError("h must be positive")
        if self.record_every < 1:
            raise DomainError("record_every must be a positive integer")
        if self.scheme not in ("prox_semi_implicit", "yosida_rk4"):
            raise DomainError(f"unknown scheme {self.scheme!r}")
        if self.scheme == "yosida_rk4" and not (self.yosida_lambda and self.yosida_lambda > 0):
            raise DomainError("yosida_rk4 needs a positive smoothing parameter")


@dataclass
class Trajectory:
    """Sampled path with cached energy and gradient-norm channels.

    ``energy`` is f(x) - f_ref + ||w||^2 / 2 where w is the system's damped
    companion (the velocity, or u for the VGH system); ``u`` is populated for
    VGH trajectories only and satisfies u = v + beta grad f(x) exactly.
    """

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    energy: np.ndarray
    grad_norm: np.ndarray
    f_ref: float
    u: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.t)

    @property
    def dim(self):
        return self.x.shape[1]


# ---------------------------------------------------------------------------
# single steps of the semi-implicit prox scheme


def step_adige_v(phi, objective, state: PhaseState, h) -> PhaseState:
    """One semi-implicit step of the velocity-damped system.

    u+ = prox_{h phi}(u - h grad f(x)),  x+ = x + h u+.  Nonsmooth laws
    (dry friction) are handled exactly through the prox.
    """
    if h <= 0:
        raise DomainError("h must be positive")
    g = objective.grad(state.x)
    u_new = prox_phi(phi, h, state.u - h * g)
    return PhaseState(state.x + h * u_new, u_new)


def step_adige_vh(phi, objective, state: PhaseState, beta, h) -> PhaseState:
    """One step with the Hessian term treated explicitly at (x, u)."""
    if h <= 0:
        raise DomainError("h must be positive")
    if beta != 0.0 and objective.hvp is None:
        raise CapabilityError("Hessian damping needs a Hessian-vector product")
    g = objective.grad(state.x)
    if beta != 0.0:
        g = g + beta * objective.hvp(state.x, state.u)
    u_new = prox_phi(phi, h, state.u - h * g)
    return PhaseState(state.x + h * u_new, u_new)


def step_adige_vgh(phi, objective, state: PhaseState, beta, h) -> PhaseState:
    """One step of the first-order composite-damped form.

    Here state.u is the composite u = x' + beta grad f(x):
    u+ = prox_{h phi}(u - h grad f(x)),  x+ = x + h (u+ - beta grad f(x)).
    """
    if h <= 0:
        raise DomainError("h must be positive")
    g = objective.grad(state.x)
    u_new = prox_phi(phi, h, state.u - h * g)
    return PhaseState(state.x + h * (u_new - beta * g), u_new)


def step_open_loop(gamma_fn, objective, state: PhaseState, beta, t, h) -> PhaseState:
    """One semi-implicit step with coefficient gamma(t) frozen at the step start.

    u+ = (u - h [grad f(x) + beta Hess f(x) u]) / (1 + h gamma(t)),
    x+ = x + h u+.
    """
    if h <= 0:
        raise DomainError("h must be positive")
    gam = gamma_fn(t) if callable(gamma_fn) else float(gamma_fn)
    if gam < 0:
        raise DomainError("gamma(t) must be nonnegative")
    if beta != 0.0 and objective.hvp is None:
        raise CapabilityError("Hessian damping needs a Hessian-vector product")
    g = objective.grad(state.x)
    if beta != 0.0:
        g = g + beta * objective.hvp(state.x, state.u)
    u_new = (state.u - h * g) / (1.0 + h * gam)
    return PhaseState(state.x + h * u_new, u_new)


# ---------------------------------------------------------------------------
# trajectory-level integration


def _plan_grid(spec, config):
    span = config.T - spec.t0
    if span <= 0:
        raise DomainError("horizon T must exceed t0")
    n_steps = int(math.ceil(span / config.h - 1e-9))
    if n_steps > _MAX_STEPS:
        raise DomainError("(T - t0)/h exceeds the step budget")
    return max(n_steps, 1)


def _initial_companion(spec):
    system = spec.system
    if isinstance(system, AdigeVGH):
        return spec.v0 + system.beta * spec.objective.grad(spec.x0)
    return spec.v0.copy()


def _assemble(spec, t, xs, us):
    """Build the Trajectory (energy/grad-norm channels) from recorded samples."""
    objective = spec.objective
    system = spec.system
    n = len(t)
    f_vals = np.empty(n)
    grad_norm = np.empty(n)
    is_vgh = isinstance(system, AdigeVGH)
    if is_vgh:
        v = np.empty_like(xs)
    for k in range(n):
        f_vals[k] = objective.eval(xs[k])
        g = objective.grad(xs[k])
        grad_norm[k] = np.linalg.norm(g)
        if is_vgh:
            v[k] = us[k] - system.beta * g
    if not is_vgh:
        v = us
    f_ref = objective.f_min if objective.f_min is not None else float(f_vals.min())
    energy = f_vals - f_ref + 0.5 * np.einsum("ij,ij->i", us, us)
    return Trajectory(t=t, x=xs, v=v, energy=energy, grad_norm=grad_norm,
                      f_ref=f_ref, u=us.copy() if is_vgh else None)


def _fused_args(spec):
    """Kernel argument packing when the fast path applies, else None."""
    system, objective = spec.system, spec.objective
    if objective.kernel_spec is None:
        return None
    obj_kind, coeffs = objective.kernel_spec
    if isinstance(system, AdigeV):
        phi_spec = system.phi.kernel_spec
        if phi_spec is None:
            return None
        return (kernels.SYS_V, *phi_spec[:3], obj_kind, coeffs, 0.0, 0, 0.0)
    if isinstance(system, AdigeVH):
        phi_spec = system.phi.kernel_spec
        if phi_spec is None:
            return None
        if system.beta != 0.0 and objective.hvp is None:
            return None  # general path raises the capability error
        return (kernels.SYS_VH, *phi_spec[:3], obj_kind, coeffs, system.beta, 0, 0.0)
    if isinstance(system, AdigeVGH):
        phi_spec = system.phi.kernel_spec
        if phi_spec is None:
            return None
        return (kernels.SYS_VGH, *phi_spec[:3], obj_kind, coeffs, system.beta, 0, 0.0)
    if isinstance(system, OpenLoop):
        if system.gamma_spec is None:
            return None
        if system.beta != 0.0 and objective.hvp is None:
            return None  # general path raises the capability error
        gmode, ga = system.gamma_spec
        return (kernels.SYS_OPEN, kernels.PHI_VISCOUS, 0.0, 0.0, obj_kind, coeffs,
                system.beta, gmode, ga)
    return None


def simulate(spec: DynamicsSpec, config: IntegratorConfig) -> Trajectory:
    """Integrate the configured system and return the sampled trajectory.

    The prox semi-implicit scheme uses the step operations above (routed
    through the compiled kernels when the problem is built in); the
    yosida_rk4 scheme replaces the damping subdifferential by the gradient
    of the Moreau envelope and integrates the smooth field with classical
    RK4.  Raises :class:`DivergenceError` (with the partial trajectory
    attached) when the state leaves the guard ball.
    """
    n_steps = _plan_grid(spec, config)
    if isinstance(spec.system, OpenLoop):
        try:
            g0 = spec.system.gamma_fn(spec.t0)
        except ZeroDivisionError:
            g0 = math.inf
        if not (math.isfinite(g0) and g0 >= 0):
            raise DomainError(
                f"open-loop coefficient must be finite and nonnegative from t0 "
                f"on, got gamma({spec.t0:g}) = {g0!r}")
    if config.scheme == "yosida_rk4":
        return _simulate_rk4(spec, config, n_steps)

    fused = _fused_args(spec)
    if fused is not None and spec.objective.dim <= 8:
        return _simulate_fused(spec, config, n_steps, fused)
    return _simulate_general(spec, config, n_steps)


def _simulate_fused(spec, config, n_steps, fused):
    r = config.record_every
    d = spec.objective.dim
    n_rec_max = n_steps // r + 2
    out_t = np.empty(n_rec_max)
    out_x = np.empty((n_rec_max, d))
    out_u = np.empty((n_rec_max, d))
    u0 = _initial_companion(spec)
    sys_kind, phi_kind, pa, pb, obj_kind, coeffs, beta, gmode, ga = fused
    n_rec, status, event = kernels.run_fused(
        sys_kind, phi_kind, pa, pb, obj_kind,
        np.ascontiguousarray(coeffs, dtype=float),
        beta, gmode, ga,
        np.ascontiguousarray(spec.x0, dtype=float),
        np.ascontiguousarray(u0, dtype=float),
        spec.t0, config.h, n_steps, r,
        out_t, out_x, out_u, DIVERGENCE_GUARD)
    traj = _assemble(spec, out_t[:n_rec].copy(), out_x[:n_rec].copy(),
                     out_u[:n_rec].copy())
    _raise_for_status(status, event, spec, config, traj)
    return traj


def _raise_for_status(status, event, spec, config, traj):
    if status == kernels.STATUS_DIVERGED:
        t_blow = spec.t0 + event * config.h
        raise DivergenceError(
            f"state norm exceeded {DIVERGENCE_GUARD:g} at t = {t_blow:g}",
            time=t_blow, partial=traj)
    if status == kernels.STATUS_PROX_FAIL:
        raise NumericalError(
            f"prox inner solve failed at step {event}", residual=None)


def _simulate_general(spec, config, n_steps):
    system, objective = spec.system, spec.objective
    h, r = config.h, config.record_every
    state = PhaseState(spec.x0.copy(), _initial_companion(spec))

    if isinstance(system, AdigeV):
        def advance(state, t):
            return step_adige_v(system.phi, objective, state, h)
    elif isinstance(system, AdigeVH):
        def advance(state, t):
            return step_adige_vh(system.phi, objective, state, system.beta, h)
    elif isinstance(system, AdigeVGH):
        def advance(state, t):
            return step_adige_vgh(system.phi, objective, state, system.beta, h)
    elif isinstance(system, OpenLoop):
        def advance(state, t):
            return step_open_loop(system.gamma_fn, objective, state, system.beta, t, h)
    else:
        raise DomainError(f"unknown system {system!r}")

    return _drive(spec, config, n_steps, state, advance)


def _drive(spec, config, n_steps, state, advance):
    h, r = config.h, config.record_every
    ts = [spec.t0]
    xs = [state.x.copy()]
    us = [state.u.copy()]
    for k in range(1, n_steps + 1):
        t = spec.t0 + (k - 1) * h
        state = advance(state, t)
        record = k % r == 0 or k == n_steps
        if record or k % 32 == 0:
            if not _state_ok(state):
                traj = _assemble(spec, np.array(ts), np.array(xs), np.array(us))
                _raise_for_status(kernels.STATUS_DIVERGED, k, spec, config, traj)
        if record:
            ts.append(spec.t0 + k * h)
            xs.append(state.x.copy())
            us.append(state.u.copy())
    return _assemble(spec, np.array(ts), np.array(xs), np.array(us))


def _state_ok(state):
    return (np.all(np.isfinite(state.x)) and np.all(np.isfinite(state.u))
            and np.abs(state.x).max() <= DIVERGENCE_GUARD
            and np.abs(state.u).max() <= DIVERGENCE_GUARD)


def _smooth_field(spec, lam):
    """Right-hand side of the Moreau-smoothed (or open-loop) phase field."""
    system, objective = spec.system, spec.objective

    if isinstance(system, OpenLoop):
        if system.beta != 0.0 and objective.hvp is None:
            raise CapabilityError("Hessian damping needs a Hessian-vector product")

        def field(t, x, u):
            g = objective.grad(x)
            if system.beta != 0.0:
                g = g + system.beta * objective.hvp(x, u)
            return u, -system.gamma_fn(t) * u - g
        return field

    phi = system.phi
    if isinstance(system, AdigeV):
        def field(t, x, u):
            return u, -phi.moreau_grad(lam, u) - objective.grad(x)
        return field
    if isinstance(system, AdigeVH):
        if system.beta != 0.0 and objective.hvp is None:
            raise CapabilityError("Hessian damping needs a Hessian-vector product")

        def field(t, x, u):
            g = objective.grad(x) + (system.beta * objective.hvp(x, u)
                                     if system.beta != 0.0 else 0.0)
            return u, -phi.moreau_grad(lam, u) - g
        return field
    if isinstance(system, AdigeVGH):
        def field(t, x, u):
            g = objective.grad(x)
            return u - system.beta * g, -phi.moreau_grad(lam, u) - g
        return field
    raise DomainError(f"unknown system {system!r}")


def _simulate_rk4(spec, config, n_steps):
    field = _smooth_field(spec, config.yosida_lambda)
    h = config.h

    def advance(state, t):
        x, u = state.x, state.u
        kx1, ku1 = field(t, x, u)
        kx2, ku2 = field(t + 0.5 * h, x + 0.5 * h * kx1, u + 0.5 * h * ku1)
        kx3, ku3 = field(t + 0.5 * h, x + 0.5 * h * kx2, u + 0.5 * h * ku2)
        kx4, ku4 = field(t + h, x + h * kx3, u + h * ku3)
        return PhaseState(
            x + (h / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4),
            u + (h / 6.0) * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4))

    state = PhaseState(spec.x0.copy(), _initial_companion(spec))
    return _drive(spec, config, n_steps, state, advance)


def yosida_path(spec: DynamicsSpec, config: IntegratorConfig, lambdas):
    """Integrate the Moreau-smoothed field for each smoothing parameter.

    ``lambdas`` must be strictly decreasing and positive; all runs share the
    grid of ``config`` so their sup-norm gaps are directly comparable.
    Returns a list of (lambda, trajectory) pairs.
    """
    lambdas = list(lambdas)
    if any(l <= 0 for l in lambdas):
        raise DomainError("smoothing parameters must be positive")
    if any(b >= a for a, b in zip(lambdas, lambdas[1:])):
        raise DomainError("smoothing parameters must be strictly decreasing")
    out = []
    for lam in lambdas:
        cfg = IntegratorConfig(h=config.h, T=config.T, scheme="yosida_rk4",
                               yosida_lambda=lam, record_every=config.record_every)
        out.append((lam, simulate(spec, cfg)))
    return out
