"""Objectives and damping laws with their convex-analytic operations.

A damping law here is a nonnegative convex continuous function ``phi`` with
``phi(0) = 0 = min phi`` whose minimal subgradient section is bounded on
bounded sets.  It generates the closed-loop friction force through its
subdifferential evaluated at the velocity.  Every kind used by the dynamics
is radially symmetric except :class:`QuadraticForm`; radial kinds reduce all
operations (value, minimal section, prox, Moreau envelope) to scalar profile
computations along the ray of the input.

The module also houses the catalog of test objectives and the closed-form
trajectory families used as residual oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import ConditionError, DomainError, NotFoundError, NumericalError

__all__ = [
    "DampingPotential", "Viscous", "Dry", "Power", "QuadraticForm", "Sum", "Max",
    "phi_value", "phi_min_section", "prox_phi", "moreau_value", "moreau_grad",
    "Objective", "ProblemCatalogEntry", "ClosedForm",
    "catalog", "lookup", "quad1d", "illcond2d", "pow_gamma", "flatbottom",
    "strongquad", "avd_exact_family", "adige_v_exact_family",
    "validate_damping_potential",
]


def _as_vector(u, name="u"):
    arr = np.asarray(u, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be a vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _check_lambda(lam):
    if not (isinstance(lam, (int, float)) and math.isfinite(lam) and lam > 0):
        raise DomainError(f"prox parameter must be positive and finite, got {lam!r}")
    return float(lam)


class DampingPotential:
    """Base class for damping laws.

    Subclasses implement ``value``, ``min_section`` and ``prox``; the Moreau
    envelope operations are derived from the prox.
    """

    #: packed kind tag for the fused kernels, or None when unsupported there
    kernel_spec = None

    def value(self, u):
        raise NotImplementedError

    def min_section(self, u):
        """Least-norm element of the subdifferential at ``u``."""
        raise NotImplementedError

    def prox(self, lam, x):
        """argmin over xi of ``lam * phi(xi) + 0.5 * ||x - xi||^2``."""
        raise NotImplementedError

    def moreau_value(self, lam, u):
        """Moreau envelope ``phi_lam(u)``; satisfies ``0 <= phi_lam <= phi``."""
        u = _as_vector(u)
        lam = _check_lambda(lam)
        p = self.prox(lam, u)
        d = u - p
        return float(self.value(p) + d @ d / (2.0 * lam))

    def moreau_grad(self, lam, u):
        """Gradient of the Moreau envelope, ``(u - prox(lam, u)) / lam``."""
        u = _as_vector(u)
        lam = _check_lambda(lam)
        return (u - self.prox(lam, u)) / lam

    def quadratic_gamma(self):
        """Constant ``g`` with ``<s, u> >= g * ||u||^2`` for all subgradients s.

        This is the constant entering the discrete energy certificate.  None
        when no such constant is certified by construction.
        """
        return None


class _RadialPotential(DampingPotential):
    """Damping law of the form ``phi(u) = profile(||u||)``.

    Subclasses provide the scalar profile machinery and get the vector
    operations for free.
    """

    def _rvalue(self, s):
        raise NotImplementedError

    def _rslope(self, s):
        """Profile derivative at radius ``s > 0``."""
        raise NotImplementedError

    def _rslope_interval(self, s):
        """Subdifferential interval of the profile at radius ``s > 0``."""
        d = self._rslope(s)
        return d, d

    def _rorigin_radius(self):
        """Radius of the profile subdifferential at 0."""
        return 0.0

    def _rprox(self, lam, m):
        """Scalar prox radius: argmin over ``s >= 0`` of
        ``lam * profile(s) + 0.5 * (s - m)**2``."""
        raise NotImplementedError

    def value(self, u):
        u = _as_vector(u)
        return float(self._rvalue(float(np.linalg.norm(u))))

    def min_section(self, u):
        u = _as_vector(u)
        s = float(np.linalg.norm(u))
        if s == 0.0:
            return np.zeros_like(u)
        lo, _ = self._rslope_interval(s)
        return (lo / s) * u

    def prox(self, lam, x):
        x = _as_vector(x)
        lam = _check_lambda(lam)
        m = float(np.linalg.norm(x))
        if m == 0.0:
            return np.zeros_like(x)
        s = self._rprox(lam, m)
        return (s / m) * x


class Viscous(_RadialPotential):
    """Viscous damping ``phi(u) = (gamma/2) ||u||^2``."""

    def __init__(self, gamma):
        if not (gamma > 0 and math.isfinite(gamma)):
            raise DomainError("gamma must be positive")
        self.gamma = float(gamma)
        self.kernel_spec = (kernels.PHI_VISCOUS, self.gamma, 0.0)

    def _rvalue(self, s):
        return 0.5 * self.gamma * s * s

    def _rslope(self, s):
        return self.gamma * s

    def _rprox(self, lam, m):
        return m / (1.0 + lam * self.gamma)

    def prox(self, lam, x):
        x = _as_vector(x)
        lam = _check_lambda(lam)
        return x / (1.0 + lam * self.gamma)

    def quadratic_gamma(self):
        return self.gamma

    def __repr__(self):
        return f"Viscous(gamma={self.gamma})"


class Dry(_RadialPotential):
    """Dry (Coulomb) friction ``phi(u) = r ||u||``.

    The subdifferential at the origin is the closed ball of radius ``r``;
    its least-norm element is 0, so the friction force can balance any
    gradient of norm at most ``r`` at rest.
    """

    def __init__(self, r):
        if not (r > 0 and math.isfinite(r)):
            raise DomainError("r must be positive")
        self.r = float(r)
        self.kernel_spec = (kernels.PHI_DRY, self.r, 0.0)

    def _rvalue(self, s):
        return self.r * s

    def _rslope(self, s):
        return self.r

    def _rorigin_radius(self):
        return self.r

    def _rprox(self, lam, m):
        return max(m - lam * self.r, 0.0)

    def __repr__(self):
        return f"Dry(r={self.r})"


class Power(_RadialPotential):
    """Power damping ``phi(u) = (r/p) ||u||^p`` with ``p >= 1``.

    ``p = 2`` is viscous-like, ``p = 1`` is dry friction, ``p > 2`` gives a
    vanishing effective viscosity (weak damping) and ``1 < p < 2`` a blowing
    up one (strong damping).  For ``1 < p < 2`` the gradient is not Lipschitz
    at the origin; the minimal section there is defined as 0 (the exact
    least-norm subgradient) and the dynamics only ever touch the law through
    its prox, which is well defined for every ``p >= 1``.
    """

    def __init__(self, r, p):
        if not (r > 0 and math.isfinite(r)):
            raise DomainError("r must be positive")
        if not (p >= 1 and math.isfinite(p)):
            raise DomainError("p must be >= 1")
        self.r = float(r)
        self.p = float(p)
        self.kernel_spec = (kernels.PHI_POWER, self.r, self.p)

    def _rvalue(self, s):
        return (self.r / self.p) * s**self.p

    def _rslope(self, s):
        return self.r * s ** (self.p - 1.0)

    def _rorigin_radius(self):
        return self.r if self.p == 1.0 else 0.0

    def _rprox(self, lam, m):
        r, p = self.r, self.p
        if p == 1.0:
            return max(m - lam * r, 0.0)
        if p == 2.0:
            return m / (1.0 + lam * r)
        s = kernels.power_prox_root(m, lam * r, p)
        if math.isnan(s):
            s, res = _bisect_power_root(m, lam * r, p)
            if res > 1e-14 * (1.0 + m):
                raise NumericalError(
                    f"power prox root solve did not converge (residual {res:.3e})",
                    residual=res)
        return s

    def quadratic_gamma(self):
        return self.r if self.p == 2.0 else None

    def __repr__(self):
        return f"Power(r={self.r}, p={self.p})"


def _bisect_power_root(m, lam_r, p, iters=400):
    """Plain bisection fallback; returns (root, residual)."""
    lo, hi = 0.0, m
    for _ in range(iters):
        s = 0.5 * (lo + hi)
        if s + lam_r * s ** (p - 1.0) > m:
            hi = s
        else:
            lo = s
    s = 0.5 * (lo + hi)
    return s, abs(s + lam_r * s ** (p - 1.0) - m)


class QuadraticForm(DampingPotential):
    """Anisotropic viscous damping ``phi(u) = 0.5 <A u, u>``.

    ``A`` must be symmetric positive definite.
    """

    def __init__(self, A):
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DomainError("A must be a square matrix")
        if not np.allclose(A, A.T, atol=1e-12):
            raise DomainError("A must be symmetric")
        eigs = np.linalg.eigvalsh(A)
        if eigs.min() <= 0:
            raise DomainError("A must be positive definite")
        self.A = A
        self._eig_min = float(eigs.min())
        self._eig_max = float(eigs.max())

    def value(self, u):
        u = _as_vector(u)
        return float(0.5 * u @ self.A @ u)

    def min_section(self, u):
        u = _as_vector(u)
        return self.A @ u

    def prox(self, lam, x):
        x = _as_vector(x)
        lam = _check_lambda(lam)
        return np.linalg.solve(np.eye(len(x)) + lam * self.A, x)

    def quadratic_gamma(self):
        return self._eig_min

    def __repr__(self):
        return f"QuadraticForm(dim={self.A.shape[0]})"


def _require_radial(parts, kind):
    for p in parts:
        if not isinstance(p, _RadialPotential):
            raise DomainError(
                f"{kind} supports radially symmetric parts only; combining "
                "a quadratic form with radial kinds is rejected rather than "
                "approximated")


class Sum(_RadialPotential):
    """Sum of radial damping laws, e.g. viscous plus dry friction."""

    def __init__(self, *parts):
        if len(parts) == 1 and isinstance(parts[0], (list, tuple)):
            parts = tuple(parts[0])
        if not parts:
            raise DomainError("Sum needs at least one part")
        _require_radial(parts, "Sum")
        self.parts = tuple(parts)
        self.kernel_spec = self._pack_kernel_spec()

    def _pack_kernel_spec(self):
        gamma = 0.0
        r = 0.0
        for p in self.parts:
            if isinstance(p, Viscous):
                gamma += p.gamma
            elif isinstance(p, Dry):
                r += p.r
            else:
                return None
        return (kernels.PHI_SUM_VD, gamma, r)

    def _rvalue(self, s):
        return sum(p._rvalue(s) for p in self.parts)

    def _rslope(self, s):
        return sum(p._rslope(s) for p in self.parts)

    def _rorigin_radius(self):
        return sum(p._rorigin_radius() for p in self.parts)

    def _rprox(self, lam, m):
        if m <= lam * self._rorigin_radius():
            return 0.0
        return _solve_radial_root(lambda s: s + lam * self._rslope(s), m)

    def quadratic_gamma(self):
        # contributions add; parts without a certified quadratic constant
        # still satisfy <s, u> >= 0 and contribute nothing
        return sum(p.quadratic_gamma() or 0.0 for p in self.parts)

    def __repr__(self):
        return f"Sum({', '.join(map(repr, self.parts))})"


class Max(_RadialPotential):
    """Pointwise maximum of two radial damping laws."""

    def __init__(self, first, second):
        _require_radial((first, second), "Max")
        self.first = first
        self.second = second

    def _rvalue(self, s):
        return max(self.first._rvalue(s), self.second._rvalue(s))

    def _active(self, s, band=0.0):
        v1 = self.first._rvalue(s)
        v2 = self.second._rvalue(s)
        if abs(v1 - v2) <= band:
            return (self.first, self.second)
        return (self.first,) if v1 > v2 else (self.second,)

    def _rslope(self, s):
        # strict ties only: this drives the prox bisection, which must see a
        # sharp jump at a branch crossing to converge onto it
        return max(p._rslope(s) for p in self._active(s))

    def _rslope_interval(self, s):
        # reported subdifferential: tolerate near-ties, since a prox solve
        # may land within an ulp of a branch-crossing radius
        v = max(abs(self.first._rvalue(s)), abs(self.second._rvalue(s)))
        parts = self._active(s, band=1e-12 * (1.0 + v))
        intervals = [p._rslope_interval(s) for p in parts]
        return min(i[0] for i in intervals), max(i[1] for i in intervals)

    def _rorigin_radius(self):
        return max(self.first._rorigin_radius(), self.second._rorigin_radius())

    def _rprox(self, lam, m):
        if m <= lam * self._rorigin_radius():
            return 0.0
        # bisection on the nondecreasing right derivative of the scalar
        # prox objective; ties between branches jump but stay monotone
        lo, hi = 0.0, m
        for _ in range(200):
            s = 0.5 * (lo + hi)
            if s + lam * self._rslope(s) - m >= 0.0:
                hi = s
            else:
                lo = s
        s = 0.5 * (lo + hi)
        dlo, dhi = self._rslope_interval(s)
        res = max(0.0, (m - s) - lam * dhi, lam * dlo - (m - s))
        if res > 1e-12 * (1.0 + m):
            raise NumericalError(
                f"max-prox inner solve did not converge (residual {res:.3e})",
                residual=res)
        return s

    def __repr__(self):
        return f"Max({self.first!r}, {self.second!r})"


def _solve_radial_root(F, m, iters=200):
    """Solve the monotone scalar equation ``F(s) = m`` on (0, m]."""
    lo, hi = 0.0, m
    s = m
    tol = 1e-14 * (1.0 + m)
    for _ in range(iters):
        g = F(s) - m
        if abs(g) <= tol:
            return s
        if g > 0.0:
            hi = s
        else:
            lo = s
        s = 0.5 * (lo + hi)
    g = abs(F(s) - m)
    if g <= 10 * tol:
        return s
    raise NumericalError(
        f"radial prox inner solve did not converge (residual {g:.3e})",
        residual=g)


# ---------------------------------------------------------------------------
# free-function forms of the damping-law operations


def phi_value(phi, u):
    """Value of the damping law at ``u`` (nonnegative, zero at the origin)."""
    return phi.value(u)


def phi_min_section(phi, u):
    """Least-norm subgradient of the damping law at ``u``."""
    return phi.min_section(u)


def prox_phi(phi, lam, x):
    """Proximal map of ``lam * phi`` at ``x``."""
    return phi.prox(lam, x)


def moreau_value(phi, lam, u):
    """Moreau envelope of the damping law, index ``lam``, at ``u``."""
    return phi.moreau_value(lam, u)


def moreau_grad(phi, lam, u):
    """Gradient of the Moreau envelope; its norm never exceeds the norm of
    the minimal subgradient section at the same point."""
    return phi.moreau_grad(lam, u)


def validate_damping_potential(phi, dim=2, radius=3.0, n_samples=64, rng=None):
    """Cheap sampling validator for the damping-law axioms.

    Checks phi(0) = 0, nonnegativity, midpoint convexity on random pairs and
    finiteness of the minimal section on a grid of radii.  Raises
    :class:`DomainError` on the first violation.
    """
    rng = np.random.default_rng(rng)
    zero = np.zeros(dim)
    if abs(phi.value(zero)) > 1e-15:
        raise DomainError("phi(0) must be 0")
    for _ in range(n_samples):
        u = rng.normal(size=dim) * radius
        w = rng.normal(size=dim) * radius
        th = rng.uniform()
        vu, vw = phi.value(u), phi.value(w)
        if vu < 0 or vw < 0:
            raise DomainError("phi must be nonnegative")
        if phi.value(th * u + (1 - th) * w) > th * vu + (1 - th) * vw + 1e-12:
            raise DomainError("phi must be convex")
    for s in np.linspace(0.0, radius, 16):
        u = np.full(dim, s / math.sqrt(dim))
        if not np.all(np.isfinite(phi.min_section(u))):
            raise DomainError("minimal section must be bounded on bounded sets")


# ---------------------------------------------------------------------------
# objectives


@dataclass
class Objective:
    """Function to minimize, with whatever structure is known about it.

    ``eval``/``grad`` are mandatory callables on 1-D numpy arrays; ``hvp`` is
    the Hessian-vector product when second-order information exists.  ``mu``
    is a strong-convexity modulus, ``lipschitz_on_ball`` maps a radius R to a
    Lipschitz constant of the gradient on the ball of radius R, and ``f_min``
    is the known infimum (used as the energy reference).
    """

    dim: int
    eval: Callable
    grad: Callable
    hvp: Optional[Callable] = None
    mu: Optional[float] = None
    lipschitz_on_ball: Optional[Callable] = None
    f_min: Optional[float] = None
    kernel_spec: Optional[tuple] = None

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("objective dimension must be positive")


@dataclass
class ClosedForm:
    """Exact trajectory ``x(t) = t**(-theta)`` of a power-law family.

    ``system`` tags the governing equation ("avd" for the open-loop
    vanishing-damping equation, "adige_v_power" for the autonomous power
    damping law) and ``params`` holds its coefficients.  Valid for t > 0.
    """

    system: str
    params: dict
    theta: float

    def x(self, t):
        return np.atleast_1d(np.asarray(t, dtype=float) ** (-self.theta))

    def v(self, t):
        return np.atleast_1d(-self.theta * np.asarray(t, dtype=float) ** (-self.theta - 1.0))

    def a(self, t):
        th = self.theta
        return np.atleast_1d(th * (th + 1.0) * np.asarray(t, dtype=float) ** (-th - 2.0))


@dataclass
class ProblemCatalogEntry:
    """Catalog problem: objective plus its known minimizers and, for the
    power families, the exact solution used as a residual oracle."""

    id: str
    objective: Objective
    minimizer_points: tuple = ()
    minimizer_interval: Optional[tuple] = None
    closed_form: Optional[ClosedForm] = None
    params: dict = field(default_factory=dict)


def strongquad(mu=1.0, dim=1):
    """f(x) = (mu/2) ||x||^2."""
    if not mu > 0:
        raise DomainError("mu must be positive")
    mu = float(mu)
    obj = Objective(
        dim=dim,
        eval=lambda x: 0.5 * mu * float(x @ x),
        grad=lambda x: mu * x,
        hvp=lambda x, v: mu * v,
        mu=mu,
        lipschitz_on_ball=lambda R: mu,
        f_min=0.0,
        kernel_spec=(kernels.OBJ_DIAG_QUAD, np.full(dim, mu)),
    )
    ident = f"strongquad:mu={mu:g}" + (f",dim={dim}" if dim != 1 else "")
    return ProblemCatalogEntry(
        id=ident, objective=obj,
        minimizer_points=(np.zeros(dim),), params={"mu": mu})


def quad1d():
    """f(x) = x^2 / 2 on the line."""
    entry = strongquad(1.0, 1)
    entry.id = "quad1d"
    return entry


def illcond2d():
    """Ill-conditioned plane quadratic f(x) = (x1^2 + 1000 x2^2) / 2."""
    c = np.array([1.0, 1000.0])
    obj = Objective(
        dim=2,
        eval=lambda x: 0.5 * float(c @ (x * x)),
        grad=lambda x: c * x,
        hvp=lambda x, v: c * v,
        mu=1.0,
        lipschitz_on_ball=lambda R: 1000.0,
        f_min=0.0,
        kernel_spec=(kernels.OBJ_DIAG_QUAD, c),
    )
    return ProblemCatalogEntry(
        id="illcond2d", objective=obj,
        minimizer_points=(np.zeros(2),), params={"coeffs": (1.0, 1000.0)})


def pow_gamma(c=0.5, gamma_exp=4.0):
    """f(x) = c |x|^gamma_exp on the line, gamma_exp >= 2."""
    if not c > 0:
        raise DomainError("c must be positive")
    if not gamma_exp >= 2:
        raise DomainError("gamma_exp must be >= 2 for a locally Lipschitz gradient")
    c = float(c)
    g = float(gamma_exp)

    def _eval(x):
        return c * abs(float(x[0])) ** g

    def _grad(x):
        xv = float(x[0])
        if xv == 0.0:
            return np.zeros(1)
        return np.array([c * g * abs(xv) ** (g - 1.0) * math.copysign(1.0, xv)])

    def _hvp(x, v):
        xv = abs(float(x[0]))
        if xv == 0.0 and g > 2.0:
            return np.zeros(1)
        return c * g * (g - 1.0) * xv ** (g - 2.0) * v

    obj = Objective(
        dim=1, eval=_eval, grad=_grad, hvp=_hvp,
        mu=2.0 * c if g == 2.0 else None,
        lipschitz_on_ball=lambda R: c * g * (g - 1.0) * R ** (g - 2.0),
        f_min=0.0,
        kernel_spec=(kernels.OBJ_POW_ABS, np.array([c, g])),
    )
    return ProblemCatalogEntry(
        id=f"powgamma:c={c:g},gamma={g:g}", objective=obj,
        minimizer_points=(np.zeros(1),), params={"c": c, "gamma": g})


def flatbottom():
    """Flat-bottomed convex bowl: quadratic walls outside [-1, 1], zero inside.

    C1 but not C2; the Hessian-vector product uses the outer value 1 at the
    two kink points (a measure-zero choice the integrators never see).
    """

    def _eval(x):
        xv = float(x[0])
        if xv <= -1.0:
            return 0.5 * (xv + 1.0) ** 2
        if xv >= 1.0:
            return 0.5 * (xv - 1.0) ** 2
        return 0.0

    def _grad(x):
        xv = float(x[0])
        if xv <= -1.0:
            return np.array([xv + 1.0])
        if xv >= 1.0:
            return np.array([xv - 1.0])
        return np.zeros(1)

    def _hvp(x, v):
        return v if abs(float(x[0])) >= 1.0 else np.zeros_like(v)

    obj = Objective(
        dim=1, eval=_eval, grad=_grad, hvp=_hvp,
        mu=None, lipschitz_on_ball=lambda R: 1.0, f_min=0.0,
        kernel_spec=(kernels.OBJ_FLAT_BOTTOM, np.zeros(1)),
    )
    return ProblemCatalogEntry(
        id="flatbottom", objective=obj,
        minimizer_interval=(-1.0, 1.0), params={})


def catalog():
    """The built-in problems with default parameters."""
    return [quad1d(), illcond2d(), pow_gamma(), flatbottom(), strongquad()]


def _parse_kv(spec):
    out = {}
    for item in spec.split(","):
        if not item:
            continue
        k, _, v = item.partition("=")
        out[k.strip()] = float(v)
    return out


def lookup(ident):
    """Resolve a problem id, possibly parameterized like
    ``strongquad:mu=2,dim=2`` or ``powgamma:c=0.5,gamma=4``."""
    name, _, args = ident.partition(":")
    name = name.strip()
    try:
        if name == "quad1d":
            return quad1d()
        if name == "illcond2d":
            return illcond2d()
        if name == "flatbottom":
            return flatbottom()
        if name == "strongquad":
            kv = _parse_kv(args) if args else {}
            return strongquad(kv.get("mu", 1.0), int(kv.get("dim", 1)))
        if name == "powgamma":
            kv = _parse_kv(args) if args else {}
            return pow_gamma(kv.get("c", 0.5), kv.get("gamma", 4.0))
    except ValueError as exc:
        raise NotFoundError(f"bad parameters in problem id {ident!r}: {exc}") from exc
    raise NotFoundError(f"unknown problem id {ident!r}")


# ---------------------------------------------------------------------------
# closed-form trajectory families (completely damped power solutions)


def avd_exact_family(alpha, gamma_exp):
    """Power objective whose open-loop vanishing-damping trajectory is exact.

    For f(x) = c |x|^gamma with damping coefficient alpha/t, the curve
    x(t) = t**(-theta) solves the equation iff theta = 2/(gamma-2) and
    c*gamma = theta*(alpha - theta - 1), which needs gamma > 2 and
    alpha > gamma/(gamma-2).
    """
    if not gamma_exp > 2:
        raise ConditionError("requires gamma > 2", condition="gamma > 2")
    theta = 2.0 / (gamma_exp - 2.0)
    if not alpha > gamma_exp / (gamma_exp - 2.0):
        raise ConditionError(
            "requires alpha > gamma/(gamma-2)",
            condition="alpha > gamma/(gamma-2)")
    c = (theta / gamma_exp) * (alpha - (theta + 1.0))
    entry = pow_gamma(c, gamma_exp)
    entry.closed_form = ClosedForm(
        system="avd", params={"alpha": float(alpha)}, theta=theta)
    entry.params.update({"alpha": float(alpha), "theta": theta})
    return entry


def adige_v_exact_family(gamma_exp, r):
    """Power objective whose autonomous power-damped trajectory is exact.

    For f(x) = c |x|^gamma and damping law with parameters (r, p), the curve
    x(t) = t**(-theta) solves the equation iff theta = 2/(gamma-2),
    p = (3*gamma-2)/gamma and c*gamma = theta**(p-1)*r - theta*(theta+1),
    which needs gamma > 2 (hence 2 < p < 3) and theta > 0, c > 0, the latter
    being r > (theta+1)/theta**(p-2).
    """
    if not gamma_exp > 2:
        raise ConditionError("requires gamma > 2", condition="gamma > 2")
    theta = 2.0 / (gamma_exp - 2.0)
    p = (3.0 * gamma_exp - 2.0) / gamma_exp
    r_min = (theta + 1.0) / theta ** (p - 2.0)
    if not r > r_min:
        raise ConditionError(
            f"requires r > (theta+1)/theta**(p-2) = {r_min:g} for c > 0",
            condition="r > (theta+1)/theta**(p-2)")
    c = (theta / gamma_exp) * (theta ** (p - 2.0) * r - (theta + 1.0))
    entry = pow_gamma(c, gamma_exp)
    entry.closed_form = ClosedForm(
        system="adige_v_power", params={"r": float(r), "p": p}, theta=theta)
    entry.params.update({"r": float(r), "p": p, "theta": theta})
    return entry
