"""Numerical laboratory for autonomous damped inertial gradient dynamics.

Continuous systems with closed-loop velocity damping (optionally with
Hessian-driven or composite velocity-plus-gradient damping), their open-loop
baselines, the matching discrete inertial proximal-gradient algorithm, and
the diagnostics that certify energy decrease, convergence rates, oscillation
regimes, finite stabilization and quasi-gradient angle conditions.
"""

from .kernels import BACKEND
from .potentials import (
    DampingPotential, Viscous, Dry, Power, QuadraticForm, Sum, Max,
    phi_value, phi_min_section, prox_phi, moreau_value, moreau_grad,
    Objective, ProblemCatalogEntry, ClosedForm,
    catalog, lookup, quad1d, illcond2d, pow_gamma, flatbottom, strongquad,
    avd_exact_family, adige_v_exact_family, validate_damping_potential,
)
from .dynamics import (
    AdigeV, AdigeVH, AdigeVGH, OpenLoop, constant_damping, vanishing_damping,
    DynamicsSpec, IntegratorConfig, Trajectory, PhaseState,
    step_adige_v, step_adige_vh, step_adige_vgh, step_open_loop,
    simulate, yosida_path, DIVERGENCE_GUARD,
)
from .algorithms import (
    ProxInertialConfig, IterateLog, CertificateReport,
    prox_inertial_run, prox_inertial_certificate, nesterov_agm, heavy_ball,
)
from .diagnostics import (
    RateFit, AngleCertificate, DiagnosticsReport,
    check_energy_monotone, fit_rate, count_band_crossings, ergodic_average,
    detect_stabilization, yosida_cauchy_check, angle_certificate,
    closed_form_residual, estimate_hessian_norm, objective_gap,
)
from . import errors

__version__ = "0.1.0"
