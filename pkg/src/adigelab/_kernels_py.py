"""Pure-Python kernels for the hot integration loops.

This module is the fallback (and the semantic reference) for the compiled
core in ``_core.pyx``.  Both expose the same flat API:

* ``power_prox_root(m, lam_r, p, s_init)`` -- scalar prox root solve
* ``run_fused(...)``                       -- fused semi-implicit stepping loop

The fused loop covers the built-in objective and damping-law kinds; anything
more general goes through the step functions in ``dynamics``.  The inner loop
deliberately works on plain Python floats and lists: per-step numpy overhead
would dominate at the step counts used here (1e5..1e6 steps per run).
"""

import math

# damping-law kinds understood by the fused loop
PHI_VISCOUS = 0  # pa = gamma
PHI_DRY = 1      # pa = r
PHI_POWER = 2    # pa = r, pb = p (p >= 1)
PHI_SUM_VD = 3   # viscous + dry, pa = gamma, pb = r

# objective kinds
OBJ_DIAG_QUAD = 0    # coeffs = diagonal, f(x) = 1/2 sum c_i x_i^2
OBJ_POW_ABS = 1      # coeffs = [c, gamma], 1-D f(x) = c |x|^gamma
OBJ_FLAT_BOTTOM = 2  # 1-D, quadratic walls outside (-1, 1), flat inside

# systems
SYS_V = 0
SYS_VH = 1
SYS_VGH = 2
SYS_OPEN = 3

# open-loop damping coefficient modes
GAM_CONST = 0   # gamma(t) = ga
GAM_OVER_T = 1  # gamma(t) = ga / t

STATUS_OK = 0
STATUS_DIVERGED = 1
STATUS_PROX_FAIL = 2

_GUARD_STRIDE = 32


def power_prox_root(m, lam_r, p, s_init=-1.0):
    """Solve ``s + lam_r * s**(p-1) = m`` for ``s`` in ``[0, m]``.

    This is the radial prox equation of the power damping law.  Bracketed
    bisection refined by safeguarded Newton, 200-iteration cap, residual
    tolerance ``1e-14 * (1 + m)``.  The map is strictly increasing in ``s``
    so the bracket is guaranteed.  Returns NaN when the cap is hit without
    meeting the tolerance (callers turn that into a numerical error).
    """
    if m <= 0.0:
        return 0.0
    tol = 1e-14 * (1.0 + m)
    lo = 0.0
    hi = m
    if 0.0 < s_init < m:
        s = s_init
    else:
        s = m
    pm1 = p - 1.0
    pm2 = p - 2.0
    for _ in range(200):
        g = s + lam_r * s**pm1 - m
        if abs(g) <= tol:
            return s
        if g > 0.0:
            hi = s
        else:
            lo = s
        s_new = -1.0
        if s > 0.0:
            gp = 1.0 + lam_r * pm1 * s**pm2
            s_new = s - g / gp
        if not (lo < s_new < hi):
            if lo > 0.0:
                s_new = 0.5 * (lo + hi)
            else:
                # for p near 1 the root can sit many decades below the
                # bracket midpoint; probe geometrically until it is caught
                s_new = hi * 1e-3
        s = s_new
    if abs(s + lam_r * s**pm1 - m) <= tol:
        return s
    return math.nan


def _radial_scale(phi_kind, pa, pb, h, nm, s_prev):
    """Prox of the radial damping law at radius ``nm`` with parameter ``h``.

    Returns ``(scale, s)`` where ``scale`` multiplies the input vector and
    ``s`` is the prox radius (NaN on root-solve failure).
    """
    if nm <= 0.0:
        return 0.0, 0.0
    if phi_kind == PHI_DRY:
        s = nm - h * pa
        if s <= 0.0:
            return 0.0, 0.0
        return s / nm, s
    if phi_kind == PHI_SUM_VD:
        s = nm - h * pb
        if s <= 0.0:
            return 0.0, 0.0
        s /= 1.0 + h * pa
        return s / nm, s
    # PHI_POWER
    r, p = pa, pb
    if p == 1.0:
        s = nm - h * r
        if s <= 0.0:
            return 0.0, 0.0
        return s / nm, s
    if p == 2.0:
        s = nm / (1.0 + h * r)
        return s / nm, s
    s = power_prox_root(nm, h * r, p, s_prev)
    if s != s:  # NaN
        return math.nan, s
    return s / nm, s


def run_fused(sys_kind, phi_kind, pa, pb, obj_kind, coeffs,
              beta, gam_mode, gam_a,
              x0, u0, t0, h, n_steps, record_every,
              out_t, out_x, out_u, guard):
    """Run the semi-implicit stepping loop for a built-in problem.

    ``x0``, ``u0`` and ``coeffs`` are 1-D float sequences; ``out_t`` is a
    preallocated 1-D array and ``out_x``/``out_u`` are ``(n_rec, d)`` arrays
    that receive the recorded samples (index 0 is the initial state, then
    every ``record_every``-th step, then the final step).

    Returns ``(n_recorded, status, event_step)`` where status 0 is success,
    1 a divergence-guard trip and 2 a prox-solve failure; ``event_step`` is
    the step index of the event (-1 if none).
    """
    d = len(x0)
    x = [float(v) for v in x0]
    u = [float(v) for v in u0]
    c = [float(v) for v in coeffs]
    g = [0.0] * d
    m = [0.0] * d

    viscous = phi_kind == PHI_VISCOUS
    pow_c = c[0] if obj_kind != OBJ_DIAG_QUAD else 0.0
    pow_g = c[1] if obj_kind == OBJ_POW_ABS else 0.0

    out_t[0] = t0
    for i in range(d):
        out_x[0, i] = x[i]
        out_u[0, i] = u[i]
    n_rec = 1
    s_prev = -1.0

    for k in range(1, n_steps + 1):
        t = t0 + (k - 1) * h

        # gradient of the objective at x
        if obj_kind == OBJ_DIAG_QUAD:
            for i in range(d):
                g[i] = c[i] * x[i]
        elif obj_kind == OBJ_POW_ABS:
            xi = x[0]
            ax = abs(xi)
            if ax == 0.0:
                g[0] = 0.0
            else:
                g[0] = pow_c * pow_g * ax ** (pow_g - 1.0) * (1.0 if xi > 0.0 else -1.0)
        else:  # OBJ_FLAT_BOTTOM
            xi = x[0]
            g[0] = xi + 1.0 if xi <= -1.0 else (xi - 1.0 if xi >= 1.0 else 0.0)

        # Hessian-driven term folds into the drive for VH and open-loop
        if (sys_kind == SYS_VH or sys_kind == SYS_OPEN) and beta != 0.0:
            if obj_kind == OBJ_DIAG_QUAD:
                for i in range(d):
                    g[i] += beta * c[i] * u[i]
            elif obj_kind == OBJ_POW_ABS:
                ax = abs(x[0])
                if pow_g == 2.0 or ax > 0.0:
                    g[0] += beta * pow_c * pow_g * (pow_g - 1.0) * ax ** (pow_g - 2.0) * u[0]
            else:
                if abs(x[0]) >= 1.0:
                    g[0] += beta * u[0]

        if sys_kind == SYS_OPEN:
            gam = gam_a if gam_mode == GAM_CONST else gam_a / t
            scale = 1.0 / (1.0 + h * gam)
            for i in range(d):
                ui = (u[i] - h * g[i]) * scale
                u[i] = ui
                x[i] += h * ui
        else:
            for i in range(d):
                m[i] = u[i] - h * g[i]
            if viscous:
                scale = 1.0 / (1.0 + h * pa)
            else:
                nm2 = 0.0
                for i in range(d):
                    nm2 += m[i] * m[i]
                scale, s_prev = _radial_scale(phi_kind, pa, pb, h, math.sqrt(nm2), s_prev)
                if scale != scale:  # NaN: root solve failed
                    return n_rec, STATUS_PROX_FAIL, k
            if sys_kind == SYS_VGH:
                for i in range(d):
                    ui = m[i] * scale
                    u[i] = ui
                    x[i] += h * (ui - beta * g[i])
            else:
                for i in range(d):
                    ui = m[i] * scale
                    u[i] = ui
                    x[i] += h * ui

        record = k % record_every == 0 or k == n_steps
        if record or k % _GUARD_STRIDE == 0:
            ok = True
            for i in range(d):
                if not (-guard <= x[i] <= guard) or not (-guard <= u[i] <= guard):
                    ok = False
                    break
            if not ok:
                return n_rec, STATUS_DIVERGED, k
        if record:
            out_t[n_rec] = t0 + k * h
            for i in range(d):
                out_x[n_rec, i] = x[i]
                out_u[n_rec, i] = u[i]
            n_rec += 1

    return n_rec, STATUS_OK, -1
