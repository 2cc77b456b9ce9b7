# cython: language_level=3
"""Compiled kernels for the hot integration loops.

Mirrors the API and arithmetic of ``_kernels_py`` (which is the reference
implementation); see that module for the contract.  Selected at import time
by ``kernels`` when the extension has been built.
"""

from libc.math cimport fabs, sqrt, pow, NAN, isnan

cdef enum:
    _PHI_VISCOUS = 0
    _PHI_DRY = 1
    _PHI_POWER = 2
    _PHI_SUM_VD = 3
    _OBJ_DIAG_QUAD = 0
    _OBJ_POW_ABS = 1
    _OBJ_FLAT_BOTTOM = 2
    _SYS_V = 0
    _SYS_VH = 1
    _SYS_VGH = 2
    _SYS_OPEN = 3
    _GAM_CONST = 0
    _GAM_OVER_T = 1
    _STATUS_OK = 0
    _STATUS_DIVERGED = 1
    _STATUS_PROX_FAIL = 2
    _GUARD_STRIDE = 32

PHI_VISCOUS = _PHI_VISCOUS
PHI_DRY = _PHI_DRY
PHI_POWER = _PHI_POWER
PHI_SUM_VD = _PHI_SUM_VD

OBJ_DIAG_QUAD = _OBJ_DIAG_QUAD
OBJ_POW_ABS = _OBJ_POW_ABS
OBJ_FLAT_BOTTOM = _OBJ_FLAT_BOTTOM

SYS_V = _SYS_V
SYS_VH = _SYS_VH
SYS_VGH = _SYS_VGH
SYS_OPEN = _SYS_OPEN

GAM_CONST = _GAM_CONST
GAM_OVER_T = _GAM_OVER_T

STATUS_OK = _STATUS_OK
STATUS_DIVERGED = _STATUS_DIVERGED
STATUS_PROX_FAIL = _STATUS_PROX_FAIL


cdef double _power_root(double m, double lam_r, double p, double s_init) noexcept nogil:
    cdef double tol, lo, hi, s, g, gp, s_new, pm1, pm2
    cdef int it
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
    for it in range(200):
        g = s + lam_r * pow(s, pm1) - m
        if fabs(g) <= tol:
            return s
        if g > 0.0:
            hi = s
        else:
            lo = s
        s_new = -1.0
        if s > 0.0:
            gp = 1.0 + lam_r * pm1 * pow(s, pm2)
            s_new = s - g / gp
        if not (lo < s_new < hi):
            if lo > 0.0:
                s_new = 0.5 * (lo + hi)
            else:
                # for p near 1 the root can sit many decades below the
                # bracket midpoint; probe geometrically until it is caught
                s_new = hi * 1e-3
        s = s_new
    if fabs(s + lam_r * pow(s, pm1) - m) <= tol:
        return s
    return NAN


def power_prox_root(double m, double lam_r, double p, double s_init=-1.0):
    """Scalar prox root solve; see ``_kernels_py.power_prox_root``."""
    return _power_root(m, lam_r, p, s_init)


def run_fused(int sys_kind, int phi_kind, double pa, double pb,
              int obj_kind, double[::1] coeffs,
              double beta, int gam_mode, double gam_a,
              double[::1] x0, double[::1] u0,
              double t0, double h, long n_steps, long record_every,
              double[::1] out_t, double[:, ::1] out_x, double[:, ::1] out_u,
              double guard):
    """Fused stepping loop; see ``_kernels_py.run_fused`` for the contract."""
    cdef Py_ssize_t d = x0.shape[0]
    cdef double[8] xb
    cdef double[8] ub
    cdef double[8] gb
    cdef double[8] mb
    cdef double[8] cb
    cdef double *x
    cdef double *u
    cdef double *g
    cdef double *m
    cdef double *c
    cdef Py_ssize_t i
    cdef long k, n_rec, event
    cdef int status
    cdef double pow_c, pow_g, t, xi, ax, gam, scale, s_prev, nm2, ui, s
    cdef bint viscous, record, ok

    # stack buffers cover every built-in problem (d <= 8); larger states
    # take the general path in dynamics before reaching this point
    if d > 8:
        raise ValueError("fused kernel supports dim <= 8")
    x = &xb[0]; u = &ub[0]; g = &gb[0]; m = &mb[0]; c = &cb[0]
    for i in range(d):
        x[i] = x0[i]
        u[i] = u0[i]
    for i in range(coeffs.shape[0]):
        c[i] = coeffs[i]

    viscous = phi_kind == _PHI_VISCOUS
    pow_c = c[0] if obj_kind != _OBJ_DIAG_QUAD else 0.0
    pow_g = c[1] if obj_kind == _OBJ_POW_ABS else 0.0

    out_t[0] = t0
    for i in range(d):
        out_x[0, i] = x[i]
        out_u[0, i] = u[i]
    n_rec = 1
    s_prev = -1.0
    status = _STATUS_OK
    event = -1

    for k in range(1, n_steps + 1):
        t = t0 + (k - 1) * h

        if obj_kind == _OBJ_DIAG_QUAD:
            for i in range(d):
                g[i] = c[i] * x[i]
        elif obj_kind == _OBJ_POW_ABS:
            xi = x[0]
            ax = fabs(xi)
            if ax == 0.0:
                g[0] = 0.0
            else:
                g[0] = pow_c * pow_g * pow(ax, pow_g - 1.0) * (1.0 if xi > 0.0 else -1.0)
        else:
            xi = x[0]
            g[0] = xi + 1.0 if xi <= -1.0 else (xi - 1.0 if xi >= 1.0 else 0.0)

        if (sys_kind == _SYS_VH or sys_kind == _SYS_OPEN) and beta != 0.0:
            if obj_kind == _OBJ_DIAG_QUAD:
                for i in range(d):
                    g[i] += beta * c[i] * u[i]
            elif obj_kind == _OBJ_POW_ABS:
                ax = fabs(x[0])
                if pow_g == 2.0 or ax > 0.0:
                    g[0] += beta * pow_c * pow_g * (pow_g - 1.0) * pow(ax, pow_g - 2.0) * u[0]
            else:
                if fabs(x[0]) >= 1.0:
                    g[0] += beta * u[0]

        if sys_kind == _SYS_OPEN:
            gam = gam_a if gam_mode == _GAM_CONST else gam_a / t
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
                scale = _vector_scale(phi_kind, pa, pb, h, sqrt(nm2), &s_prev)
                if isnan(scale):
                    status = _STATUS_PROX_FAIL
                    event = k
                    break
            if sys_kind == _SYS_VGH:
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
                status = _STATUS_DIVERGED
                event = k
                break
        if record:
            out_t[n_rec] = t0 + k * h
            for i in range(d):
                out_x[n_rec, i] = x[i]
                out_u[n_rec, i] = u[i]
            n_rec += 1

    return n_rec, status, event


cdef double _vector_scale(int phi_kind, double pa, double pb, double h,
                          double nm, double *s_prev) noexcept nogil:
    cdef double s
    if nm <= 0.0:
        return 0.0
    if phi_kind == _PHI_DRY:
        s = nm - h * pa
        if s <= 0.0:
            return 0.0
        return s / nm
    if phi_kind == _PHI_SUM_VD:
        s = nm - h * pb
        if s <= 0.0:
            return 0.0
        s /= 1.0 + h * pa
        return s / nm
    if pb == 1.0:
        s = nm - h * pa
        if s <= 0.0:
            return 0.0
        return s / nm
    if pb == 2.0:
        s = nm / (1.0 + h * pa)
        return s / nm
    s = _power_root(nm, h * pa, pb, s_prev[0])
    if isnan(s):
        return NAN
    s_prev[0] = s
    return s / nm
