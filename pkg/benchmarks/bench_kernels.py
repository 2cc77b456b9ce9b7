"""Benchmark the compiled kernel core against the pure-Python fallback.

Run with ``python benchmarks/bench_kernels.py``.  Workloads mirror the hot
acceptance runs: long semi-implicit integrations of the built-in systems,
plus the scalar prox root solve on its own.
"""

import time

import numpy as np

from adigelab import _kernels_py as kpy
from adigelab import kernels

try:
    from adigelab import _core as kc
except ImportError:
    kc = None

WORKLOADS = [
    ("power-damped flat bottom, 400k steps", dict(
        sys_kind=kernels.SYS_V, phi_kind=kernels.PHI_POWER, pa=1.0, pb=3.5,
        obj_kind=kernels.OBJ_FLAT_BOTTOM, coeffs=[0.0], beta=0.0, gmode=0,
        ga=0.0, x0=[3.0], u0=[1.0], t0=0.0, h=1e-3, n_steps=400_000,
        record_every=10)),
    ("dry composite damping, 30k steps", dict(
        sys_kind=kernels.SYS_VGH, phi_kind=kernels.PHI_DRY, pa=0.5, pb=0.0,
        obj_kind=kernels.OBJ_DIAG_QUAD, coeffs=[1.0], beta=1.0, gmode=0,
        ga=0.0, x0=[2.0], u0=[2.0], t0=0.0, h=1e-3, n_steps=30_000,
        record_every=10)),
    ("vanishing damping + Hessian term, stiff plane, 140k steps", dict(
        sys_kind=kernels.SYS_OPEN, phi_kind=kernels.PHI_VISCOUS, pa=0.0, pb=0.0,
        obj_kind=kernels.OBJ_DIAG_QUAD, coeffs=[1.0, 1000.0], beta=1.0,
        gmode=kernels.GAM_OVER_T, ga=3.1, x0=[1.0, 1.0], u0=[0.0, 0.0],
        t0=1.0, h=1e-4, n_steps=140_000, record_every=10)),
    ("fixed friction, strongly convex, 200k steps", dict(
        sys_kind=kernels.SYS_OPEN, phi_kind=kernels.PHI_VISCOUS, pa=0.0, pb=0.0,
        obj_kind=kernels.OBJ_DIAG_QUAD, coeffs=[1.0], beta=0.0,
        gmode=kernels.GAM_CONST, ga=2.0, x0=[1.0], u0=[0.0], t0=0.0,
        h=1e-4, n_steps=200_000, record_every=100)),
]


def run_workload(mod, kw):
    d = len(kw["x0"])
    n_rec = kw["n_steps"] // kw["record_every"] + 2
    out_t = np.empty(n_rec)
    out_x = np.empty((n_rec, d))
    out_u = np.empty((n_rec, d))
    t0 = time.perf_counter()
    mod.run_fused(kw["sys_kind"], kw["phi_kind"], kw["pa"], kw["pb"],
                  kw["obj_kind"], np.asarray(kw["coeffs"], dtype=float),
                  kw["beta"], kw["gmode"], kw["ga"],
                  np.asarray(kw["x0"], dtype=float),
                  np.asarray(kw["u0"], dtype=float),
                  kw["t0"], kw["h"], kw["n_steps"], kw["record_every"],
                  out_t, out_x, out_u, 1e12)
    return time.perf_counter() - t0


def bench_root(mod, n=200_000):
    t0 = time.perf_counter()
    s = 0.3
    for k in range(n):
        s = mod.power_prox_root(1.0 + (k % 7) * 0.3, 0.004, 3.5, s)
    return time.perf_counter() - t0


def main():
    print(f"selected backend: {kernels.BACKEND}")
    if kc is None:
        print("compiled core not built; showing pure-Python timings only\n")
    rows = [("scalar prox root solve, 200k calls",
             bench_root(kpy), bench_root(kc) if kc else None)]
    for name, kw in WORKLOADS:
        t_py = run_workload(kpy, kw)
        t_c = run_workload(kc, kw) if kc else None
        rows.append((name, t_py, t_c))
    width = max(len(r[0]) for r in rows)
    print(f"{'workload':<{width}}  {'python':>9}  {'compiled':>9}  {'speedup':>8}")
    for name, t_py, t_c in rows:
        if t_c is None:
            print(f"{name:<{width}}  {t_py:>8.3f}s  {'-':>9}  {'-':>8}")
        else:
            print(f"{name:<{width}}  {t_py:>8.3f}s  {t_c:>8.3f}s  {t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
