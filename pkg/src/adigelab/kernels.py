"""Kernel backend selection.

The compiled core (``_core``, built from ``_core.pyx``) is preferred; the
pure-Python module ``_kernels_py`` is the fallback.  Set the environment
variable ``ADIGELAB_PURE_PYTHON=1`` to force the fallback, e.g. to compare
backends (see ``benchmarks/bench_kernels.py``).
"""

import os

from . import _kernels_py

if os.environ.get("ADIGELAB_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

power_prox_root = _impl.power_prox_root
run_fused = _impl.run_fused

PHI_VISCOUS = _kernels_py.PHI_VISCOUS
PHI_DRY = _kernels_py.PHI_DRY
PHI_POWER = _kernels_py.PHI_POWER
PHI_SUM_VD = _kernels_py.PHI_SUM_VD

OBJ_DIAG_QUAD = _kernels_py.OBJ_DIAG_QUAD
OBJ_POW_ABS = _kernels_py.OBJ_POW_ABS
OBJ_FLAT_BOTTOM = _kernels_py.OBJ_FLAT_BOTTOM

SYS_V = _kernels_py.SYS_V
SYS_VH = _kernels_py.SYS_VH
SYS_VGH = _kernels_py.SYS_VGH
SYS_OPEN = _kernels_py.SYS_OPEN

GAM_CONST = _kernels_py.GAM_CONST
GAM_OVER_T = _kernels_py.GAM_OVER_T

STATUS_OK = _kernels_py.STATUS_OK
STATUS_DIVERGED = _kernels_py.STATUS_DIVERGED
STATUS_PROX_FAIL = _kernels_py.STATUS_PROX_FAIL
