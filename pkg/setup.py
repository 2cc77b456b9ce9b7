"""Build script for the optional compiled kernel core.

Build in place with ``python setup.py build_ext --inplace``.  If Cython (or a
C compiler) is unavailable the package still works: the pure-Python kernels
are selected automatically at import time.
"""

from setuptools import setup, Extension

import numpy as np


def get_extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("WARNING: Cython not available, building without the compiled core.")
        return []

    extensions = [
        Extension(
            "adigelab._core",
            sources=["src/adigelab/_core.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
    ]
    return cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )


setup(ext_modules=get_extensions())
