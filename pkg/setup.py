"""Builds the optional Cython kernel for the tagger hot loop.

If the extension fails to build (no compiler, no Cython), the package still
installs and falls back to the numpy kernels at import time.
"""

import numpy as np
from setuptools import setup, Extension

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "panner.tagger.kernels._ckernels",
                ["src/panner/tagger/kernels/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
