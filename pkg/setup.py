"""Build the optional compiled kernels.

If Cython or a C compiler is unavailable the package still installs and
falls back to the numpy kernels at import time.
"""

import os
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    openmp = [] if sys.platform == "darwin" else ["-fopenmp"]
    # Tune for the build machine unless a portable binary is requested.
    arch = [] if os.environ.get("IRSFSO_PORTABLE") else ["-march=native"]
    ext_modules = cythonize(
        [
            Extension(
                "irsfso._kernels",
                ["src/irsfso/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3", "-fno-math-errno", "-fno-trapping-math"] + arch + openmp,
                depends=["src/irsfso/_hf_row.h"],
                extra_link_args=openmp,
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
