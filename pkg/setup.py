"""Build script: compiles the hot-loop kernels as a C extension.

Set TICKWORK_NO_EXT=1 to skip the extension and install pure Python only;
the package falls back to the reference kernels at import time.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("TICKWORK_NO_EXT"):
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "tickwork._fast",
        ["src/tickwork/_fast.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # keep strict IEEE arithmetic so the compiled lane matches the
        # reference lane bit for bit
        extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
    )
    ext_modules = cythonize([ext], language_level="3")

setup(ext_modules=ext_modules)
