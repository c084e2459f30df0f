"""Build script: compiles the optional fast kernels when Cython is available.

The package is fully functional without the extension (pure numpy fallbacks
are selected at import time); the build therefore never fails on a missing
compiler or Cython.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("WINTGEN_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
        import numpy as np

        ext = Extension(
            "wintgen._kernels",
            ["src/wintgen/_kernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            optional=True,
        )
        ext_modules = cythonize([ext], language_level="3")
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
