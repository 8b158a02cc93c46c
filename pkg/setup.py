"""Build the optional compiled core.  Falls back to a pure-Python install
when Cython or a C compiler is unavailable."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("DUNKLKIT_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext = Extension(
            "dunklkit._core",
            ["src/dunklkit/_core.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
        ext_modules = cythonize([ext], language_level=3)
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
