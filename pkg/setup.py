"""Build script for the optional compiled permutation kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a missing Cython toolchain degrades the build instead of
failing it.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "nonlocalsim._cycle_kernel",
                ["src/nonlocalsim/_cycle_kernel.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
