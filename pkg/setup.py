"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (a pure-Python
implementation of the same kernels is selected at import time), so a
missing compiler or Cython only costs speed, never functionality.
"""

from setuptools import Extension, setup

ext_modules = []
cmdclass = {}

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "memheat.kernels._core",
                sources=["src/memheat/kernels/_core.pyx"],
                # No -ffast-math: the pure and compiled kernels must agree
                # bit for bit so either backend reproduces the same runs.
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules, cmdclass=cmdclass)
