"""Builds the optional compiled kernel extension.

The package is fully functional without it (pure-Python fallback is selected
at import time); the extension is skipped silently if Cython or a compiler
is unavailable.
"""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/doublesim/_kernels/_core.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
