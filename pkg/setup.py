"""Build script for the optional compiled oracle kernel.

Without Cython or a C compiler the package still installs and falls back to
the pure-Python kernel at import time.
"""
from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("shiqcq.oracle._kernel_c", ["src/shiqcq/oracle/_kernel_c.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
