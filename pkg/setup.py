"""Build hook for the optional compiled term-merge kernel.

The package is pure Python plus one Cython extension. If Cython or a C
compiler is unavailable the extension is skipped and the pure-Python
kernel is used at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "superint._kernel",
                sources=["src/superint/_kernel.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
