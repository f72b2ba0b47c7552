"""Build script: compiles the optional fast kernels extension.

The package works without the extension (a pure NumPy implementation is
selected at import time), so a failed cythonization or missing compiler
must not break installation.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("knotenergy._speedups", ["src/knotenergy/_speedups.pyx"])],
        language_level="3",
    )
except Exception as exc:  # cython or compiler unavailable
    print(f"knotenergy: building without compiled kernels ({exc})")
    ext_modules = []

setup(ext_modules=ext_modules)
