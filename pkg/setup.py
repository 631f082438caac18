"""Build script: compiles the optional MPFR Taylor kernel.

The extension is a performance core only; if it cannot be built (no
libmpfr headers, no Cython), the package installs anyway and falls back
to the pure-Python kernel at import time.
"""
import sys

from setuptools import setup


def extension_modules():
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "ertbp._taylor_core",
        sources=["src/ertbp/_taylor_core.pyx"],
        libraries=["mpfr", "gmp"],
        extra_compile_args=["-O2"],
    )
    try:
        return cythonize([ext], language_level=3)
    except Exception as exc:  # pragma: no cover
        sys.stderr.write(f"skipping compiled kernel: {exc}\n")
        return []


setup(ext_modules=extension_modules())
