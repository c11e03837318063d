"""Build script: compiles the optional Cython propagation kernel.

The package works without the extension (slsinc.kernels falls back to the
NumPy implementation), so any build failure here is demoted to a warning.
"""

import warnings

from setuptools import Extension, setup


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        warnings.warn(f"Cython/NumPy unavailable ({exc}); building without the compiled kernel")
        return []
    ext = Extension(
        "slsinc._propagate_cy",
        ["src/slsinc/_propagate_cy.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    try:
        return cythonize([ext], language_level=3)
    except Exception as exc:  # pragma: no cover - build-environment dependent
        warnings.warn(f"cythonize failed ({exc}); building without the compiled kernel")
        return []


setup(ext_modules=_extensions())
