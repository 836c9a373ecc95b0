"""Build hook for the optional compiled integrator kernels.

The package is fully functional without the extension (a pure-numpy
twin is selected at import time); this just makes the hot loops fast
when a compiler and Cython are available.
"""

from setuptools import Extension, setup


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "rydgate._kernels",
        ["src/rydgate/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions())
