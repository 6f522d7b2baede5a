"""Build script for the optional compiled SOR kernels.

The package works without the extension (a pure-Python fallback is
selected at import time); the extension is only a speedup for the
obstacle-problem sweeps.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy

    ext_modules = cythonize(
        [
            Extension(
                "necrotumor._psor",
                ["src/necrotumor/_psor.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
