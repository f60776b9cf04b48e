"""Build script for the optional Cython kernel extension.

The package works without the extension (a pure NumPy fallback is selected
at import time); building it speeds up the Monte Carlo heavy paths.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "cointsearch._kernels._core",
        ["src/cointsearch/_kernels/_core.pyx"],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        include_dirs=[numpy.get_include()],
    ),
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
