"""Build script for the optional compiled kernel.

The package is pure Python plus one Cython extension holding the hot
least-norm system kernel.  The extension is optional: if Cython or a C
compiler is unavailable the install still succeeds and the package falls
back to the numpy implementation at import time.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "h1dfo._kernels._lnkernel",
                ["src/h1dfo/_kernels/_lnkernel.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
