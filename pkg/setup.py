"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""

import sys

from setuptools import Extension, setup


def make_ext_modules():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(f"nlslab: skipping compiled kernels ({exc})", file=sys.stderr)
        return []
    ext = Extension(
        "nlslab._kernels_cy",
        ["src/nlslab/_kernels_cy.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=make_ext_modules())
