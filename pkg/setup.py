"""Build script for the compiled particle kernels.

The extension is optional: without Cython or a C compiler the package
installs with the numpy fallback only.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("KBMPLASMA_NO_EXT", "") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "kbmplasma.pic._kernels",
                    ["src/kbmplasma/pic/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
