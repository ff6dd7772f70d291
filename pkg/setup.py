"""Build script for the optional compiled betweenness kernel.

The package is fully functional without the extension: teamnet.kernels falls
back to the pure-Python implementation when the compiled module is missing.
Set TEAMNET_NO_EXT=1 to skip compilation entirely (e.g. on machines without
a C toolchain).
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("TEAMNET_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "teamnet._brandes",
                    ["src/teamnet/_brandes.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
