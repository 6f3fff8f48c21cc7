"""Build the optional Cython kernel; the package falls back to numpy without it."""
import os

import numpy as np
from setuptools import Extension, setup


def _extensions():
    if os.environ.get("MULTICORR_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "multicorr._ckernels",
        ["src/multicorr/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=_extensions())
