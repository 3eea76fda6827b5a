import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("GBSHASH_NO_EXT", "") not in ("1", "true", "yes"):
    from Cython.Build import cythonize

    extensions = [
        Extension(
            "gbshash._wick_ext",
            ["src/gbshash/_wick_ext.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            # fp-contract off keeps results bit-identical to the numpy fallback
            extra_compile_args=["-O3", "-ffp-contract=off", "-fopenmp"],
            extra_link_args=["-fopenmp"],
        )
    ]
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
