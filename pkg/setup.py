"""Build script: compiles the simplex hot kernel when Cython is available.

A plain `pip install .` without Cython (or with a broken compiler) still
produces a working package; stlmpc.milp.kernel falls back to the pure
numpy implementation at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "stlmpc.milp._simplex_cy",
                ["src/stlmpc/milp/_simplex_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
