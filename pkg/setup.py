"""Build the optional Cython kernel module; the package works without it."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("ENCODED_GATES_NO_EXT") != "1":
    try:
        import numpy  # noqa: F401
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "encoded_gates._ckernels",
                    ["src/encoded_gates/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
