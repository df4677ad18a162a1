"""Build script for the optional compiled graph kernel.

The package works without the extension (a pure-Python kernel is selected
at import time); set KGCHAIN_NO_EXTENSION=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("KGCHAIN_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "kgchain.kg._fastcore",
                    ["src/kgchain/kg/_fastcore.pyx"],
                    language="c++",
                    extra_compile_args=["-O3", "-std=c++11"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
