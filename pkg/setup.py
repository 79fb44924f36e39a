"""Build script: compiles the optional Cython core.

The extension is optional.  If Cython (or a C compiler) is unavailable, the
package installs anyway and falls back to the numpy kernels at import time.
Set LRFANOUT_NO_EXT=1 to skip the compilation step explicitly.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("LRFANOUT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("lrfanout._core", ["src/lrfanout/_core.pyx"])],
            language_level=3,
        )
    except ImportError:
        print("Cython not available; building without the compiled core")

setup(ext_modules=ext_modules)
