"""Build the optional compiled collector; the package works without it."""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("NILCSP_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("nilcsp._ckernel", ["src/nilcsp/_ckernel.pyx"])],
            compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
            quiet=True,
        )

setup(ext_modules=ext_modules)
