"""Build script: compiles the optional speedup extension when Cython is available.

The package works without the extension; glyphkit.kernels falls back to the
pure-Python implementations at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension("glyphkit._speedups", ["src/glyphkit/_speedups.pyx"]),
]

if cythonize is not None:
    ext_modules = cythonize(extensions, language_level=3)
else:
    ext_modules = []

setup(ext_modules=ext_modules)
