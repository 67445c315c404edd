"""Build script for the optional compiled kernels.

The package works without the extension (a pure-numpy fallback is selected
at import time); building it speeds up the per-step inference path.
Build in place with:

    python3 setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "playmask.nets._fastdense",
                ["src/playmask/nets/_fastdense.pyx", "src/playmask/nets/_dense_dot.c"],
                include_dirs=[numpy.get_include(), "src/playmask/nets"],
                extra_compile_args=["-O3", "-march=native"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
