"""Build script for the compiled tape-evaluator core.

The extension is optional: if Cython or a C compiler is unavailable the
package falls back to the pure-Python kernel at import time.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "vcalc._kernel._core",
                ["src/vcalc/_kernel/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
