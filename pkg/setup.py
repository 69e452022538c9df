import sys

import numpy as np
from setuptools import setup

# The compiled stepper is an optimization, not a requirement: the package
# falls back to the numpy implementation when the extension is absent.
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "eitmem.dynamics._stepper",
                ["src/eitmem/dynamics/_stepper.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    print("Cython not available; building without the compiled stepper", file=sys.stderr)
    extensions = []

setup(ext_modules=extensions)
