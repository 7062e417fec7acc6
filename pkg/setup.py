import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PASSIVE_PURIFY_NO_EXT"):
    from Cython.Build import cythonize

    extensions = [
        Extension(
            "passive_purify._kernels",
            ["src/passive_purify/_kernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
        )
    ]
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
