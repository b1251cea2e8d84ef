import os

import numpy
from setuptools import Extension, setup

# the compiled scans are optional; the package falls back to NumPy
ext_modules = []
if os.environ.get("HYLTL_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("hyltl.ltl._kernels", ["src/hyltl/ltl/_kernels.pyx"],
                       include_dirs=[numpy.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                       extra_compile_args=["-O2"])],
            language_level=3,
        )

setup(ext_modules=ext_modules)
