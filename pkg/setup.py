import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

# The compiled kernel is an optional speedup; the package falls back to the
# NumPy implementation in onebit_relay._kernels_np when the build is skipped.
extensions = [
    Extension(
        "onebit_relay._kernels",
        ["src/onebit_relay/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
