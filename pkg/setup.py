import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# Strict IEEE float32 semantics are required: the pure-python fallback must be
# bit-identical, so no -ffast-math and no FMA contraction.
ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "tcfft._core",
                sources=["src/tcfft/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
