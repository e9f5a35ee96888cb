"""Build hook for the optional compiled convolution kernel.

The package works without the extension: lie_kam.backend falls back to the
vectorized numpy kernel when lie_kam._convkernel is missing. Build in place
for development with

    python setup.py build_ext --inplace
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "lie_kam._convkernel",
                ["src/lie_kam/_convkernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
