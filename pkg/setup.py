import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The package works without the compiled kernels (kernels.pure takes over),
# so a missing Cython or STYLEBENCH_SKIP_NATIVE=1 just skips the extension.
ext_modules = []
if cythonize is not None and not os.environ.get("STYLEBENCH_SKIP_NATIVE"):
    ext_modules = cythonize(
        [
            Extension(
                "stylebench.kernels._native",
                sources=["src/stylebench/kernels/_native.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
