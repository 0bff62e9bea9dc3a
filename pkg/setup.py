"""Build script for the optional compiled kernel core.

The package is fully functional without the extension (the numpy kernel
backend is selected at import time); the extension is attempted and any
build failure downgrades the install to pure Python with a warning.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the Cython core if possible, otherwise install pure Python."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, cythonize failure, ...
            warnings.warn(f"compiled kernels skipped ({exc}); "
                          "falling back to the numpy backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernels skipped ({exc}); "
                          "falling back to the numpy backend")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available; installing without compiled kernels")
        return []
    ext = Extension(
        "neglearn.kernels._core",
        ["src/neglearn/kernels/_core.pyx"],
        extra_compile_args=["-O3", "-funroll-loops"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
