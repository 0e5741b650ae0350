"""Build script.

The time stepper has a Cython fast path (nlkglab._stepper). If the extension
cannot be built the package still installs and falls back to the pure-numpy
stepper at import time, so the build is best effort.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, otherwise continue without it."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"building optional extension failed ({exc}); "
                          "falling back to the pure-python stepper")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"building {ext.name} failed ({exc}); "
                          "falling back to the pure-python stepper")


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:  # pragma: no cover - cython not installed
        return []
    ext = Extension(
        "nlkglab._stepper",
        ["src/nlkglab/_stepper.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
