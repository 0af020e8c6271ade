"""Build script: compiles the optional Cython acceleration module.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so any build failure here is demoted to a warning.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible; fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or Cython missing
            sys.stderr.write(f"warning: skipping C extension build ({exc})\n")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            sys.stderr.write(f"warning: skipping {ext.name} ({exc})\n")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "aggflow._accel._kernels_cy",
                ["src/aggflow/_accel/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off keeps elementwise arithmetic bitwise
                # identical to the NumPy fallback (no FMA contraction).
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
