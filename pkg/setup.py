"""Build script for the optional compiled core.

The package works without the extension (a NumPy fallback is selected at
import time), so any failure to compile is downgraded to a warning.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the accelerator extension, but never fail the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"warning: compiled core not built ({exc}); "
            "falling back to the pure NumPy implementation",
            file=sys.stderr,
        )


try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "coagfrag._core_cy",
                ["src/coagfrag/_core_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:  # pragma: no cover - cython not installed
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
