"""Build script: compiles the optional RK4 extension when possible.

The package works without it; dynamics selects the pure-Python kernel
at import time when the compiled one is absent.
"""
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Skip the extension, with a warning, when no toolchain can build it."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            warnings.warn(f"skipping compiled integrator: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping compiled integrator: {exc}")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython unavailable; using the pure-Python integrator")
        return []
    return cythonize(
        [Extension("cmutkit._integrator", ["src/cmutkit/_integrator.pyx"])],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
